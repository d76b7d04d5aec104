#pragma once

#include "upblab/atoms.hpp"
#include "upblab/canonical.hpp"
#include "upblab/segre.hpp"

namespace upblab {

struct PPTState {
  Mat rho;
  int rank = 0;
  int rank_T1 = 0;
  double min_eig = 0.0;
  double min_eig_T1 = 0.0;
  double max_eig = 0.0;
  double max_eig_T1 = 0.0;
  Mat kernel;
  int n = 3, m = 3;

  bool is_psd(const Tolerance& tol = {}) const { return min_eig >= -tol.psd_rel * std::max(max_eig, 1e-300); }
  bool is_ppt(const Tolerance& tol = {}) const {
    return is_psd(tol) && min_eig_T1 >= -tol.psd_rel * std::max(max_eig_T1, 1e-300);
  }
};

inline PPTState make_state(const Mat& rho_in, int n = 3, int m = 3, const Tolerance& tol = {}, bool normalize = true) {
  if (rho_in.rows() != n * m || rho_in.cols() != n * m) throw InputError("state has wrong dimension");
  if (!is_hermitian(rho_in, 1e-10)) throw InputError("state is not Hermitian");
  PPTState st;
  st.n = n;
  st.m = m;
  st.rho = 0.5 * (rho_in + rho_in.adjoint());
  if (normalize) {
    cd tr = st.rho.trace();
    if (std::abs(tr) < 1e-300) throw InputError("state has zero trace");
    st.rho /= tr.real();
  }
  auto e = hermitian_eigen(st.rho, tol);
  Mat T1 = partial_transpose(st.rho, n, m, 1);
  auto e1 = hermitian_eigen(T1, tol);
  st.min_eig = e.values(0);
  st.max_eig = e.values(e.values.size() - 1);
  st.min_eig_T1 = e1.values(0);
  st.max_eig_T1 = e1.values(e1.values.size() - 1);
  st.rank = numerical_rank(st.rho, tol);
  st.rank_T1 = numerical_rank(T1, tol);
  st.kernel = null_basis(st.rho, tol);
  return st;
}

// Closed-form rank-4 state with the five normal-form product vectors in its kernel.
// Entries are indexed 1..9 with index 3(i-1)+j.
inline Mat rho_from_params(double p, double q, double r, double s, int sign) {
  if (sign != 1 && sign != -1) throw InputError("sign must be +1 or -1");
  if (!all_atoms_nonzero(p, q, r, s)) throw InputError("rho_from_params: vanishing atom");
  double rs = r - s;
  double a1 = (q * r - s) / (r * (q - 1));
  double a2 = (p * s - r) / (s * (p - 1));
  double a3 = rs * (p * s - q) / (p * (p - q) * (s - 1));
  double a4 = (p - s) * rs / (p * s * (p - 1) * (s - 1));
  double a5 = (q * r - p) * rs / (q * (p - q) * (r - 1));
  double a6 = (r - q) * rs / (q * r * (q - 1) * (r - 1));
  double b1 = -1.0;
  double b2 = -rs / (r * (q - 1));
  double b3 = rs / (s * (p - 1));
  double b4 = -rs / (p * (s - 1));
  double b5 = -rs / (p - q);
  double b6 = rs / (q * (r - 1));
  Mat M = Mat::Zero(9, 9);
  auto set = [&](int i, int j, double v) {
    M(i - 1, j - 1) = v;
    M(j - 1, i - 1) = v;
  };
  set(2, 2, a1);
  set(3, 3, a2);
  set(4, 4, a3);
  set(6, 6, a4);
  set(7, 7, a5);
  set(8, 8, a6);
  set(2, 3, b1);
  set(2, 8, b2);
  set(3, 6, b3);
  set(4, 6, b4);
  set(4, 7, b5);
  set(7, 8, b6);
  return double(sign) * M;
}

// Index pairs (1-based) of the diagonal and off-diagonal unknowns of the ansatz.
inline const std::array<std::pair<int, int>, 12>& ansatz_positions() {
  static const std::array<std::pair<int, int>, 12> pos = {
      {{2, 2}, {3, 3}, {4, 4}, {6, 6}, {7, 7}, {8, 8}, {2, 3}, {2, 8}, {3, 6}, {4, 6}, {4, 7}, {7, 8}}};
  return pos;
}

struct ConstraintSolution {
  std::array<double, 6> a{};
  std::array<double, 6> b{};
  int nullspace_dim = 0;
  Mat matrix;
  double proportionality_residual = 0.0;
  double equation_residual = 0.0;
};

inline json to_json(const ConstraintSolution& c) {
  return json{{"a", c.a},
              {"b", c.b},
              {"nullspace_dim", c.nullspace_dim},
              {"matrix", to_json(c.matrix)},
              {"proportionality_residual", c.proportionality_residual},
              {"equation_residual", c.equation_residual}};
}

// Solves the kernel conditions rho x = 0 and rho^{T1} x~ = 0 for the five normal-form
// vectors directly on the 12-parameter ansatz.
inline ConstraintSolution rho_from_constraints(double p, double q, double r, double s, const Tolerance& tol = {}) {
  if (!all_atoms_nonzero(p, q, r, s)) throw InputError("rho_from_constraints: vanishing atom");
  auto vecs = canonical_vectors(p, q, r, s);
  const auto& pos = ansatz_positions();
  Mat Sys(5 * 18, 12);
  for (int u = 0; u < 12; ++u) {
    Mat E = Mat::Zero(9, 9);
    E(pos[std::size_t(u)].first - 1, pos[std::size_t(u)].second - 1) = 1.0;
    E(pos[std::size_t(u)].second - 1, pos[std::size_t(u)].first - 1) = 1.0;
    Mat ET = partial_transpose(E, 3, 3, 1);
    for (int i = 0; i < 5; ++i) {
      const auto& v = vecs[std::size_t(i)];
      Vec x = v.full();
      Vec xt = kron(Vec(v.phi().conjugate()), v.psi());
      Sys.block(18 * i, u, 9, 1) = E * x;
      Sys.block(18 * i + 9, u, 9, 1) = ET * xt;
    }
  }
  ConstraintSolution c;
  Mat nb = null_basis(Sys, tol);
  c.nullspace_dim = int(nb.cols());
  if (c.nullspace_dim != 1)
    throw InputError("kernel conditions have a " + std::to_string(c.nullspace_dim) + "-dimensional solution space");
  Vec x = nb.col(0);
  // Fix the phase so the solution is real, then the scale so that b1 = -1.
  cd ph = x(6) / std::abs(x(6));
  x /= ph;
  x *= -1.0 / x(6).real();
  c.equation_residual = (Sys * x).norm();
  Mat M = Mat::Zero(9, 9);
  for (int u = 0; u < 12; ++u) {
    double v = x(u).real();
    if (u < 6)
      c.a[std::size_t(u)] = v;
    else
      c.b[std::size_t(u - 6)] = v;
    M(pos[std::size_t(u)].first - 1, pos[std::size_t(u)].second - 1) = v;
    M(pos[std::size_t(u)].second - 1, pos[std::size_t(u)].first - 1) = v;
  }
  c.matrix = M;
  Mat P = rho_from_params(p, q, r, s, 1);
  cd k = (M.adjoint() * P).trace() / (M.adjoint() * M).trace();
  c.proportionality_residual = (k * M - P).norm() / P.norm();
  return c;
}

inline PPTState oupb_projector(const PentagramUPB& upb, const Tolerance& tol = {}) {
  if (upb.v.size() != 5 || upb.w.size() != 5) throw InputError("pentagram UPB needs five vectors per side");
  auto prods = upb.products();
  for (std::size_t i = 0; i < 5; ++i) {
    if (std::abs(prods[i].full().norm() - 1.0) > 1e-10) throw InputError("UPB vectors must be unit vectors");
    for (std::size_t j = i + 1; j < 5; ++j)
      if (std::abs(prods[i].full().dot(prods[j].full())) > 1e-10) throw InputError("UPB vectors are not orthogonal");
  }
  Mat rho = Mat::Identity(9, 9);
  for (const auto& pv : prods) rho -= proj(pv.full());
  return make_state(rho / 4.0, 3, 3, tol, false);
}

inline Mat local_conjugate(const Mat& rho, const Mat& A, const Mat& B) {
  Mat AB = kron_matrix(A, B);
  return AB.adjoint() * rho * AB;
}

struct StateFromGupb {
  bool found = false;
  PPTState state;
  CanonicalFive canonical;
  int sign = 0;
  double kernel_residual = 0.0;
  std::string reason;
};

inline StateFromGupb state_from_gupb(const std::vector<ProductVector>& vs, const Tolerance& tol = {}) {
  if (vs.size() != 5) throw InputError("state_from_gupb needs five product vectors");
  GupbCertificate cert = is_minimal_gupb(vs, 3, 3, tol);
  if (!cert.verdict) throw InputError("not a minimal gUPB: " + cert.reason);
  StateFromGupb out;
  out.canonical = canonical_five(vs, {1, 2, 3, 4, 5}, tol);
  const auto& c = out.canonical;
  for (cd z : {c.p, c.q, c.r, c.s})
    if (!approx_real(z)) throw InputError("canonical parameters are not real; no PPT state has this kernel");
  double p = c.p.real(), q = c.q.real(), r = c.r.real(), s = c.s.real();
  for (int sign : {1, -1}) {
    Mat cand = rho_from_params(p, q, r, s, sign);
    RVec ev = hermitian_eigen(cand, tol).values;
    if (ev(0) < -tol.psd_rel * ev(ev.size() - 1)) continue;
    Mat rho = local_conjugate(cand, c.A, c.B);
    out.state = make_state(rho, 3, 3, tol);
    out.sign = sign;
    out.found = true;
    double res = 0;
    for (const auto& v : vs) res = std::max(res, (out.state.rho * v.full()).norm() / v.full().norm());
    out.kernel_residual = res;
    if (res > tol.residual) throw NumericalError("state_from_gupb: kernel residual too large");
    return out;
  }
  out.reason = "neither sign gives a positive semidefinite matrix";
  return out;
}

struct SubtractResult {
  double lambda = 0.0;
  Mat reduced;
  int rank_before = 0, rank_after = 0, rank_T1_before = 0, rank_T1_after = 0;
};

inline SubtractResult subtract_product(const PPTState& st, const ProductVector& pv, const Tolerance& tol = {}) {
  int n = st.n, m = st.m;
  ProductVector u = pv.normalized();
  Vec x = u.full();
  Vec xt = kron(Vec(u.phi().conjugate()), u.psi());
  Mat T1 = partial_transpose(st.rho, n, m, 1);
  if (subspace_distance(range_basis(st.rho, tol), x) > tol.residual)
    throw InputError("product vector is not in the range of the state");
  if (subspace_distance(range_basis(T1, tol), xt) > tol.residual)
    throw InputError("partially conjugated product vector is not in the range of the partial transpose");
  double l1 = 1.0 / x.dot(pseudo_inverse(st.rho, tol) * x).real();
  double l2 = 1.0 / xt.dot(pseudo_inverse(T1, tol) * xt).real();
  SubtractResult r;
  r.lambda = std::min(l1, l2);
  r.reduced = st.rho - r.lambda * x * x.adjoint();
  r.rank_before = st.rank;
  r.rank_T1_before = st.rank_T1;
  // Relative rank threshold loosened to the residual level: the cancelled direction is only
  // zero to rounding of the pseudo-inverse.
  Tolerance t2 = tol;
  t2.rank_rel = std::max(tol.rank_rel, 1e-8);
  r.rank_after = numerical_rank(r.reduced, t2);
  r.rank_T1_after = numerical_rank(partial_transpose(r.reduced, n, m, 1), t2);
  return r;
}

enum class Classification { SeparableCandidate, EntangledUPBForm, Undetermined };

inline const char* classification_name(Classification c) {
  switch (c) {
    case Classification::SeparableCandidate: return "Separable-candidate";
    case Classification::EntangledUPBForm: return "EntangledUPBForm";
    default: return "Undetermined";
  }
}

struct ClassifyResult {
  Classification kind = Classification::Undetermined;
  Mat A, B;
  PentagramUPB upb;
  int perm_index = 0;
  int dropped = -1;  // index of the kernel product left out, 0-based
  double residual = 0.0;
  std::vector<ProductVector> kernel_subset;
  std::vector<ProductVector> separable_witnesses;
  std::optional<SegreSolution> kernel_products;
  std::optional<SegreSolution> range_products;
  std::optional<OrthogonalizeResult> orthogonalization;
  std::vector<std::string> diagnostics;
};

inline std::vector<ProductVector> range_products_with_conjugate(const PPTState& st, const SegreSolution& rp,
                                                                const Tolerance& tol) {
  Mat T1 = partial_transpose(st.rho, 3, 3, 1);
  Mat rT = range_basis(T1, tol);
  std::vector<ProductVector> out;
  for (const auto& p : rp.points) {
    Vec xt = kron(Vec(p.phi().conjugate()), p.psi());
    if (subspace_distance(rT, xt) <= tol.residual) out.push_back(p);
  }
  return out;
}

inline ClassifyResult classify(const PPTState& st, const Tolerance& tol = {}) {
  if (st.n != 3 || st.m != 3) throw InputError("classification is defined on 3x3 systems");
  if (st.rank != 4) throw InputError("classification supports rank-4 states only (rank " + std::to_string(st.rank) + ")");
  if (!st.is_ppt(tol)) throw InputError("state is not PPT");
  ClassifyResult out;
  try {
    out.kernel_products = products_in_kernel(st.kernel, tol);
  } catch (const NumericalError& e) {
    out.diagnostics.push_back(std::string("kernel products: ") + e.what());
  }
  if (out.kernel_products && !out.kernel_products->positive_dimensional) {
    const auto& pts = out.kernel_products->points;
    if (pts.size() != 6)
      out.diagnostics.push_back("kernel contains " + std::to_string(pts.size()) + " product vectors, expected 6");
    for (std::size_t drop = 0; drop < pts.size() && pts.size() >= 5; ++drop) {
      std::vector<ProductVector> five;
      for (std::size_t i = 0; i < pts.size(); ++i)
        if (i != drop) five.push_back(pts[i]);
      if (five.size() != 5) continue;
      if (!is_minimal_gupb(five, 3, 3, tol).verdict) continue;
      OrthogonalizeResult o;
      try {
        o = orthogonalize_upb(five, tol);
      } catch (const std::exception& e) {
        out.diagnostics.push_back(std::string("orthogonalization: ") + e.what());
        continue;
      }
      if (!out.orthogonalization) out.orthogonalization = o;
      if (!o.found) continue;
      Mat P = Mat::Identity(9, 9);
      for (const auto& pv : o.upb.products()) P -= proj(pv.full());
      Mat rec = local_conjugate(P, o.A, o.B);
      rec /= rec.trace().real();
      Mat target = st.rho / st.rho.trace().real();
      double res = (rec - target).norm() / target.norm();
      if (res <= 1e-6) {
        out.kind = Classification::EntangledUPBForm;
        out.A = o.A;
        out.B = o.B;
        out.upb = o.upb;
        out.perm_index = o.perm_index;
        out.dropped = int(drop);
        out.residual = res;
        out.kernel_subset = five;
        out.orthogonalization = o;
        return out;
      }
      out.diagnostics.push_back("reconstruction residual " + std::to_string(res) + " after dropping point " +
                                std::to_string(drop + 1));
    }
  }
  try {
    out.range_products = products_in_range(range_basis(st.rho, tol), tol);
    out.separable_witnesses = range_products_with_conjugate(st, *out.range_products, tol);
    if (!out.separable_witnesses.empty()) {
      out.kind = Classification::SeparableCandidate;
      return out;
    }
    out.diagnostics.push_back("no product vector in the range has its partial conjugate in the range of the partial transpose");
  } catch (const NumericalError& e) {
    out.diagnostics.push_back(std::string("range products: ") + e.what());
  }
  return out;
}

struct AnalysisReport {
  bool is_psd = false, is_ppt = false;
  int rank = 0, rank_T1 = 0;
  double min_eig = 0, min_eig_T1 = 0;
  std::optional<SegreSolution> kernel_products;
  std::optional<GupbCertificate> gupb;
  std::optional<std::array<InvariantQuadruple, 12>> invariant_scan;
  int matching_permutation = 0;
  bool is_edge = false;
  ClassifyResult classification;
};

inline AnalysisReport analyze(const PPTState& st, const Tolerance& tol = {}) {
  AnalysisReport r;
  r.is_psd = st.is_psd(tol);
  r.is_ppt = st.is_ppt(tol);
  r.rank = st.rank;
  r.rank_T1 = st.rank_T1;
  r.min_eig = st.min_eig;
  r.min_eig_T1 = st.min_eig_T1;
  if (st.rank != 4) throw InputError("analysis supports rank-4 states only (rank " + std::to_string(st.rank) + ")");
  if (!r.is_psd) throw InputError("state is not positive semidefinite");
  if (!r.is_ppt) throw InputError("state is not PPT; analysis covers PPT states");
  r.classification = classify(st, tol);
  const ClassifyResult& c = r.classification;
  r.kernel_products = c.kernel_products;
  if (c.kernel_products && c.kernel_products->points.size() >= 5 && !c.kernel_products->positive_dimensional) {
    const auto& pts = c.kernel_products->points;
    r.gupb = pts.size() == 5 ? is_minimal_gupb(pts, 3, 3, tol) : is_gupb(pts, 3, 3, tol);
    std::vector<ProductVector> five = c.kernel_subset;
    if (five.empty()) five.assign(pts.begin(), pts.begin() + 5);
    try {
      r.invariant_scan = invariant_scan(five);
      r.matching_permutation = c.perm_index;
    } catch (const InputError& e) {
      r.classification.diagnostics.push_back(std::string("invariant scan: ") + e.what());
    }
  }
  std::optional<SegreSolution> rp = c.range_products;
  if (!rp) {
    try {
      rp = products_in_range(range_basis(st.rho, tol), tol);
    } catch (const NumericalError& e) {
      r.classification.diagnostics.push_back(std::string("range products: ") + e.what());
    }
  }
  r.is_edge = rp && range_products_with_conjugate(st, *rp, tol).empty();
  return r;
}

inline json to_json(const ClassifyResult& c) {
  json j{{"classification", classification_name(c.kind)}, {"diagnostics", c.diagnostics}};
  if (c.kind == Classification::EntangledUPBForm) {
    j["A"] = to_json(c.A);
    j["B"] = to_json(c.B);
    j["upb"] = to_json(c.upb);
    j["permutation_index"] = c.perm_index;
    j["dropped_point"] = c.dropped + 1;
    j["reconstruction_residual"] = c.residual;
  }
  if (c.kind == Classification::SeparableCandidate) {
    json w = json::array();
    for (const auto& p : c.separable_witnesses) w.push_back(to_json(p));
    j["range_products"] = w;
  }
  return j;
}

inline json to_json(const AnalysisReport& r) {
  json j{{"is_psd", r.is_psd},   {"is_ppt", r.is_ppt},   {"rank", r.rank},       {"rank_T1", r.rank_T1},
         {"min_eig", r.min_eig}, {"min_eig_T1", r.min_eig_T1}, {"is_edge", r.is_edge}};
  j["kernel_products"] = r.kernel_products ? to_json(*r.kernel_products) : json(nullptr);
  j["gupb"] = r.gupb ? to_json(*r.gupb) : json(nullptr);
  if (r.invariant_scan) {
    json s = json::array();
    for (const auto& q : *r.invariant_scan) s.push_back(to_json(q));
    j["invariant_scan"] = s;
  } else {
    j["invariant_scan"] = nullptr;
  }
  j["matching_permutation"] = r.matching_permutation;
  j["classification"] = to_json(r.classification);
  return j;
}

inline ProductVector product_in_range_2xn(const PPTState& st, const Tolerance& tol = {}) {
  if (st.n != 2 || st.m < 1 || st.m > 5) throw InputError("product_in_range_2xn needs a 2 x n state with n <= 5");
  if (!st.is_ppt(tol)) throw InputError("state is not PPT");
  Mat range = range_basis(st.rho, tol);
  ProductSearch2xn res = products_in_subspace_2xn(range, st.m, tol);
  const std::vector<ProductVector>& pts = res.is_curve ? res.samples : res.finite.points;
  for (const auto& p : pts)
    if (subspace_distance(range, p.full()) <= tol.residual) return p;
  throw NumericalError("no product vector found in the range of a 2 x n PPT state");
}

}  // namespace upblab
