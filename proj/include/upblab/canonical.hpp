#pragma once

#include "upblab/gupb.hpp"

#include <array>

namespace upblab {

using Perm5 = std::array<int, 5>;  // one-line notation, 1-based

// Representatives of the 12 classes of S5 modulo the pentagon symmetry group.
inline const std::array<Perm5, 12>& pentagon_permutations() {
  static const std::array<Perm5, 12> perms = {{{1, 2, 3, 4, 5},
                                               {1, 3, 2, 4, 5},
                                               {2, 1, 3, 4, 5},
                                               {2, 3, 1, 4, 5},
                                               {3, 1, 2, 4, 5},
                                               {3, 2, 1, 4, 5},
                                               {1, 2, 4, 3, 5},
                                               {1, 4, 2, 3, 5},
                                               {2, 1, 4, 3, 5},
                                               {2, 4, 1, 3, 5},
                                               {1, 3, 4, 2, 5},
                                               {1, 4, 3, 2, 5}}};
  return perms;
}

// Reordering that turns the pentagram psi-side into a consecutive pentagon.
inline const Perm5& pentagram_psi_order() {
  static const Perm5 tau = {1, 3, 5, 2, 4};
  return tau;
}

// out[k] = in[perm[k] - 1]
template <typename T>
std::vector<T> permuted(const std::vector<T>& in, const Perm5& perm) {
  if (in.size() != 5) throw InputError("expected five elements");
  std::vector<T> out;
  for (int k : perm) out.push_back(in[std::size_t(k - 1)]);
  return out;
}

inline cd det3(const Vec& a, const Vec& b, const Vec& c) {
  Eigen::Matrix3cd M;
  M << a, b, c;
  return M.determinant();
}

struct InvariantQuadruple {
  std::array<cd, 4> s{};

  bool all_real_positive() const {
    for (cd z : s)
      if (!(approx_real(z) && z.real() > 1e-10)) return false;
    return true;
  }
};

inline json to_json(const InvariantQuadruple& q) {
  json a = json::array();
  for (cd z : q.s) a.push_back(to_json(z));
  return a;
}

inline InvariantQuadruple invariants(const std::vector<Vec>& f, const std::vector<Vec>& g) {
  if (f.size() != 5 || g.size() != 5) throw InputError("invariants need five vectors on each side");
  for (const auto& v : f)
    if (v.size() != 3) throw InputError("invariants are defined for C^3");
  for (const auto& v : g)
    if (v.size() != 3) throw InputError("invariants are defined for C^3");
  auto D = [](const std::vector<Vec>& v, int i, int j, int k) { return det3(v[i - 1], v[j - 1], v[k - 1]); };
  auto ratio = [](cd n1, cd n2, cd d1, cd d2) {
    cd den = d1 * d2;
    if (std::abs(den) < 1e-14 * (1.0 + std::abs(n1 * n2))) throw InputError("invariants: vanishing denominator");
    return -(n1 * n2) / den;
  };
  InvariantQuadruple q;
  q.s[0] = ratio(D(f, 1, 2, 4), D(f, 1, 3, 5), D(f, 1, 2, 5), D(f, 1, 3, 4));
  q.s[1] = ratio(D(f, 1, 2, 3), D(f, 2, 4, 5), D(f, 1, 2, 4), D(f, 2, 3, 5));
  q.s[2] = ratio(D(g, 1, 3, 2), D(g, 1, 5, 4), D(g, 1, 3, 4), D(g, 1, 5, 2));
  q.s[3] = ratio(D(g, 1, 3, 5), D(g, 3, 2, 4), D(g, 1, 3, 2), D(g, 3, 5, 4));
  return q;
}

inline InvariantQuadruple invariants(const std::vector<ProductVector>& vs) {
  std::vector<Vec> f, g;
  for (const auto& v : vs) {
    f.push_back(v.phi());
    g.push_back(v.psi());
  }
  return invariants(f, g);
}

inline InvariantQuadruple invariants_closed_form(cd p, cd q, cd r, cd s, int row) {
  auto div = [](cd a, cd b) {
    if (std::abs(b) < 1e-300) throw InputError("invariants_closed_form: zero denominator");
    return a / b;
  };
  const cd one = 1.0;
  InvariantQuadruple o;
  switch (row) {
    case 1: o.s = {div(-p, q), q - one, div(r - s, s), div(r, one - r)}; break;
    case 2: o.s = {div(-q, p), p - one, div(s - r, r), div(s, one - s)}; break;
    case 3: o.s = {div(-one, q), div(q - p, p), div(one - s, s), div(one, r - one)}; break;
    case 4: o.s = {-q, div(one - p, p), s - one, div(s, r - s)}; break;
    case 5: o.s = {div(-one, p), div(p - q, q), div(one - r, r), div(one, s - one)}; break;
    case 6: o.s = {-p, div(one - q, q), r - one, div(r, s - r)}; break;
    case 7: o.s = {div(p - q, q), div(one, q - one), div(-r, s), div(s - r, r - one)}; break;
    case 8: o.s = {div(q, p - q), div(one - p, q - one), div(r, s - r), -s}; break;
    case 9: o.s = {div(-(q - one), q), div(p, q - p), div(-one, s), div(one - s, r - one)}; break;
    case 10: o.s = {div(q, one - q), div(p - one, q - p), div(one, s - one), div(-s, r)}; break;
    case 11: o.s = {div(q - p, p), div(one, p - one), div(-s, r), div(r - s, s - one)}; break;
    case 12: o.s = {div(p, q - p), div(one - q, p - one), div(s, r - s), -r}; break;
    default: throw InputError("invariant table row must be in 1..12");
  }
  return o;
}

// Product vectors of the normal form with parameters (p, q, r, s).
inline std::vector<ProductVector> canonical_vectors(cd p, cd q, cd r, cd s) {
  std::vector<ProductVector> out;
  Eigen::Matrix3cd I = Eigen::Matrix3cd::Identity();
  for (int i = 0; i < 3; ++i) out.emplace_back(Vec(I.col(i)), Vec(I.col(i)));
  Vec ones = Vec::Ones(3);
  out.emplace_back(ones, ones);
  Vec f(3), g(3);
  f << 1.0, p, q;
  g << 1.0, r, s;
  out.emplace_back(f, g);
  return out;
}

struct CanonicalFive {
  cd p, q, r, s;
  Mat A, B;
  std::array<cd, 5> scales{};
  Perm5 ordering{1, 2, 3, 4, 5};
  double residual = 0.0;
};

inline json to_json(const CanonicalFive& c) {
  json sc = json::array();
  for (cd z : c.scales) sc.push_back(to_json(z));
  return json{{"p", to_json(c.p)},       {"q", to_json(c.q)},         {"r", to_json(c.r)},
              {"s", to_json(c.s)},       {"A", to_json(c.A)},         {"B", to_json(c.B)},
              {"scales", sc},            {"ordering", c.ordering},    {"residual", c.residual}};
}

namespace detail {

inline void require_independent_triples(const std::vector<ProductVector>& vs, const Tolerance& tol) {
  for (std::size_t party = 0; party < 2; ++party)
    for_each_subset(5, 3, [&](const std::vector<int>& t) {
      if (numerical_rank(stack_factor(vs, party, t), tol) < 3)
        throw InputError(std::string(party == 0 ? "phi" : "psi") + "-side triple {" + std::to_string(t[0] + 1) + "," +
                         std::to_string(t[1] + 1) + "," + std::to_string(t[2] + 1) + "} is linearly dependent");
      return true;
    });
}

// Maps v1, v2, v3 to the coordinate axes and v4 to (1,1,1); returns the image of v5.
inline Mat frame_transform(const std::vector<Vec>& v, Vec& fifth) {
  Eigen::Matrix3cd P;
  P << v[0], v[1], v[2];
  Eigen::Matrix3cd Pi = P.inverse();
  Eigen::Vector3cd c = Pi * v[3];
  Mat A = c.cwiseInverse().asDiagonal() * Pi;
  fifth = A * v[4];
  return A;
}

}  // namespace detail

inline CanonicalFive canonical_five(const std::vector<ProductVector>& input, const Perm5& ordering = {1, 2, 3, 4, 5},
                                    const Tolerance& tol = {}) {
  if (input.size() != 5) throw InputError("canonical_five needs five product vectors");
  detail::check_dims(input, {3, 3});
  std::vector<ProductVector> vs = permuted(input, ordering);
  detail::require_independent_triples(vs, tol);
  std::vector<Vec> f, g;
  for (const auto& v : vs) {
    f.push_back(v.phi());
    g.push_back(v.psi());
  }
  Vec f5, g5;
  Mat A = detail::frame_transform(f, f5);
  Mat B = detail::frame_transform(g, g5);
  CanonicalFive c;
  c.ordering = ordering;
  c.p = f5(1) / f5(0);
  c.q = f5(2) / f5(0);
  c.r = g5(1) / g5(0);
  c.s = g5(2) / g5(0);
  c.A = sl_normalize(A);
  c.B = sl_normalize(B);
  auto target = canonical_vectors(c.p, c.q, c.r, c.s);
  for (std::size_t i = 0; i < 5; ++i) {
    Vec img = kron(Vec(c.A * vs[i].phi()), Vec(c.B * vs[i].psi()));
    Vec t = target[i].full();
    cd sc = img.dot(t) / img.squaredNorm();
    c.scales[i] = sc;
    c.residual = std::max(c.residual, (sc * img - t).norm() / t.norm());
  }
  if (c.residual > tol.residual) throw NumericalError("canonical_five: round-trip residual too large");
  return c;
}

struct PentagramUPB {
  std::vector<Vec> v, w;

  std::vector<ProductVector> products() const {
    std::vector<ProductVector> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(v[i], w[i]);
    return out;
  }

  double orthogonality_residual() const {
    double r = 0.0;
    for (int i = 0; i < 5; ++i) {
      r = std::max(r, std::abs(v[std::size_t(i)].dot(v[std::size_t((i + 1) % 5)])));
      r = std::max(r, std::abs(w[std::size_t(i)].dot(w[std::size_t((i + 2) % 5)])));
    }
    return r;
  }
};

inline json to_json(const PentagramUPB& u) {
  json v = json::array(), w = json::array();
  for (const auto& x : u.v) v.push_back(to_json(x));
  for (const auto& x : u.w) w.push_back(to_json(x));
  return json{{"v", v}, {"w", w}};
}

// Columns of the pentagram normal form with parameters a, b (not normalized).
inline std::vector<Vec> pentagram_columns(double a, double b) {
  std::vector<Vec> c(5, Vec(3));
  c[0] << 1, 0, 0;
  c[1] << 0, 1, 0;
  c[2] << a, 0, b;
  c[3] << b, 1, -a;
  c[4] << 0, a, 1;
  return c;
}

// Pentagram UPB with parameters (a1, b1) on the phi side and (a2, b2) on the psi side.
inline PentagramUPB make_pentagram(double a1, double b1, double a2, double b2) {
  PentagramUPB u;
  u.v = pentagram_columns(a1, b1);
  auto cols = pentagram_columns(a2, b2);
  u.w.assign(5, Vec());
  const Perm5& tau = pentagram_psi_order();
  for (int i = 0; i < 5; ++i) u.w[std::size_t(tau[std::size_t(i)] - 1)] = cols[std::size_t(i)];
  for (auto& x : u.v) x.normalize();
  for (auto& x : u.w) x.normalize();
  return u;
}

struct PentagramForm {
  Mat transform;
  std::array<cd, 5> scales{};
  double a = 0.0, b = 0.0;
  double residual = 0.0;
  double phase_consistency = 0.0;
};

inline PentagramForm pentagram_form(const std::vector<Vec>& input, const Tolerance& tol = {}) {
  if (input.size() != 5) throw InputError("pentagram_form needs five vectors");
  for_each_subset(5, 3, [&](const std::vector<int>& t) {
    Eigen::Matrix3cd M;
    M << input[std::size_t(t[0])], input[std::size_t(t[1])], input[std::size_t(t[2])];
    if (numerical_rank(M, tol) < 3) throw InputError("pentagram_form: dependent triple");
    return true;
  });
  InvariantQuadruple iq = invariants(input, input);
  cd s1 = iq.s[0], s2 = iq.s[1];
  if (!(approx_real(s1) && approx_real(s2) && s1.real() > 0 && s2.real() > 0))
    throw InputError("not pentagram-equivalent: invariants are not real positive");

  Mat F(3, 5);
  for (int i = 0; i < 5; ++i) F.col(i) = input[std::size_t(i)];
  // Send phi1, phi2 to e1, e2.
  Eigen::Vector3cd c1 = input[0], c2 = input[1];
  Eigen::Vector3cd c3 = c1.cross(c2).conjugate();
  Eigen::Matrix3cd P;
  P << c1, c2, c3;
  Mat T = P.inverse();
  Mat G = T * F;
  // Clear phi3's second coordinate, then phi5's first coordinate.
  Mat E = Mat::Identity(3, 3);
  E(1, 2) = -G(1, 2) / G(2, 2);
  T = E * T;
  G = E * G;
  E = Mat::Identity(3, 3);
  E(0, 2) = -G(0, 4) / G(2, 4);
  T = E * T;
  G = E * G;
  G.col(0) /= G(0, 0);
  G.col(1) /= G(1, 1);
  G.col(3) /= G(1, 3);
  G.col(4) /= G(2, 4);
  // Now [[1,0,x,y,0],[0,1,0,1,z],[0,0,t,u,1]].
  cd z = G(1, 4);
  double sr = s1.real();
  double r = sr / std::norm(z);
  cd k = std::sqrt(std::sqrt(r) * std::exp(cd(0, -std::arg(z))));
  Mat D = Mat::Identity(3, 3);
  D(1, 1) = k;
  D(2, 2) = 1.0 / k;
  T = D * T;
  G = D * G;
  G.col(1) /= G(1, 1);
  G.col(3) /= G(1, 3);
  G.col(4) /= G(2, 4);
  double a = std::sqrt(sr);
  cd xp = G(0, 2), yp = G(0, 3), tp = G(2, 2);

  // Phases: M (alpha, alpha1, alpha4) = -(arg y', arg t', arg x'), rank 2.
  double ax = std::arg(xp), ay = std::arg(yp), at = std::arg(tp);
  double cons = ay + at - ax;
  double wrap = 2 * M_PI * std::round(cons / (2 * M_PI));
  ax += wrap;
  double phase_res = std::abs(ay + at - ax);
  Eigen::Matrix3d Mph;
  Mph << 1, 1, 0, -1, 0, 1, 0, 1, 1;
  Eigen::Vector3d rhs(-ay, -at, -ax);
  Eigen::Vector3d sol = Mph.completeOrthogonalDecomposition().solve(rhs);
  phase_res = std::max(phase_res, (Mph * sol - rhs).norm());
  if (phase_res > 1e-8) throw NumericalError("pentagram_form: phase system inconsistent");
  double shift = (sol(1) - 2 * sol(0)) / 3.0;  // move along the null direction (1,-1,1) to fix the determinant phase
  sol += shift * Eigen::Vector3d(1, -1, 1);
  double alpha = sol(0), alpha1 = sol(1), alpha4 = sol(2);

  double rx = std::abs(xp), ry = std::abs(yp), rt = std::abs(tp);
  double K = a * rt / (rx * ry);
  double rr = std::pow(K, -1.0 / 6.0);
  double r1 = std::sqrt(K) * rr, r23 = rr, r4 = std::sqrt(a * ry / (rx * rt)) / rr, r56 = 1.0 / rr;
  cd z1 = std::polar(r1, alpha1), z2 = std::polar(r23, -alpha), z3 = std::polar(r23, -alpha);
  cd z4 = std::polar(r4, alpha4), z5 = std::polar(r56, alpha), z6 = std::polar(r56, alpha);
  Mat Z = Mat::Zero(3, 3);
  Z(0, 0) = z1;
  Z(1, 1) = z2;
  Z(2, 2) = z3;
  T = Z * T;
  G = Z * G;
  G.col(0) /= G(0, 0);
  G.col(1) /= G(1, 1);
  G.col(2) *= z4;
  G.col(3) *= z5;
  G.col(4) *= z6;

  PentagramForm out;
  out.a = a;
  out.b = G(0, 3).real();
  out.transform = sl_normalize(T);
  out.phase_consistency = phase_res;
  auto target = pentagram_columns(out.a, out.b);
  double resid = 0.0;
  for (int i = 0; i < 5; ++i) {
    Vec img = out.transform * input[std::size_t(i)];
    const Vec& t = target[std::size_t(i)];
    cd sc = img.dot(t) / img.squaredNorm();
    out.scales[std::size_t(i)] = sc;
    resid = std::max(resid, (sc * img - t).norm() / t.norm());
  }
  out.residual = resid;
  if (!(resid <= tol.residual) || out.b <= 0) throw NumericalError("pentagram_form: residual too large");
  return out;
}

struct OrthogonalizeResult {
  bool found = false;
  int perm_index = 0;  // 1..12
  Perm5 perm{1, 2, 3, 4, 5};
  Mat A, B;
  PentagramUPB upb;
  std::array<InvariantQuadruple, 12> scan{};
  double residual = 0.0;
};

inline json to_json(const OrthogonalizeResult& r) {
  json scan = json::array();
  for (const auto& q : r.scan) scan.push_back(to_json(q));
  json j{{"orthogonalizable", r.found}, {"invariant_scan", scan}};
  if (r.found) {
    j["permutation_index"] = r.perm_index;
    j["permutation"] = r.perm;
    j["A"] = to_json(r.A);
    j["B"] = to_json(r.B);
    j["upb"] = to_json(r.upb);
    j["residual"] = r.residual;
  }
  return j;
}

inline std::array<InvariantQuadruple, 12> invariant_scan(const std::vector<ProductVector>& vs) {
  std::array<InvariantQuadruple, 12> scan{};
  for (int i = 0; i < 12; ++i) scan[std::size_t(i)] = invariants(permuted(vs, pentagon_permutations()[std::size_t(i)]));
  return scan;
}

// Search the 12 permutations for real-positive invariants and build the pentagram UPB.
// After the call, A phi'_k ~ v_k and B psi'_k ~ w_k with phi'_k = phi_{perm[k]}.
inline OrthogonalizeResult orthogonalize_upb(const std::vector<ProductVector>& vs, const Tolerance& tol = {}) {
  if (vs.size() != 5) throw InputError("orthogonalize_upb needs five product vectors");
  GupbCertificate cert = is_minimal_gupb(vs, 3, 3, tol);
  if (!cert.verdict) throw InputError("not a minimal gUPB: " + cert.reason);
  OrthogonalizeResult res;
  res.scan = invariant_scan(vs);
  for (int i = 0; i < 12; ++i) {
    if (!res.scan[std::size_t(i)].all_real_positive()) continue;
    const Perm5& sg = pentagon_permutations()[std::size_t(i)];
    auto pv = permuted(vs, sg);
    std::vector<Vec> f, g;
    for (const auto& x : pv) {
      f.push_back(x.phi());
      g.push_back(x.psi());
    }
    PentagramForm pf = pentagram_form(f, tol);
    PentagramForm pg = pentagram_form(permuted(g, pentagram_psi_order()), tol);
    res.found = true;
    res.perm_index = i + 1;
    res.perm = sg;
    res.A = pf.transform;
    res.B = pg.transform;
    res.upb = make_pentagram(pf.a, pf.b, pg.a, pg.b);
    res.residual = std::max(pf.residual, pg.residual);
    return res;
  }
  return res;
}

}  // namespace upblab
