#pragma once

#include "upblab/combinatorics.hpp"
#include "upblab/json_io.hpp"
#include "upblab/poly.hpp"
#include "upblab/rng.hpp"

#include <optional>

namespace upblab {

struct SegreSolution {
  std::vector<ProductVector> points;
  std::vector<double> residuals;
  std::vector<bool> transverse;
  std::vector<int> intersection_dims;
  std::optional<std::vector<cd>> sixth_coefficients;
  std::vector<int> charts;
  bool positive_dimensional = false;
};

inline json to_json(const SegreSolution& s) {
  json pts = json::array();
  for (const auto& p : s.points) pts.push_back(to_json(p));
  json tr = json::array();
  for (bool b : s.transverse) tr.push_back(b);
  json j{{"points", pts},
         {"residuals", s.residuals},
         {"transverse", tr},
         {"intersection_dims", s.intersection_dims},
         {"charts", s.charts},
         {"positive_dimensional", s.positive_dimensional}};
  if (s.sixth_coefficients) {
    json c = json::array();
    for (cd z : *s.sixth_coefficients) c.push_back(to_json(z));
    j["sixth_coefficients"] = c;
  } else {
    j["sixth_coefficients"] = nullptr;
  }
  return j;
}

namespace detail {

// Constraint data for product vectors phi (x) psi orthogonal to the columns of W
// (W: nm x K). Row k of M(phi) is sum_i conj(W(i*m+j, k)) phi_i.
struct PencilSystem {
  int n, m;
  Mat W;
  std::vector<Mat> Mt;  // Mt[i](k, j) = conj(W(i*m+j, k))

  PencilSystem(const Mat& w, int n_, int m_) : n(n_), m(m_), W(w) {
    for (int i = 0; i < n; ++i) {
      Mat T(W.cols(), m);
      for (Eigen::Index k = 0; k < W.cols(); ++k)
        for (int j = 0; j < m; ++j) T(k, j) = std::conj(W(i * m + j, k));
      Mt.push_back(T);
    }
  }

  Mat M(const Vec& phi) const {
    Mat out = Mat::Zero(W.cols(), m);
    for (int i = 0; i < n; ++i) out += phi(i) * Mt[std::size_t(i)];
    return out;
  }

  double residual(const Vec& phi, const Vec& psi) const {
    return (W.adjoint() * kron(Vec(phi / phi.norm()), Vec(psi / psi.norm()))).norm();
  }

  // Gauss-Newton on M(phi) psi = 0 with affine normalisations against the start point.
  bool refine(Vec& phi, Vec& psi, int iters = 40) const {
    Vec phi0 = phi / phi.norm(), psi0 = psi / psi.norm();
    phi = phi0;
    psi = psi0;
    Eigen::Index K = W.cols();
    for (int it = 0; it < iters; ++it) {
      Vec F(K + 2);
      F.head(K) = M(phi) * psi;
      F(K) = phi0.dot(phi) - 1.0;
      F(K + 1) = psi0.dot(psi) - 1.0;
      Mat J = Mat::Zero(K + 2, n + m);
      for (int i = 0; i < n; ++i) J.block(0, i, K, 1) = Mt[std::size_t(i)] * psi;
      J.block(0, n, K, m) = M(phi);
      J.block(K, 0, 1, n) = phi0.adjoint();
      J.block(K + 1, n, 1, m) = psi0.adjoint();
      Vec step = J.completeOrthogonalDecomposition().solve(F);
      phi -= step.head(n);
      psi -= step.tail(m);
      if (!std::isfinite(step.norm())) return false;
      if (step.norm() < 1e-15) break;
    }
    return residual(phi, psi) < 1e-11;
  }
};

inline void add_point(std::vector<ProductVector>& pts, const Vec& phi, const Vec& psi, double dedup) {
  ProductVector p(projective_normalize(phi), projective_normalize(psi));
  for (const auto& q : pts)
    if (ray_distance(p.full(), q.full()) < dedup) return;
  pts.push_back(p);
}

inline bool lex_less(const ProductVector& a, const ProductVector& b) {
  Vec x = a.full(), y = b.full();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double dr = x(i).real() - y(i).real();
    if (std::abs(dr) > 1e-9) return dr < 0;
    double di = x(i).imag() - y(i).imag();
    if (std::abs(di) > 1e-9) return di < 0;
  }
  return false;
}

inline double max_minor_normalised(const PencilSystem& sys, const Vec& phi) {
  Mat Mp = sys.M(phi / phi.norm());
  double mx = 0;
  for_each_subset(int(Mp.rows()), 3, [&](const std::vector<int>& rows) {
    Eigen::Matrix3cd S;
    for (int r = 0; r < 3; ++r) S.row(r) = Mp.row(rows[std::size_t(r)]);
    mx = std::max(mx, std::abs(S.determinant()));
    return true;
  });
  return mx;
}

// Product vectors orthogonal to the columns of W in C^3 (x) C^3, in the given coordinates.
inline SegreSolution solve_segre_3x3_frame(const Mat& W, const Tolerance& tol) {
  PencilSystem sys(W, 3, 3);
  SegreSolution sol;
  Eigen::Index K = W.cols();
  std::vector<std::vector<int>> row_sets;
  for_each_subset(int(K), 3, [&](const std::vector<int>& s) {
    row_sets.push_back(s);
    return true;
  });
  const int chart_order[3] = {2, 0, 1};
  std::vector<Vec> cand_phi;
  bool any_regular = false;
  for (int chart : chart_order) {
    int ua = chart == 0 ? 1 : 0;
    int vb = chart == 2 ? 1 : 2;
    std::vector<BiPoly3> minors;
    for (const auto& rows : row_sets) {
      BiPoly3 e[3][3];
      for (int r = 0; r < 3; ++r)
        for (int j = 0; j < 3; ++j) {
          Eigen::Index k = rows[std::size_t(r)];
          e[r][j] = BiPoly3::linear(sys.Mt[std::size_t(chart)](k, j), sys.Mt[std::size_t(ua)](k, j),
                                    sys.Mt[std::size_t(vb)](k, j));
        }
      minors.push_back(e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1]) -
                       e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0]) +
                       e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0]));
    }
    // First pair of minors with a non-vanishing resultant.
    bool used_chart = false;
    for (std::size_t a = 0; a < minors.size() && !used_chart; ++a)
      for (std::size_t b = a + 1; b < minors.size() && !used_chart; ++b) {
        const BiPoly3& f = minors[a];
        const BiPoly3& g = minors[b];
        double scale = std::pow(f.max_abs(), 3) * std::pow(g.max_abs(), 3);
        if (scale == 0) continue;
        auto coeffs = interpolate_on_circle([&](cd v) { return resultant_u(f, g, v); }, 16);
        double mx = 0;
        for (int i = 0; i <= 9; ++i) mx = std::max(mx, std::abs(coeffs[std::size_t(i)]));
        if (mx < 1e-11 * scale) continue;
        coeffs.resize(10);
        used_chart = true;
        any_regular = true;
        for (cd v : poly_roots(coeffs)) {
          std::vector<cd> fu(4);
          for (int i = 0; i < 4; ++i) fu[std::size_t(i)] = f.coeff_u(i, v);
          for (cd u : poly_roots(fu)) {
            Vec phi(3);
            phi(chart) = 1.0;
            phi(ua) = u;
            phi(vb) = v;
            if (std::isfinite(phi.norm())) cand_phi.push_back(phi);
          }
        }
      }
    if (used_chart) sol.charts.push_back(chart);
  }
  if (!any_regular) {
    // Every pair of minors shares a component: slice the phi-plane with a fixed generic line.
    sol.positive_dimensional = true;
    Philox rng(0x5E62E);
    for (int line = 0; line < 3; ++line) {
      Vec e0 = rng.complex_vector(3), e1 = rng.complex_vector(3);
      std::vector<cd> weights;
      for (std::size_t i = 0; i < row_sets.size(); ++i) weights.push_back(rng.complex_normal());
      auto combo = [&](cd t) {
        Mat Mp = sys.M(e0 + t * e1);
        cd acc = 0;
        for (std::size_t i = 0; i < row_sets.size(); ++i) {
          Eigen::Matrix3cd S;
          for (int r = 0; r < 3; ++r) S.row(r) = Mp.row(row_sets[i][std::size_t(r)]);
          acc += weights[i] * S.determinant();
        }
        return acc;
      };
      auto c = interpolate_on_circle(combo, 8);
      c.resize(4);
      for (cd t : poly_roots(c)) cand_phi.push_back(e0 + t * e1);
    }
  }
  double prefilter = 1e-6;
  for (const Vec& phi0 : cand_phi) {
    if (max_minor_normalised(sys, phi0) > prefilter) continue;
    Vec phi = phi0;
    Vec psi = smallest_right_singular(sys.M(phi / phi.norm()));
    if (!sys.refine(phi, psi)) continue;
    add_point(sol.points, phi, psi, tol.dedup);
  }
  return sol;
}

// Solves in a fixed generic unitary frame on the phi side, so that structured inputs with
// points at chart infinity or dropped u-degree behave like generic ones.
inline SegreSolution solve_segre_3x3(const Mat& W, const Tolerance& tol) {
  Philox rng(0x5E62F);
  Eigen::HouseholderQR<Mat> qr(rng.complex_matrix(3, 3));
  Mat U = qr.householderQ() * Mat::Identity(3, 3);
  Mat Wr = kron_matrix(U.adjoint(), Mat::Identity(3, 3)) * W;
  SegreSolution framed = solve_segre_3x3_frame(Wr, tol);
  PencilSystem sys(W, 3, 3);
  SegreSolution sol;
  sol.charts = framed.charts;
  sol.positive_dimensional = framed.positive_dimensional;
  for (const auto& p : framed.points) {
    Vec phi = U * p.phi(), psi = p.psi();
    if (!sys.refine(phi, psi)) continue;
    add_point(sol.points, phi, psi, tol.dedup);
  }
  std::sort(sol.points.begin(), sol.points.end(), lex_less);
  for (const auto& p : sol.points) sol.residuals.push_back(sys.residual(p.phi(), p.psi()));
  return sol;
}

}  // namespace detail

inline std::pair<bool, int> transversality(const Mat& basis, const ProductVector& pt, const Tolerance& tol = {}) {
  Mat onb = range_basis(basis, tol);
  if (subspace_distance(onb, pt.full()) > tol.residual) throw InputError("transversality: point not in subspace");
  int n = int(pt.phi().size()), m = int(pt.psi().size());
  Mat T(n * m, n + m);
  Mat In = Mat::Identity(n, n), Im = Mat::Identity(m, m);
  Vec phi = pt.phi() / pt.phi().norm(), psi = pt.psi() / pt.psi().norm();
  for (int j = 0; j < m; ++j) T.col(j) = kron(phi, Vec(Im.col(j)));
  for (int i = 0; i < n; ++i) T.col(m + i) = kron(Vec(In.col(i)), psi);
  Mat both(n * m, onb.cols() + T.cols());
  both << onb, T;
  int dim = int(onb.cols()) + numerical_rank(T, tol) - numerical_rank(both, tol);
  return {dim == 1, dim};
}

// Coefficients expressing target in the span of the given product vectors (as full vectors).
inline std::vector<cd> span_coefficients(const std::vector<ProductVector>& basis, const ProductVector& target,
                                         double* residual = nullptr) {
  Mat B = stack_full(basis);
  Vec t = target.full();
  Vec c = B.colPivHouseholderQr().solve(t);
  if (residual) *residual = (B * c - t).norm() / t.norm();
  return std::vector<cd>(c.data(), c.data() + c.size());
}

namespace detail {

inline SegreSolution products_in_subspace_3x3(const Mat& basis, int expected_rank, const Tolerance& tol) {
  if (basis.rows() != 9) throw InputError("subspace must live in C^3 (x) C^3");
  int rk = numerical_rank(basis, tol);
  if (rk != expected_rank)
    throw InputError("subspace basis has rank " + std::to_string(rk) + ", expected " + std::to_string(expected_rank));
  Mat W = complement_basis(basis, tol);
  SegreSolution sol = solve_segre_3x3(W, tol);
  for (const auto& p : sol.points) {
    auto [tr, dim] = transversality(basis, p, tol);
    sol.transverse.push_back(tr);
    sol.intersection_dims.push_back(dim);
  }
  return sol;
}

}  // namespace detail

inline SegreSolution products_in_kernel(const Mat& basis, const Tolerance& tol = {}) {
  SegreSolution sol = detail::products_in_subspace_3x3(basis, 5, tol);
  if (sol.points.size() == 6) {
    std::vector<ProductVector> first(sol.points.begin(), sol.points.begin() + 5);
    sol.sixth_coefficients = span_coefficients(first, sol.points[5]);
  }
  return sol;
}

inline SegreSolution products_in_range(const Mat& basis, const Tolerance& tol = {}) {
  return detail::products_in_subspace_3x3(basis, 4, tol);
}

// ---- 2 x n ----

struct CurveCertificate {
  Mat coefficients;  // 2n x (n+1): product(alpha) = C (1, alpha, ..., alpha^n)
  int rank = 0;
  bool spans_subspace = false;
  double fit_residual = 0.0;
};

struct ProductSearch2xn {
  bool is_curve = false;
  SegreSolution finite;
  std::vector<cd> sample_parameters;
  std::vector<ProductVector> samples;
  std::vector<double> sample_residuals;
  std::optional<CurveCertificate> certificate;
};

inline json to_json(const ProductSearch2xn& s) {
  json j{{"is_curve", s.is_curve}};
  if (s.is_curve) {
    json pts = json::array(), pars = json::array();
    for (const auto& p : s.samples) pts.push_back(to_json(p));
    for (cd a : s.sample_parameters) pars.push_back(to_json(a));
    j["samples"] = pts;
    j["parameters"] = pars;
    j["residuals"] = s.sample_residuals;
    if (s.certificate)
      j["certificate"] = json{{"coefficients", to_json(s.certificate->coefficients)},
                              {"rank", s.certificate->rank},
                              {"spans_subspace", s.certificate->spans_subspace},
                              {"fit_residual", s.certificate->fit_residual}};
  } else {
    j["finite"] = to_json(s.finite);
  }
  return j;
}

inline ProductSearch2xn products_in_subspace_2xn(const Mat& basis, int n, const Tolerance& tol = {}) {
  if (n < 1 || n > 6) throw InputError("2xn search supports 1 <= n <= 6");
  if (basis.rows() != 2 * n) throw InputError("subspace basis has the wrong ambient dimension");
  int d = numerical_rank(basis, tol);
  if (d < 1 || d > 2 * n) throw InputError("subspace dimension out of range");
  Mat onb = range_basis(basis, tol);
  Mat W = complement_basis(basis, tol);
  int k = int(W.cols());
  detail::PencilSystem sys(W, 2, n);
  ProductSearch2xn out;
  auto L = [&](cd alpha) {
    Vec phi(2);
    phi << 1.0, alpha;
    return sys.M(phi);
  };
  auto product_at = [&](cd alpha) {
    Vec phi(2);
    phi << 1.0, alpha;
    Vec psi;
    if (k == 0) {
      psi = Vec::Zero(n);
      psi(0) = 1.0;
    } else {
      psi = smallest_right_singular(L(alpha));
    }
    return ProductVector(phi, psi);
  };
  std::vector<cd> coeffs;
  bool curve = k < n;
  if (!curve) {
    // Finite case: roots of det(R L(alpha)) with a fixed generic R, filtered by rank of L(alpha).
    Philox rng(0x2A7E);
    Mat R = rng.complex_matrix(n, k);
    double scale = std::pow(R.norm() * (sys.Mt[0].norm() + sys.Mt[1].norm()), n);
    coeffs = interpolate_on_circle([&](cd a) { return (R * L(a)).determinant(); }, 2 * n + 4);
    coeffs.resize(std::size_t(n + 1));
    double mx = 0;
    for (cd c : coeffs) mx = std::max(mx, std::abs(c));
    curve = mx < 1e-11 * scale;  // rank deficient for every alpha
  }
  if (curve) {
    out.is_curve = true;
    for (int t = 0; t <= 2 * n; ++t) {
      cd alpha = std::polar(1.0 + 0.25 * t, 2 * M_PI * t / (2 * n + 1));
      ProductVector p = product_at(alpha);
      p = ProductVector(p.phi(), projective_normalize(p.psi()));
      out.sample_parameters.push_back(alpha);
      out.samples.push_back(p);
      out.sample_residuals.push_back(k == 0 ? 0.0 : sys.residual(p.phi(), p.psi()));
    }
    if (k == n - 1) {
      // psi(alpha) via signed maximal minors of the (n-1) x n pencil: degree n-1 in alpha.
      auto cofactor = [&](cd alpha) {
        Mat Lm = L(alpha);
        Vec psi(n);
        for (int j = 0; j < n; ++j) {
          Mat sub(n - 1, n - 1);
          for (int c = 0, cc = 0; c < n; ++c)
            if (c != j) sub.col(cc++) = Lm.col(c);
          psi(j) = (j % 2 ? -1.0 : 1.0) * (n == 1 ? cd(1.0) : sub.determinant());
        }
        return psi;
      };
      int N = 2 * n + 2;
      Mat C = Mat::Zero(2 * n, n + 1);
      for (int comp = 0; comp < 2 * n; ++comp) {
        auto coeffs = interpolate_on_circle(
            [&](cd a) {
              Vec phi(2);
              phi << 1.0, a;
              return kron(phi, cofactor(a))(comp);
            },
            N);
        for (int e = 0; e <= n; ++e) C(comp, e) = coeffs[std::size_t(e)];
      }
      CurveCertificate cert;
      cert.coefficients = C;
      cert.rank = numerical_rank(C, tol);
      Mat both(2 * n, onb.cols() + C.cols());
      both << onb, C;
      cert.spans_subspace = cert.rank == int(onb.cols()) && numerical_rank(both, tol) == int(onb.cols());
      double fr = 0;
      for (std::size_t t = 0; t < out.samples.size(); ++t) {
        cd a = out.sample_parameters[t];
        Vec mono(n + 1);
        for (int e = 0; e <= n; ++e) mono(e) = std::pow(a, e);
        fr = std::max(fr, ray_distance(C * mono, out.samples[t].full()));
      }
      cert.fit_residual = fr;
      out.certificate = cert;
    }
    return out;
  }
  std::vector<Vec> phis;
  for (cd a : poly_roots(coeffs)) {
    Vec phi(2);
    phi << 1.0, a;
    phis.push_back(phi);
  }
  Vec inf(2);
  inf << 0.0, 1.0;
  phis.push_back(inf);
  SegreSolution& sol = out.finite;
  for (Vec phi : phis) {
    Mat Mp = sys.M(phi / phi.norm());
    RVec sv = singular_values(Mp);
    if (sv(sv.size() - 1) > 1e-6 * std::max(1.0, sv(0))) continue;
    Vec psi = smallest_right_singular(Mp);
    if (!sys.refine(phi, psi)) continue;
    detail::add_point(sol.points, phi, psi, tol.dedup);
  }
  std::sort(sol.points.begin(), sol.points.end(), detail::lex_less);
  for (const auto& p : sol.points) sol.residuals.push_back(sys.residual(p.phi(), p.psi()));
  return out;
}

}  // namespace upblab
