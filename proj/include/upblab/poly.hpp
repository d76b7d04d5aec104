#pragma once

#include "upblab/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <functional>

namespace upblab {

// Coefficients (lowest degree first) of a polynomial of degree < N from its
// values at the N-th roots of unity scaled by radius.
inline std::vector<cd> interpolate_on_circle(const std::function<cd(cd)>& f, int N, double radius = 1.0) {
  std::vector<cd> vals(static_cast<std::size_t>(N)), out(static_cast<std::size_t>(N));
  for (int j = 0; j < N; ++j) vals[std::size_t(j)] = f(std::polar(radius, 2 * M_PI * j / N));
  for (int k = 0; k < N; ++k) {
    cd acc = 0;
    for (int j = 0; j < N; ++j) acc += vals[std::size_t(j)] * std::polar(1.0, -2 * M_PI * double(j) * k / N);
    out[std::size_t(k)] = acc / double(N) / std::pow(radius, k);
  }
  return out;
}

inline cd poly_eval(const std::vector<cd>& c, cd x) {
  cd acc = 0;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
  return acc;
}

// Roots via the companion matrix. Coefficients below rel * max are treated as zero
// at the top end, which lowers the degree (roots at infinity are dropped).
inline std::vector<cd> poly_roots(std::vector<cd> c, double rel = 1e-12) {
  double mx = 0;
  for (cd z : c) mx = std::max(mx, std::abs(z));
  if (mx == 0) return {};
  while (!c.empty() && std::abs(c.back()) <= rel * mx) c.pop_back();
  int d = int(c.size()) - 1;
  if (d < 1) return {};
  Mat C = Mat::Zero(d, d);
  for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) C(i, d - 1) = -c[std::size_t(i)] / c.back();
  Eigen::ComplexEigenSolver<Mat> es(C, false);
  if (es.info() != Eigen::Success) throw NumericalError("companion eigenvalues did not converge");
  std::vector<cd> roots;
  for (int i = 0; i < d; ++i) roots.push_back(es.eigenvalues()(i));
  return roots;
}

// Dense bivariate polynomial sum c[i][j] u^i v^j with total degree <= 3.
struct BiPoly3 {
  std::array<std::array<cd, 4>, 4> c{};

  static BiPoly3 linear(cd c0, cd cu, cd cv) {
    BiPoly3 p;
    p.c[0][0] = c0;
    p.c[1][0] = cu;
    p.c[0][1] = cv;
    return p;
  }

  BiPoly3 operator+(const BiPoly3& o) const {
    BiPoly3 r;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) r.c[i][j] = c[i][j] + o.c[i][j];
    return r;
  }
  BiPoly3 operator-(const BiPoly3& o) const {
    BiPoly3 r;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) r.c[i][j] = c[i][j] - o.c[i][j];
    return r;
  }
  // Product; terms above total degree 3 are not representable and must not occur.
  BiPoly3 operator*(const BiPoly3& o) const {
    BiPoly3 r;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; i + j < 4; ++j) {
        if (c[i][j] == cd(0)) continue;
        for (int k = 0; i + k < 4; ++k)
          for (int l = 0; i + j + k + l < 4 && j + l < 4; ++l) r.c[i + k][j + l] += c[i][j] * o.c[k][l];
      }
    return r;
  }

  // Coefficient of u^i as a polynomial in v.
  cd coeff_u(int i, cd v) const {
    cd acc = 0;
    for (int j = 3; j >= 0; --j) acc = acc * v + c[i][j];
    return acc;
  }

  cd operator()(cd u, cd v) const {
    cd acc = 0;
    for (int i = 3; i >= 0; --i) acc = acc * u + coeff_u(i, v);
    return acc;
  }

  double max_abs() const {
    double m = 0;
    for (const auto& row : c)
      for (cd z : row) m = std::max(m, std::abs(z));
    return m;
  }
};

// Resultant in u of two cubics, as a function of v (degree <= 9).
inline cd resultant_u(const BiPoly3& f, const BiPoly3& g, cd v) {
  Eigen::Matrix<cd, 6, 6> S = Eigen::Matrix<cd, 6, 6>::Zero();
  for (int r = 0; r < 3; ++r)
    for (int i = 0; i <= 3; ++i) {
      S(r, r + i) = f.coeff_u(3 - i, v);
      S(r + 3, r + i) = g.coeff_u(3 - i, v);
    }
  return S.determinant();
}

}  // namespace upblab
