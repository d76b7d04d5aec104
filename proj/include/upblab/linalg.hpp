#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace upblab {

using cd = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

// Bad input: wrong sizes, violated preconditions. Maps to exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-convergence or a residual check that should not fail. Exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Tolerance {
  double rank_rel = 1e-9;
  double psd_rel = 1e-10;
  double residual = 1e-8;
  double dedup = 1e-6;

  void validate() const {
    if (!(rank_rel > 0 && psd_rel > 0 && residual > 0 && dedup > 0))
      throw InputError("tolerances must be strictly positive");
  }
};

inline Vec kron(const Vec& v, const Vec& w) {
  Vec out(v.size() * w.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    for (Eigen::Index j = 0; j < w.size(); ++j) out(i * w.size() + j) = v(i) * w(j);
  return out;
}

inline Mat kron_matrix(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Mat proj(const Vec& v) {
  Vec u = v / v.norm();
  return u * u.adjoint();
}

// Transpose in factor 1 or 2 of C^n (x) C^m, index convention i*m + j.
inline Mat partial_transpose(const Mat& M, int n, int m, int subsystem) {
  if (M.rows() != n * m || M.cols() != n * m)
    throw InputError("partial_transpose: dimension mismatch");
  if (subsystem != 1 && subsystem != 2) throw InputError("partial_transpose: subsystem must be 1 or 2");
  Mat out(n * m, n * m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < m; ++l) {
          cd v = M(i * m + j, k * m + l);
          if (subsystem == 1)
            out(k * m + j, i * m + l) = v;
          else
            out(i * m + l, k * m + j) = v;
        }
  return out;
}

inline bool is_hermitian(const Mat& M, double rel = 1e-12) {
  if (M.rows() != M.cols()) return false;
  double n = M.norm();
  return (M - M.adjoint()).norm() <= rel * std::max(n, 1e-300);
}

struct EigenResult {
  RVec values;  // ascending
  Mat vectors;
};

inline EigenResult hermitian_eigen(const Mat& M, const Tolerance& tol = {}) {
  if (!is_hermitian(M, 1e-10)) throw InputError("hermitian_eigen: matrix is not Hermitian");
  Mat H = 0.5 * (M + M.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  if (es.info() != Eigen::Success) throw NumericalError("hermitian_eigen: no convergence");
  EigenResult r{es.eigenvalues(), es.eigenvectors()};
  double scale = std::max(1.0, H.norm());
  double res = (H * r.vectors - r.vectors * r.values.cast<cd>().asDiagonal()).norm();
  if (res > tol.residual * scale) throw NumericalError("hermitian_eigen: residual too large");
  return r;
}

inline RVec singular_values(const Mat& M) {
  if (M.size() == 0) return RVec();
  Eigen::JacobiSVD<Mat> svd(M);
  return svd.singularValues();
}

inline int numerical_rank(const Mat& M, const Tolerance& tol = {}) {
  if (M.size() == 0) return 0;
  RVec sv = singular_values(M);
  double smax = sv.size() ? sv(0) : 0.0;
  if (smax == 0.0) return 0;
  double thr = tol.rank_rel * smax * double(std::max(M.rows(), M.cols()));
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thr) ++r;
  return r;
}

// Orthonormal basis of the column space, using the numerical rank.
inline Mat range_basis(const Mat& M, const Tolerance& tol = {}) {
  int r = numerical_rank(M, tol);
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU);
  return svd.matrixU().leftCols(r);
}

// Orthonormal basis of the orthogonal complement of the column space.
inline Mat complement_basis(const Mat& M, const Tolerance& tol = {}) {
  int r = numerical_rank(M, tol);
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU);
  return svd.matrixU().rightCols(M.rows() - r);
}

// Orthonormal basis of the right null space.
inline Mat null_basis(const Mat& M, const Tolerance& tol = {}) {
  int r = numerical_rank(M, tol);
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(M.cols() - r);
}

// Right singular vector of the smallest singular value.
inline Vec smallest_right_singular(const Mat& M) {
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
  return svd.matrixV().col(M.cols() - 1);
}

inline double subspace_distance(const Mat& onb, const Vec& v) {
  Vec u = v / v.norm();
  return (u - onb * (onb.adjoint() * u)).norm();
}

inline Mat sl_normalize(const Mat& A) {
  if (A.rows() != A.cols()) throw InputError("sl_normalize: matrix not square");
  cd d = A.determinant();
  if (std::abs(d) < 1e-300 || !std::isfinite(std::abs(d))) throw InputError("sl_normalize: singular matrix");
  cd c = std::pow(d, -1.0 / double(A.rows()));
  return c * A;
}

inline Mat pseudo_inverse(const Mat& M, const Tolerance& tol = {}) {
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  int r = numerical_rank(M, tol);
  RVec sv = svd.singularValues();
  Mat S = Mat::Zero(M.cols(), M.rows());
  for (int i = 0; i < r; ++i) S(i, i) = 1.0 / sv(i);
  return svd.matrixV() * S * svd.matrixU().adjoint();
}

inline double condition_number(const Mat& M) {
  RVec sv = singular_values(M);
  return sv(0) / sv(sv.size() - 1);
}

// Fubini-Study style distance between rays: sqrt(1 - |<u,v>|^2) for unit vectors,
// evaluated as the norm of the rejection of v from u to keep full precision near zero.
inline double ray_distance(const Vec& a, const Vec& b) {
  Vec u = a / a.norm(), v = b / b.norm();
  return (v - u.dot(v) * u).norm();
}

// Scale so the first coordinate with modulus above 0.1 of the maximum becomes 1.
inline Vec projective_normalize(const Vec& v) {
  double mx = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > 0.1 * mx) return v / v(i);
  return v;
}

inline bool approx_real(cd z, double tol = 1e-8) { return std::abs(z.imag()) <= tol * (1.0 + std::abs(z.real())); }

}  // namespace upblab
