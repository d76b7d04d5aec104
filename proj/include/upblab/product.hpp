#pragma once

#include "upblab/linalg.hpp"

namespace upblab {

struct ProductVector {
  std::vector<Vec> factors;

  ProductVector() = default;
  explicit ProductVector(std::vector<Vec> f) : factors(std::move(f)) {}
  ProductVector(const Vec& phi, const Vec& psi) : factors{phi, psi} {}

  const Vec& phi() const { return factors.at(0); }
  const Vec& psi() const { return factors.at(1); }
  std::size_t parties() const { return factors.size(); }

  Vec full() const {
    Vec v = factors.at(0);
    for (std::size_t k = 1; k < factors.size(); ++k) v = kron(v, factors[k]);
    return v;
  }

  ProductVector normalized() const {
    ProductVector out(*this);
    for (auto& f : out.factors) f /= f.norm();
    return out;
  }
};

inline bool projectively_equal(const ProductVector& a, const ProductVector& b, double tol = 1e-6) {
  if (a.parties() != b.parties()) return false;
  for (std::size_t k = 0; k < a.parties(); ++k) {
    if (a.factors[k].size() != b.factors[k].size()) return false;
    if (ray_distance(a.factors[k], b.factors[k]) > tol) return false;
  }
  return true;
}

// Apply (A (x) B) to a bipartite product vector.
inline ProductVector apply_local(const Mat& A, const Mat& B, const ProductVector& v) {
  return ProductVector(A * v.phi(), B * v.psi());
}

inline Mat stack_full(const std::vector<ProductVector>& vs) {
  if (vs.empty()) return Mat();
  Mat M(vs.front().full().size(), Eigen::Index(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i) M.col(Eigen::Index(i)) = vs[i].full();
  return M;
}

inline Mat stack_factor(const std::vector<ProductVector>& vs, std::size_t party, const std::vector<int>& idx) {
  Mat M(vs.at(0).factors.at(party).size(), Eigen::Index(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) M.col(Eigen::Index(c)) = vs.at(std::size_t(idx[c])).factors.at(party);
  return M;
}

}  // namespace upblab
