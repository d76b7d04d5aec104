#pragma once

#include "upblab/rng.hpp"
#include "upblab/states.hpp"

namespace upblab {

// Random unit-determinant 3x3 matrix with condition number at most cap.
inline Mat random_sl(Philox& rng, double cap = 20.0, int n = 3) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Mat A = sl_normalize(rng.complex_matrix(n, n));
    if (condition_number(A) <= cap) return A;
  }
  throw NumericalError("random_sl: could not meet the condition-number cap");
}

inline PentagramUPB random_pentagram(Philox& rng, double lo = 0.3, double hi = 3.0) {
  double a1 = rng.uniform(lo, hi), b1 = rng.uniform(lo, hi);
  double a2 = rng.uniform(lo, hi), b2 = rng.uniform(lo, hi);
  return make_pentagram(a1, b1, a2, b2);
}

struct ConjugatedState {
  PentagramUPB upb;
  Mat A, B;
  PPTState state;
  std::vector<ProductVector> kernel_upb;  // (A^-1 (x) B^-1) applied to the UPB vectors
};

// (A (x) B)^dagger P (A (x) B), trace normalised, with P the pentagram complement projector.
inline ConjugatedState random_entangled_state(Philox& rng, double cap = 20.0, const Tolerance& tol = {}) {
  ConjugatedState cs;
  cs.upb = random_pentagram(rng);
  cs.A = random_sl(rng, cap);
  cs.B = random_sl(rng, cap);
  PPTState P = oupb_projector(cs.upb, tol);
  cs.state = make_state(local_conjugate(P.rho, cs.A, cs.B), 3, 3, tol);
  Mat Ai = cs.A.inverse(), Bi = cs.B.inverse();
  for (const auto& pv : cs.upb.products()) cs.kernel_upb.push_back(apply_local(Ai, Bi, pv));
  return cs;
}

inline ProductVector random_product(Philox& rng, const std::vector<int>& dims) {
  ProductVector p;
  for (int d : dims) p.factors.push_back(rng.complex_vector(d));
  return p;
}

inline std::vector<ProductVector> random_products(Philox& rng, int count, const std::vector<int>& dims) {
  std::vector<ProductVector> out;
  for (int i = 0; i < count; ++i) out.push_back(random_product(rng, dims));
  return out;
}

inline Mat mixture(const std::vector<ProductVector>& ps) {
  Mat rho = Mat::Zero(ps.front().full().size(), ps.front().full().size());
  for (const auto& p : ps) rho += proj(p.full());
  return rho / double(ps.size());
}

// Random PPT state on 2 x n: either a separable mixture of a few product projectors, or a
// random mixed state pushed towards the maximally mixed state until both it and its partial
// transpose are positive semidefinite.
inline PPTState random_ppt_2xn(Philox& rng, int n, const Tolerance& tol = {}) {
  int d = 2 * n;
  if (rng.below(2) == 0) {
    int k = 1 + int(rng.below(std::uint64_t(d)));
    return make_state(mixture(random_products(rng, k, {2, n})), 2, n, tol);
  }
  int k = 1 + int(rng.below(std::uint64_t(d)));
  Mat G = rng.complex_matrix(d, k);
  Mat W = G * G.adjoint();
  W /= W.trace().real();
  Mat I = Mat::Identity(d, d) / double(d);
  double lo = 0.0, hi = 1.0;
  auto ok = [&](double t) {
    Mat M = (1 - t) * W + t * I;
    return hermitian_eigen(partial_transpose(M, 2, n, 1), tol).values(0) >= 0.0;
  };
  if (ok(0.0)) return make_state(W, 2, n, tol);
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return make_state((1 - hi) * W + hi * I, 2, n, tol);
}

}  // namespace upblab
