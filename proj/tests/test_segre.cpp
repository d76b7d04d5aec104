#include "upblab/harness.hpp"
#include "upblab/segre.hpp"

#include <gtest/gtest.h>

using namespace upblab;

namespace {

Vec e(int n, int i) {
  Vec v = Vec::Zero(n);
  v(i) = 1.0;
  return v;
}

Mat basis_of(const std::vector<ProductVector>& vs) { return stack_full(vs); }

bool contains(const std::vector<ProductVector>& pts, const ProductVector& p, double tol = 1e-7) {
  for (const auto& q : pts)
    if (projectively_equal(p, q, tol)) return true;
  return false;
}

// Independent oracle for 3x3: minimise |P_W (phi (x) psi)|^2 over unit factors from many
// starting points with alternating least squares, returning the distinct zeros found.
std::vector<ProductVector> als_oracle(const Mat& subspace, Philox& rng, int starts) {
  Mat W = complement_basis(subspace);
  std::vector<ProductVector> found;
  for (int s = 0; s < starts; ++s) {
    Vec phi = rng.complex_vector(3), psi = rng.complex_vector(3);
    for (int it = 0; it < 400; ++it) {
      // Fix psi: residual W^dagger (phi (x) psi) is linear in phi.
      Mat Mphi(W.cols(), 3), Mpsi(W.cols(), 3);
      for (int i = 0; i < 3; ++i) Mphi.col(i) = W.adjoint() * kron(e(3, i), psi);
      phi = smallest_right_singular(Mphi);
      for (int j = 0; j < 3; ++j) Mpsi.col(j) = W.adjoint() * kron(phi, e(3, j));
      psi = smallest_right_singular(Mpsi);
    }
    Vec x = kron(phi, psi);
    if ((W.adjoint() * x).norm() > 1e-9) continue;
    ProductVector p(projective_normalize(phi), projective_normalize(psi));
    if (!contains(found, p, 1e-6)) found.push_back(p);
  }
  return found;
}

void expect_valid(const SegreSolution& sol, const Mat& subspace) {
  Mat onb = range_basis(subspace);
  for (std::size_t i = 0; i < sol.points.size(); ++i) {
    EXPECT_LT(subspace_distance(onb, sol.points[i].full()), 1e-8);
    EXPECT_LT(sol.residuals[i], 1e-8);
    for (std::size_t j = 0; j < i; ++j) EXPECT_FALSE(projectively_equal(sol.points[i], sol.points[j]));
  }
}

}  // namespace

TEST(Poly, RootsOfKnownCubic) {
  // (x - 1)(x - 2)(x + 3) = x^3 - 7x + 6
  auto roots = poly_roots({6, -7, 0, 1});
  ASSERT_EQ(roots.size(), 3u);
  for (cd want : {cd(1), cd(2), cd(-3)}) {
    double best = 1e9;
    for (cd r : roots) best = std::min(best, std::abs(r - want));
    EXPECT_LT(best, 1e-12);
  }
}

TEST(Poly, InterpolationRecoversCoefficients) {
  std::vector<cd> c = {cd(1, 2), cd(-3), cd(0, 0.5), cd(4, -1)};
  auto got = interpolate_on_circle([&](cd x) { return poly_eval(c, x); }, 8);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_LT(std::abs(got[i] - c[i]), 1e-12);
  for (std::size_t i = c.size(); i < got.size(); ++i) EXPECT_LT(std::abs(got[i]), 1e-12);
}

TEST(KernelProducts, PentagramProjector) {
  auto u = make_pentagram(1, 1, 1, 1);
  PPTState st = oupb_projector(u);
  auto sol = products_in_kernel(st.kernel);
  ASSERT_EQ(sol.points.size(), 6u);
  expect_valid(sol, st.kernel);
  for (const auto& p : u.products()) EXPECT_TRUE(contains(sol.points, p));
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_TRUE(sol.transverse[i]);
    EXPECT_EQ(sol.intersection_dims[i], 1);
  }
}

TEST(KernelProducts, DiagonalPlusGenericCompletion) {
  Philox rng(41);
  for (int t = 0; t < 10; ++t) {
    Mat B(9, 5);
    for (int i = 0; i < 3; ++i) B.col(i) = kron(e(3, i), e(3, i));
    B.col(3) = rng.complex_vector(9);
    B.col(4) = rng.complex_vector(9);
    auto sol = products_in_kernel(B);
    EXPECT_EQ(sol.points.size(), 6u);
    expect_valid(sol, B);
    for (int i = 0; i < 3; ++i) EXPECT_TRUE(contains(sol.points, ProductVector(e(3, i), e(3, i))));
    Philox orng = rng.split(std::uint64_t(t));
    auto oracle = als_oracle(B, orng, 60);
    for (const auto& p : oracle) EXPECT_TRUE(contains(sol.points, p, 1e-6));
  }
}

TEST(KernelProducts, CanonicalFiveSixthCoefficients) {
  auto vs = canonical_vectors(-1, 2, 0.5, 0.25);
  auto sol = products_in_kernel(basis_of(vs));
  ASSERT_EQ(sol.points.size(), 6u);
  ASSERT_TRUE(sol.sixth_coefficients.has_value());
  for (cd c : *sol.sixth_coefficients) EXPECT_GT(std::abs(c), 1e-6);
  std::vector<ProductVector> five(sol.points.begin(), sol.points.begin() + 5);
  double res = 1.0;
  span_coefficients(five, sol.points[5], &res);
  EXPECT_LT(res, 1e-8);
}

TEST(KernelProducts, WrongDimensionIsAnError) {
  Philox rng(42);
  EXPECT_THROW(products_in_kernel(rng.complex_matrix(9, 4)), InputError);
  EXPECT_THROW(products_in_kernel(rng.complex_matrix(8, 5)), InputError);
}

TEST(KernelProducts, BezoutCountOnConjugatedStates) {
  Philox rng(43);
  for (int t = 0; t < 30; ++t) {
    auto cs = random_entangled_state(rng);
    auto sol = products_in_kernel(cs.state.kernel);
    ASSERT_EQ(sol.points.size(), 6u) << "trial " << t;
    expect_valid(sol, cs.state.kernel);
    for (std::size_t i = 0; i < 6; ++i) EXPECT_TRUE(sol.transverse[i]);
    for (const auto& p : cs.kernel_upb) EXPECT_TRUE(contains(sol.points, p, 1e-6));
  }
}

TEST(KernelProducts, Equivariance) {
  Philox rng(44);
  for (int t = 0; t < 50; ++t) {
    Mat K = rng.complex_matrix(9, 5);
    Mat A = rng.complex_matrix(3, 3), B = rng.complex_matrix(3, 3);
    auto s1 = products_in_kernel(K);
    auto s2 = products_in_kernel(kron_matrix(A, B) * K);
    ASSERT_EQ(s1.points.size(), s2.points.size());
    for (const auto& p : s1.points) EXPECT_TRUE(contains(s2.points, apply_local(A, B, p), 1e-6));
  }
}

TEST(KernelProducts, PartialConjugateInKernelOfPartialTranspose) {
  Philox rng(45);
  for (int t = 0; t < 20; ++t) {
    auto cs = random_entangled_state(rng);
    Mat T1 = partial_transpose(cs.state.rho, 3, 3, 1);
    auto sol = products_in_kernel(cs.state.kernel);
    for (const auto& p : sol.points) {
      ProductVector u = p.normalized();
      Vec xt = kron(Vec(u.phi().conjugate()), u.psi());
      EXPECT_LT((T1 * xt).norm() / T1.norm(), 1e-8);
    }
  }
}

TEST(KernelProducts, SixthDecompositionMirrorsUnderConjugation) {
  Philox rng(46);
  for (int t = 0; t < 20; ++t) {
    auto cs = random_entangled_state(rng);
    auto sol = products_in_kernel(cs.state.kernel);
    ASSERT_EQ(sol.points.size(), 6u);
    std::vector<ProductVector> five(sol.points.begin(), sol.points.begin() + 5), conj5;
    for (const auto& p : five) conj5.emplace_back(Vec(p.phi().conjugate()), p.psi());
    ProductVector sixth_conj(Vec(sol.points[5].phi().conjugate()), sol.points[5].psi());
    double r1 = 1, r2 = 1;
    span_coefficients(five, sol.points[5], &r1);
    span_coefficients(conj5, sixth_conj, &r2);
    EXPECT_LT(r1, 1e-8);
    EXPECT_LT(r2, 1e-8);
  }
}

TEST(Transversality, TangentDirection) {
  Mat B(9, 5);
  B.col(0) = kron(e(3, 0), e(3, 0));
  B.col(1) = kron(e(3, 0), e(3, 1));
  Philox rng(47);
  for (int i = 2; i < 5; ++i) B.col(i) = rng.complex_vector(9);
  auto [tr, dim] = transversality(B, ProductVector(e(3, 0), e(3, 0)));
  EXPECT_FALSE(tr);
  EXPECT_GE(dim, 2);
}

TEST(RangeProducts, PentagramProjectorRangeIsCompletelyEntangled) {
  PPTState st = oupb_projector(make_pentagram(1, 1, 1, 1));
  auto sol = products_in_range(range_basis(st.rho));
  EXPECT_TRUE(sol.points.empty());
  EXPECT_FALSE(sol.positive_dimensional);
}

TEST(RangeProducts, SpannedByFourProducts) {
  Philox rng(48);
  for (int t = 0; t < 10; ++t) {
    auto vs = random_products(rng, 4, {3, 3});
    auto sol = products_in_range(basis_of(vs));
    expect_valid(sol, basis_of(vs));
    for (const auto& p : vs) EXPECT_TRUE(contains(sol.points, p, 1e-6));
  }
}

TEST(RangeProducts, GenericSubspaceIsEmpty) {
  Philox rng(49);
  for (int t = 0; t < 10; ++t) {
    Mat B = rng.complex_matrix(9, 4);
    auto sol = products_in_range(B);
    EXPECT_TRUE(sol.points.empty());
    Philox orng = rng.split(std::uint64_t(t));
    EXPECT_TRUE(als_oracle(B, orng, 30).empty());
  }
}

TEST(TwoByN, CurveFromCompletelyEntangledComplement) {
  Philox rng(50);
  // A 2-dim subspace of C^2 (x) C^3 containing no product vector: the complement of a
  // 4-dim subspace built as the span of the curve (1, a) (x) (1, a, a^2)-type products.
  for (int t = 0; t < 10; ++t) {
    Mat A = rng.complex_matrix(2, 2), B = rng.complex_matrix(3, 3);
    std::vector<ProductVector> curve;
    for (int k = 0; k < 4; ++k) {
      cd a = rng.complex_normal();
      Vec f(2), g(3);
      f << 1.0, a;
      g << 1.0, a, a * a;
      curve.push_back(apply_local(A, B, ProductVector(f, g)));
    }
    Mat S = basis_of(curve);
    auto res = products_in_subspace_2xn(S, 3);
    ASSERT_TRUE(res.is_curve);
    ASSERT_EQ(res.samples.size(), 7u);
    Mat onb = range_basis(S);
    for (const auto& p : res.samples) EXPECT_LT(subspace_distance(onb, p.full()), 1e-8);
    EXPECT_EQ(numerical_rank(basis_of(res.samples)), 4);
    ASSERT_TRUE(res.certificate.has_value());
    EXPECT_TRUE(res.certificate->spans_subspace);
    EXPECT_LT(res.certificate->fit_residual, 1e-8);
  }
}

TEST(TwoByN, DiagonalTwoByTwo) {
  Mat S(4, 2);
  S.col(0) = kron(e(2, 0), e(2, 0));
  S.col(1) = kron(e(2, 1), e(2, 1));
  auto res = products_in_subspace_2xn(S, 2);
  ASSERT_FALSE(res.is_curve);
  ASSERT_EQ(res.finite.points.size(), 2u);
  EXPECT_TRUE(contains(res.finite.points, ProductVector(e(2, 0), e(2, 0))));
  EXPECT_TRUE(contains(res.finite.points, ProductVector(e(2, 1), e(2, 1))));
}

TEST(TwoByN, GenericThreeDimensional) {
  Philox rng(51);
  for (int t = 0; t < 20; ++t) {
    Mat S = rng.complex_matrix(6, 3);
    auto res = products_in_subspace_2xn(S, 3);
    ASSERT_FALSE(res.is_curve);
    EXPECT_LE(res.finite.points.size(), 3u);
    EXPECT_EQ(res.finite.points.size(), 3u);
    Mat onb = range_basis(S);
    for (const auto& p : res.finite.points) EXPECT_LT(subspace_distance(onb, p.full()), 1e-8);
  }
}
