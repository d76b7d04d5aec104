#include "upblab/harness.hpp"
#include "upblab/product.hpp"

#include <gtest/gtest.h>

using namespace upblab;

namespace {

Vec basis(int n, int i) {
  Vec v = Vec::Zero(n);
  v(i) = 1.0;
  return v;
}

Mat random_hermitian(Philox& rng, int d) {
  Mat G = rng.complex_matrix(d, d);
  return G + G.adjoint();
}

Mat random_unitary(Philox& rng, int d) {
  Eigen::HouseholderQR<Mat> qr(rng.complex_matrix(d, d));
  return qr.householderQ() * Mat::Identity(d, d);
}

}  // namespace

TEST(Kron, BasisCase) {
  Vec v = kron(basis(3, 0), basis(3, 0));
  EXPECT_EQ(v.size(), 9);
  EXPECT_EQ(v(0), cd(1.0));
  EXPECT_DOUBLE_EQ(v.norm(), 1.0);
}

TEST(Kron, DirectExpansion) {
  Vec a(2), b(2), want(4);
  a << 1, 1;
  b << 1, -1;
  want << 1, -1, 1, -1;
  EXPECT_LT((kron(a, b) - want).norm(), 1e-15);
}

TEST(Kron, ReshapeHasRankOne) {
  Philox rng(1);
  for (int t = 0; t < 20; ++t) {
    Vec v = rng.complex_vector(3), w = rng.complex_vector(4);
    Vec x = kron(v, w);
    Mat R(3, 4);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j) R(i, j) = x(4 * i + j);
    Eigen::JacobiSVD<Mat> svd(R);
    EXPECT_LT(svd.singularValues()(1), 1e-12 * svd.singularValues()(0));
  }
}

TEST(PartialTranspose, IdentityIsFixed) {
  Mat I = Mat::Identity(9, 9);
  EXPECT_LT((partial_transpose(I, 3, 3, 1) - I).norm(), 1e-15);
}

TEST(PartialTranspose, ProductProjector) {
  Philox rng(2);
  Vec phi = rng.complex_vector(3), psi = rng.complex_vector(3);
  Mat got = partial_transpose(proj(kron(phi, psi)), 3, 3, 1);
  Mat want = proj(kron(Vec(phi.conjugate()), psi));
  EXPECT_LT((got - want).norm(), 1e-12 * want.norm());
}

TEST(PartialTranspose, InvolutionHermiticityTrace) {
  Philox rng(3);
  for (int t = 0; t < 50; ++t) {
    int n = 2 + int(rng.below(2)), m = 2 + int(rng.below(3));
    Mat M = random_hermitian(rng, n * m);
    for (int sub : {1, 2}) {
      Mat T = partial_transpose(M, n, m, sub);
      EXPECT_TRUE(is_hermitian(T));
      EXPECT_NEAR(std::abs(T.trace() - M.trace()), 0.0, 1e-12);
      EXPECT_LT((partial_transpose(T, n, m, sub) - M).norm(), 1e-14 * M.norm());
    }
  }
}

TEST(HermitianEigen, Diagonal) {
  Mat D = Mat::Zero(3, 3);
  D(0, 0) = 3;
  D(1, 1) = 1;
  D(2, 2) = 2;
  auto e = hermitian_eigen(D);
  EXPECT_NEAR(e.values(0), 1, 1e-14);
  EXPECT_NEAR(e.values(1), 2, 1e-14);
  EXPECT_NEAR(e.values(2), 3, 1e-14);
}

TEST(HermitianEigen, ProjectorSpectrum) {
  Philox rng(4);
  Vec v = rng.complex_vector(5);
  auto e = hermitian_eigen(proj(v / v.norm()));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(e.values(i), 0.0, 1e-14);
  EXPECT_NEAR(e.values(4), 1.0, 1e-14);
}

TEST(HermitianEigen, TraceAndReconstruction) {
  Philox rng(5);
  for (int t = 0; t < 50; ++t) {
    Mat M = random_hermitian(rng, 9);
    auto e = hermitian_eigen(M);
    EXPECT_NEAR(e.values.sum(), M.trace().real(), 1e-10);
    Mat R = e.vectors * e.values.cast<cd>().asDiagonal() * e.vectors.adjoint();
    EXPECT_LE((R - M).norm(), 1e-10 * M.norm());
  }
}

TEST(HermitianEigen, RejectsNonHermitian) {
  Mat M = Mat::Zero(2, 2);
  M(0, 1) = 1.0;
  EXPECT_THROW(hermitian_eigen(M), InputError);
}

TEST(NumericalRank, SimpleCases) {
  EXPECT_EQ(numerical_rank(Mat::Zero(4, 4)), 0);
  Philox rng(6);
  EXPECT_EQ(numerical_rank(proj(rng.complex_vector(6))), 1);
}

TEST(NumericalRank, UnitaryInvariance) {
  Philox rng(7);
  for (int t = 0; t < 100; ++t) {
    int k = 1 + int(rng.below(8));
    Mat G = rng.complex_matrix(9, k);
    Mat M = G * G.adjoint();
    Mat U = random_unitary(rng, 9);
    EXPECT_EQ(numerical_rank(M), k);
    EXPECT_EQ(numerical_rank(U * M * U.adjoint()), k);
  }
}

TEST(NumericalRank, RelativeThreshold) {
  Philox rng(8);
  Mat G = rng.complex_matrix(9, 3);
  Mat M = G * G.adjoint();
  EXPECT_EQ(numerical_rank(1e-8 * M), 3);
  EXPECT_EQ(numerical_rank(1e8 * M), 3);
}

TEST(SlNormalize, Cases) {
  Mat I = Mat::Identity(3, 3);
  EXPECT_LT((sl_normalize(I) - I).norm(), 1e-15);
  EXPECT_LT((sl_normalize(2.0 * I) - I).norm(), 1e-14);
  Philox rng(9);
  for (int t = 0; t < 50; ++t) EXPECT_LT(std::abs(sl_normalize(rng.complex_matrix(3, 3)).determinant() - 1.0), 1e-12);
}

TEST(Subspaces, RangeKernelComplement) {
  Philox rng(10);
  Mat G = rng.complex_matrix(9, 4);
  Mat M = G * G.adjoint();
  Mat R = range_basis(M), K = null_basis(M);
  EXPECT_EQ(R.cols(), 4);
  EXPECT_EQ(K.cols(), 5);
  EXPECT_LT((R.adjoint() * K).norm(), 1e-12);
  EXPECT_LT((M * K).norm(), 1e-10 * M.norm());
  EXPECT_LT(subspace_distance(R, G.col(0)), 1e-12);
  EXPECT_LT((complement_basis(G).adjoint() * G).norm(), 1e-12);
}

TEST(ProductVectors, ProjectiveEquality) {
  Philox rng(11);
  ProductVector a(rng.complex_vector(3), rng.complex_vector(3));
  ProductVector b(cd(0, 2) * a.phi(), cd(-3, 1) * a.psi());
  EXPECT_TRUE(projectively_equal(a, b));
  ProductVector c(a.phi(), rng.complex_vector(3));
  EXPECT_FALSE(projectively_equal(a, c));
}
