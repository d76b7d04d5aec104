#include "upblab/harness.hpp"
#include "upblab/states.hpp"

#include <gtest/gtest.h>

using namespace upblab;

namespace {

Vec e(int n, int i) {
  Vec v = Vec::Zero(n);
  v(i) = 1.0;
  return v;
}

// Max over basis directions of |<phi' (x) psi| rho |phi (x) psi'>| and the mirrored term.
double bilinear_violation(const Mat& rho, const ProductVector& kp) {
  ProductVector u = kp.normalized();
  double worst = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      Vec l1 = kron(e(3, a), u.psi()), r1 = kron(u.phi(), e(3, b));
      Vec l2 = kron(u.phi(), e(3, b)), r2 = kron(e(3, a), u.psi());
      worst = std::max({worst, std::abs(l1.dot(rho * r1)), std::abs(l2.dot(rho * r2))});
    }
  return worst / rho.norm();
}

Mat mixture_of(const std::vector<ProductVector>& ps) {
  Mat rho = Mat::Zero(9, 9);
  for (const auto& p : ps) rho += proj(p.normalized().full());
  return rho;
}

}  // namespace

TEST(RhoFromParams, StructureAndSymmetry) {
  Philox rng(61);
  for (int t = 0; t < 50; ++t) {
    double p = rng.uniform(-3, 3), q = rng.uniform(-3, 3), r = rng.uniform(-3, 3), s = rng.uniform(-3, 3);
    if (!all_atoms_nonzero(p, q, r, s, 1e-3)) continue;
    for (int sign : {1, -1}) {
      Mat M = rho_from_params(p, q, r, s, sign);
      for (int k : {0, 4, 8}) {
        EXPECT_EQ(M.row(k).norm(), 0.0);
        EXPECT_EQ(M.col(k).norm(), 0.0);
      }
      EXPECT_LT((partial_transpose(M, 3, 3, 1) - M).norm(), 1e-12 * M.norm());
      for (const auto& v : canonical_vectors(p, q, r, s)) EXPECT_LT((M * v.full()).norm(), 1e-9 * M.norm() * v.full().norm());
    }
  }
}

TEST(RhoFromParams, ReferencePointSigns) {
  auto plus = make_state(rho_from_params(-1, 2, 0.5, 0.25, 1));
  EXPECT_TRUE(plus.is_psd());
  EXPECT_TRUE(plus.is_ppt());
  EXPECT_EQ(plus.rank, 4);
  EXPECT_EQ(plus.rank_T1, 4);
  auto minus = hermitian_eigen(rho_from_params(-1, 2, 0.5, 0.25, -1)).values;
  EXPECT_LT(minus(0), -1e-3);
}

TEST(RhoFromParams, VanishingAtomIsAnError) {
  EXPECT_THROW(rho_from_params(1, 2, 0.5, 0.25, 1), InputError);
  EXPECT_THROW(rho_from_params(-1, 2, 0.5, 0.5, 1), InputError);
  EXPECT_THROW(rho_from_params(-1, 2, 0.5, 0.25, 0), InputError);
  EXPECT_THROW(rho_from_constraints(-1, 2, 0.5, 0.5), InputError);
}

TEST(RhoFromConstraints, ReferencePoint) {
  auto c = rho_from_constraints(-1, 2, 0.5, 0.25);
  EXPECT_EQ(c.nullspace_dim, 1);
  EXPECT_LE(c.proportionality_residual, 1e-8);
  EXPECT_LT(c.equation_residual, 1e-10);
  EXPECT_DOUBLE_EQ(c.b[0], -1.0);
}

TEST(RhoFromConstraints, AdmissibleSamples) {
  Philox rng(62);
  for (int t = 0; t < 20; ++t) {
    auto cs = random_entangled_state(rng);
    auto k = canonical_five(cs.kernel_upb);
    auto c = rho_from_constraints(k.p.real(), k.q.real(), k.r.real(), k.s.real());
    EXPECT_EQ(c.nullspace_dim, 1);
    EXPECT_LE(c.proportionality_residual, 1e-8);
  }
}

TEST(RhoFromConstraints, GenericRealSamples) {
  Philox rng(63);
  int done = 0;
  while (done < 30) {
    double p = rng.uniform(-3, 3), q = rng.uniform(-3, 3), r = rng.uniform(-3, 3), s = rng.uniform(-3, 3);
    if (!all_atoms_nonzero(p, q, r, s, 1e-2)) continue;
    auto c = rho_from_constraints(p, q, r, s);
    EXPECT_LE(c.proportionality_residual, 1e-8);
    ++done;
  }
}

TEST(OupbProjector, StandardPentagram) {
  auto st = oupb_projector(make_pentagram(1, 1, 1, 1));
  EXPECT_EQ(st.rank, 4);
  EXPECT_EQ(st.rank_T1, 4);
  EXPECT_GE(st.min_eig, -1e-12);
  EXPECT_GE(st.min_eig_T1, -1e-12);
  EXPECT_NEAR(st.rho.trace().real(), 1.0, 1e-12);
  EXPECT_EQ(products_in_kernel(st.kernel).points.size(), 6u);
}

TEST(OupbProjector, RejectsNonOrthogonal) {
  auto u = make_pentagram(1, 1, 1, 1);
  u.v[1] = (u.v[1] + u.v[0]).normalized();
  EXPECT_THROW(oupb_projector(u), InputError);
}

TEST(StateFromGupb, PentagramReproducesProjector) {
  auto u = make_pentagram(1.2, 0.8, 0.6, 1.7);
  auto r = state_from_gupb(u.products());
  ASSERT_TRUE(r.found);
  Mat P = oupb_projector(u).rho;
  Mat got = r.state.rho / r.state.rho.trace().real();
  EXPECT_LE((got - P).norm() / P.norm(), 1e-6);
  EXPECT_EQ(r.state.rank, 4);
  EXPECT_TRUE(r.state.is_ppt());
}

TEST(StateFromGupb, ConjugatedKernel) {
  Philox rng(64);
  for (int t = 0; t < 20; ++t) {
    auto cs = random_entangled_state(rng);
    auto r = state_from_gupb(cs.kernel_upb);
    ASSERT_TRUE(r.found);
    EXPECT_LE((r.state.rho - cs.state.rho).norm() / cs.state.rho.norm(), 1e-6);
  }
}

TEST(StateFromGupb, VandermondeHasNoState) {
  auto vs = vandermonde_gupb(3, 3, {0, 1, 2, 3, 4}, {0, 1, 2, 3, 4});
  ASSERT_FALSE(orthogonalize_upb(vs).found);
  bool found = true;
  try {
    found = state_from_gupb(vs).found;
  } catch (const InputError&) {
    found = false;
  }
  EXPECT_FALSE(found);
}

TEST(KernelConditions, BilinearConditionsHold) {
  Philox rng(65);
  for (int t = 0; t < 20; ++t) {
    auto cs = random_entangled_state(rng);
    for (const auto& kp : products_in_kernel(cs.state.kernel).points)
      EXPECT_LT(bilinear_violation(cs.state.rho, kp), 1e-8);
  }
  auto P = make_state(rho_from_params(-1, 2, 0.5, 0.25, 1));
  for (const auto& kp : canonical_vectors(-1, 2, 0.5, 0.25)) EXPECT_LT(bilinear_violation(P.rho, kp), 1e-10);
}

TEST(SubtractProduct, SeparableMixtureRankDrops) {
  auto u = make_pentagram(1, 1, 1, 1);
  auto prods = u.products();
  auto st = make_state(mixture_of(prods));
  ASSERT_EQ(st.rank, 5);
  auto r = subtract_product(st, prods[0]);
  EXPECT_EQ(r.rank_before, 5);
  EXPECT_EQ(r.rank_after, 4);
  EXPECT_EQ(r.rank_T1_after, r.rank_T1_before - 1);
  EXPECT_GT(r.lambda, 0.0);
  ProductVector phased(cd(0, 1) * prods[0].phi(), std::polar(1.0, 0.7) * prods[0].psi());
  EXPECT_NEAR(subtract_product(st, phased).lambda, r.lambda, 1e-10);
}

TEST(SubtractProduct, EdgeStatePreconditionFails) {
  Philox rng(66);
  auto cs = random_entangled_state(rng);
  auto e1e1 = ProductVector(e(3, 0), e(3, 0));
  EXPECT_THROW(subtract_product(cs.state, e1e1), InputError);
}

TEST(Classify, PentagramProjectorAnalysis) {
  auto st = oupb_projector(make_pentagram(1, 1, 1, 1));
  auto a = analyze(st);
  EXPECT_TRUE(a.is_ppt);
  EXPECT_EQ(a.rank, 4);
  EXPECT_EQ(a.rank_T1, 4);
  ASSERT_TRUE(a.kernel_products.has_value());
  EXPECT_EQ(a.kernel_products->points.size(), 6u);
  ASSERT_TRUE(a.gupb.has_value());
  EXPECT_TRUE(a.gupb->verdict);
  EXPECT_GT(a.matching_permutation, 0);
  EXPECT_TRUE(a.is_edge);
  EXPECT_EQ(a.classification.kind, Classification::EntangledUPBForm);
  EXPECT_LE(a.classification.residual, 1e-10);
}

TEST(Classify, ConjugatedProjectorsRoundTrip) {
  Philox rng(67);
  for (int t = 0; t < 30; ++t) {
    auto cs = random_entangled_state(rng);
    EXPECT_EQ(cs.state.rank, 4);
    EXPECT_EQ(cs.state.rank_T1, 4);
    auto c = classify(cs.state);
    ASSERT_EQ(c.kind, Classification::EntangledUPBForm) << "trial " << t;
    EXPECT_LE(c.residual, 1e-6);
    EXPECT_LT(c.upb.orthogonality_residual(), 1e-8);
  }
}

TEST(Classify, SeparableMixtures) {
  Philox rng(68);
  for (int t = 0; t < 10; ++t) {
    auto ps = random_products(rng, 4, {3, 3});
    auto st = make_state(mixture_of(ps));
    ASSERT_EQ(st.rank, 4);
    auto c = classify(st);
    EXPECT_EQ(c.kind, Classification::SeparableCandidate);
    EXPECT_GE(c.separable_witnesses.size(), 4u);
  }
  // Five product projectors whose span is only four-dimensional.
  auto ps = random_products(rng, 4, {3, 3});
  std::vector<ProductVector> five = ps;
  auto sol = products_in_range(stack_full(ps));
  for (const auto& p : sol.points)
    if (five.size() == 4) {
      bool fresh = true;
      for (const auto& q : ps) fresh = fresh && !projectively_equal(p, q);
      if (fresh) five.push_back(p);
    }
  auto st = make_state(mixture_of(five));
  EXPECT_EQ(st.rank, 4);
  EXPECT_EQ(classify(st).kind, Classification::SeparableCandidate);
}

TEST(Classify, PreconditionsAreErrors) {
  Philox rng(69);
  auto st = make_state(mixture_of(random_products(rng, 5, {3, 3})));
  EXPECT_THROW(classify(st), InputError);
  EXPECT_THROW(make_state(rng.complex_matrix(9, 9)), InputError);
}

TEST(TwoByN, RangeProducts) {
  Philox rng(70);
  for (int t = 0; t < 20; ++t) {
    auto ps = random_products(rng, 6, {2, 4});
    auto st = make_state(mixture(ps), 2, 4);
    EXPECT_EQ(st.rank, 6);
    auto p = product_in_range_2xn(st);
    EXPECT_LE(subspace_distance(range_basis(st.rho), p.full()), 1e-8);
  }
  for (int t = 0; t < 30; ++t) {
    auto st = random_ppt_2xn(rng, 4);
    ASSERT_TRUE(st.is_ppt());
    auto p = product_in_range_2xn(st);
    EXPECT_LE(subspace_distance(range_basis(st.rho), p.full()), 1e-8);
  }
  ProductVector pure(rng.complex_vector(2), rng.complex_vector(4));
  auto st = make_state(proj(pure.full()), 2, 4);
  EXPECT_TRUE(projectively_equal(product_in_range_2xn(st), pure, 1e-6));
}
