#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"

using namespace floquet;

namespace {

/// Two-vertex periodic walk: a <-> b inside the cell with weight 1, b -> a
/// across cells with weight c, diagonal d.
PeriodicGraphOperator two_site_walk(double c, double d) {
  return PeriodicGraphOperator(1, {"a", "b"},
                               {{0, 0, DeckIndex{0}, d},
                                {1, 1, DeckIndex{0}, d},
                                {0, 1, DeckIndex{0}, -1.0},
                                {1, 0, DeckIndex{0}, -1.0},
                                {0, 1, DeckIndex{-1}, -c},
                                {1, 0, DeckIndex{1}, -c}});
}

}  // namespace

TEST(PrincipalEigenvalue, ScalarExamples) {
  for (double x : {0.0, 0.3, -1.2, 2.5}) {
    EXPECT_NEAR(principal_eigenvalue(fx::z1_laplacian(), fx::k1(x)).lambda, 2.0 - 2.0 * std::cosh(x), 1e-10);
    EXPECT_NEAR(principal_eigenvalue(fx::drifted_walk(), fx::k1(x)).lambda, 1.0 - 0.25 * std::exp(x) - 0.75 * std::exp(-x), 1e-10);
    const auto pe = principal_eigenvalue(fx::z2_laplacian(), fx::k2(x, -0.5 * x));
    EXPECT_NEAR(pe.lambda, 4.0 - 2.0 * std::cosh(x) - 2.0 * std::cosh(0.5 * x), 1e-10);
    EXPECT_LE(pe.residual, 1e-10);
    EXPECT_GT(pe.vector.minCoeff(), 0.0);
  }
}

TEST(PrincipalEigenvalue, TwoSiteMatchesClosedForm) {
  // L(xi) = [[d, -(1 + c e^{-xi})], [-(1 + c e^{xi}), d]]: Lambda = d - |1 + c e^{xi}|^{1/2}|1 + c e^{-xi}|^{1/2}
  const auto op = two_site_walk(0.5, 1.5);
  for (double x : {0.0, 0.7, -1.3}) {
    const double want = 1.5 - std::sqrt((1.0 + 0.5 * std::exp(x)) * (1.0 + 0.5 * std::exp(-x)));
    const auto pe = principal_eigenvalue(op, fx::k1(x));
    EXPECT_NEAR(pe.lambda, want, 1e-10);
    EXPECT_GT(pe.vector.minCoeff(), 0.0);
    EXPECT_NEAR(pe.vector.sum(), 1.0, 1e-12);
  }
}

TEST(PrincipalEigenvalue, UniqueFromRandomStarts) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  const auto op = two_site_walk(0.3, 2.0);
  for (double x : {0.0, 0.9}) {
    const double ref = principal_eigenvalue(op, fx::k1(x)).lambda;
    for (int s = 0; s < 5; ++s) {
      RVector start(2);
      start << u(rng), u(rng);
      EXPECT_NEAR(principal_eigenvalue(op, fx::k1(x), start).lambda, ref, 1e-10);
    }
  }
}

TEST(PrincipalEigenvalue, SimpleWithSpectralGap) {
  const auto op = two_site_walk(0.3, 2.0);
  for (double x : {0.0, 0.5, -2.0}) {
    const RMatrix l = twisted_matrix(op, fx::k1(x));
    const double lam = principal_eigenvalue(op, fx::k1(x)).lambda;
    const CVector ev = complex_eigenvalues(l.cast<cplx>());
    std::vector<double> dist;
    for (Eigen::Index i = 0; i < ev.size(); ++i) dist.push_back(std::abs(ev(i) - lam));
    std::sort(dist.begin(), dist.end());
    EXPECT_LT(dist[0], 1e-10);
    EXPECT_GT(dist[1], 1e-3);
  }
}

TEST(PrincipalEigenvalue, EvenForReversibleWalks) {
  for (const auto& op : {fx::z1_laplacian(), two_site_walk(0.4, 1.6)}) {
    for (double x : {0.2, 1.1, 2.7}) EXPECT_NEAR(lambda_at(op, fx::k1(x)), lambda_at(op, fx::k1(-x)), 1e-10);
  }
  EXPECT_NEAR(lambda_at(fx::z2_laplacian(), fx::k2(0.4, -1.0)), lambda_at(fx::z2_laplacian(), fx::k2(-0.4, 1.0)), 1e-10);
}

TEST(PrincipalEigenvalue, RefusesWithoutPositiveStructure) {
  auto kind_of = [](const PeriodicGraphOperator& op) {
    try {
      principal_eigenvalue(op, RVector::Zero(static_cast<Eigen::Index>(op.n())));
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::numerical;
  };
  EXPECT_EQ(kind_of(fx::ssh()), ErrorKind::precondition);
  EXPECT_EQ(kind_of(fx::cos_band()), ErrorKind::precondition);
  EXPECT_EQ(kind_of(fx::chiral_phase()), ErrorKind::precondition);
  // two decoupled chains in one cell
  const PeriodicGraphOperator split(1, {"a", "b"},
                                    {{0, 0, DeckIndex{0}, 2.0},
                                     {0, 0, DeckIndex{1}, -1.0},
                                     {0, 0, DeckIndex{-1}, -1.0},
                                     {1, 1, DeckIndex{0}, 2.0},
                                     {1, 1, DeckIndex{1}, -1.0},
                                     {1, 1, DeckIndex{-1}, -1.0}});
  EXPECT_FALSE(cell_graph_irreducible(split));
  EXPECT_EQ(kind_of(split), ErrorKind::precondition);
  EXPECT_TRUE(cell_graph_irreducible(two_site_walk(0.5, 2.0)));
}

TEST(MaximizeLambda, Examples) {
  auto prof = maximize_lambda(fx::z1_laplacian());
  EXPECT_NEAR(prof.lambda0, 0.0, 1e-8);
  EXPECT_NEAR(prof.xi_star(0), 0.0, 1e-6);

  prof = maximize_lambda(fx::drifted_walk());
  EXPECT_NEAR(prof.xi_star(0), 0.5 * std::log(3.0), 1e-6);
  EXPECT_NEAR(prof.lambda0, 1.0 - std::sqrt(3.0) / 2.0, 1e-6);
  EXPECT_NEAR(prof.lambda_at_zero, 0.0, 1e-12);
  EXPECT_TRUE(prof.hessian_negative_definite);
  EXPECT_LT(prof.gradient_norm, 1e-8);

  prof = maximize_lambda(fx::z2_laplacian());
  EXPECT_NEAR(prof.lambda0, 0.0, 1e-8);
  EXPECT_LT(prof.xi_star.norm(), 1e-6);
}

TEST(MaximizeLambda, InvariantsAndConcavity) {
  for (const auto& op : {fx::z1_laplacian(), fx::z1_laplacian(-1.0), fx::drifted_walk(), fx::z2_laplacian(), two_site_walk(0.3, 2.0),
                         fx::bundled("drifted_walk"), fx::bundled("z1_laplacian_shift_up")}) {
    const auto prof = maximize_lambda(op, 3);
    EXPECT_GE(prof.lambda0, prof.lambda_at_zero - 1e-12);
    EXPECT_NEAR(lambda_at(op, prof.xi_star), prof.lambda0, 1e-12);
    EXPECT_TRUE(prof.concavity_certified);
    EXPECT_EQ(prof.concavity.size(), 50u);
    for (const auto& s : prof.concavity) EXPECT_GE(s.margin, -1e-9);
  }
}

TEST(MaximizeLambda, SeedIsRecordedAndDeterministic) {
  const auto a = maximize_lambda(fx::drifted_walk(), 42);
  const auto b = maximize_lambda(fx::drifted_walk(), 42);
  EXPECT_EQ(a.seed, 42u);
  ASSERT_EQ(a.concavity.size(), b.concavity.size());
  for (std::size_t i = 0; i < a.concavity.size(); ++i) EXPECT_EQ(a.concavity[i].xi, b.concavity[i].xi);
  EXPECT_EQ(a.xi_star, b.xi_star);
}

TEST(MaximizeLambda, UnboundedIsAnError) {
  // only forward jumps: Lambda(xi) = 1 - e^{xi} creeps up to 1 as xi -> -inf, no maximizer
  const PeriodicGraphOperator op(1, {"a"}, {{0, 0, DeckIndex{0}, 1.0}, {0, 0, DeckIndex{1}, -1.0}});
  try {
    maximize_lambda(op);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::numerical);
  }
}

TEST(Classify, ThreeCases) {
  auto cl = classify_liouville_case(fx::z1_laplacian(-1.0));
  EXPECT_EQ(cl.kind, LiouvilleCase::vacuous);
  EXPECT_FALSE(cl.check_fermi);
  EXPECT_NEAR(cl.profile.lambda_at_zero, 1.0, 1e-12);

  cl = classify_liouville_case(fx::drifted_walk());
  EXPECT_EQ(cl.kind, LiouvilleCase::noncritical);
  EXPECT_EQ(cl.d_N, (std::vector<std::int64_t>(5, 1)));

  cl = classify_liouville_case(fx::z1_laplacian());
  EXPECT_EQ(cl.kind, LiouvilleCase::critical);
  EXPECT_EQ(cl.d_N, (std::vector<std::int64_t>{1, 2, 2, 2, 2}));

  cl = classify_liouville_case(fx::z2_laplacian(), 3);
  EXPECT_EQ(cl.kind, LiouvilleCase::critical);
  EXPECT_EQ(cl.d_N, (std::vector<std::int64_t>{1, 3, 5, 7}));
}

TEST(Classify, NegativeAtZero) {
  // Lambda(xi) = 1 - 2 cosh xi: Lambda_0 < 0, outside the hypothesis
  EXPECT_THROW(classify_liouville_case(fx::z1_laplacian(1.0)), Error);
  // Lambda(0) < 0 < Lambda_0 for a strongly drifted walk shifted below zero level
  const PeriodicGraphOperator op(1, {"a"}, {{0, 0, DeckIndex{1}, -0.02}, {0, 0, DeckIndex{-1}, -0.98}, {0, 0, DeckIndex{0}, 1.0}}, 0.1);
  const auto cl = classify_liouville_case(op);
  EXPECT_LT(cl.profile.lambda_at_zero, 0.0);
  EXPECT_GT(cl.profile.lambda0, 0.0);
  EXPECT_EQ(cl.kind, LiouvilleCase::vacuous);
  EXPECT_TRUE(cl.check_fermi);
  EXPECT_FALSE(cl.notes.empty());
}

TEST(Classify, MatchesFermiMachinery) {
  for (const auto& op : {fx::drifted_walk(), fx::z1_laplacian(), fx::z2_laplacian(), fx::drifted_walk(0.6, 0.4), two_site_walk(0.5, 1.5)}) {
    const auto cl = classify_liouville_case(op, 3);
    ASSERT_NE(cl.kind, LiouvilleCase::vacuous);
    const auto rep = liouville_dimension(op, 3);
    EXPECT_EQ(rep.d_N, cl.d_N);
  }
}

TEST(Classify, RefusesSsh) {
  try {
    classify_liouville_case(fx::ssh());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
  }
}
