#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"

using namespace floquet;

TEST(BlochMatrix, Laplacian1D) {
  for (double k : {-2.0, 0.0, 0.3, 1.7, pi}) {
    const CMatrix p = bloch_matrix_entries(fx::z1_laplacian(), fx::k1(k));
    EXPECT_NEAR(std::abs(p(0, 0) - (2.0 - 2.0 * std::cos(k))), 0.0, 1e-15);
  }
}

TEST(BlochMatrix, SshAssembly) {
  for (double k : {-1.1, 0.0, 0.4, 2.9}) {
    const CMatrix p = bloch_matrix_entries(fx::ssh(), fx::k1(k));
    CMatrix expected(2, 2);
    expected << 0.0, 1.0 + std::exp(-I * k), 1.0 + std::exp(I * k), 0.0;
    EXPECT_LT(fx::max_abs_diff(p, expected), 1e-15);
  }
}

TEST(BlochMatrix, RowSumsAtZero) {
  const auto op = fx::twisted_pair();
  const CMatrix p0 = bloch_matrix_entries(op, RVector(RVector::Zero(1)));
  const auto u = WindowFunction::from(Box::centered(1, 3), 2, [](const DeckIndex&, std::size_t) { return cplx(1.0); });
  const auto pu = apply_operator(op, u);
  for (Eigen::Index v = 0; v < 2; ++v) EXPECT_LT(std::abs(pu.at(DeckIndex{0}, v) - p0.row(v).sum()), 1e-15);
}

TEST(BlochMatrix, AdjointIsConjugateTranspose) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-pi, pi);
  for (const auto& op : {fx::twisted_pair(), fx::jordan(), fx::chiral_phase(), fx::drifted_walk()}) {
    const auto adj = adjoint(op);
    for (int i = 0; i < 100; ++i) {
      const auto k = fx::k1(u(rng));
      EXPECT_LT(fx::max_abs_diff(bloch_matrix_entries(adj, k), bloch_matrix_entries(op, k).adjoint()), 1e-14);
    }
  }
}

TEST(BlochMatrix, Periodicity) {
  const auto op = fx::z2_laplacian();
  const auto k = fx::k2(0.37, -1.2);
  for (int j = 0; j < 2; ++j) {
    RVector kk = k;
    kk(j) += 2.0 * pi;
    EXPECT_LT(fx::max_abs_diff(bloch_matrix_entries(op, k), bloch_matrix_entries(op, kk)), 1e-14);
  }
}

TEST(BlochMatrix, BlochAnsatzIdentity) {
  const auto op = fx::twisted_pair();
  const RVector k = fx::k1(0.81);
  CVector phi(2);
  phi << cplx(0.3, -0.2), cplx(-1.1, 0.5);
  const auto u = WindowFunction::from(Box::centered(1, 5), 2, [&](const DeckIndex& g, std::size_t v) {
    return std::exp(I * g.dot(k)) * phi(static_cast<Eigen::Index>(v));
  });
  const CVector pphi = bloch_matrix_entries(op, k) * phi;
  const auto pu = apply_operator(op, u);
  pu.window().for_each([&](const DeckIndex& g) {
    for (std::size_t v = 0; v < 2; ++v)
      EXPECT_LT(std::abs(pu.at(g, v) - std::exp(I * g.dot(k)) * pphi(static_cast<Eigen::Index>(v))), 1e-12);
  });
}

TEST(BlochMatrix, DerivativeMatchesFiniteDifference) {
  const auto op = fx::twisted_pair();
  const CVector k = CVector::Constant(1, 0.6);
  const double h = 1e-5;
  const CMatrix fd = (bloch_matrix_entries(op, CVector(k.array() + h)) - bloch_matrix_entries(op, CVector(k.array() - h))) / (2 * h);
  EXPECT_LT(fx::max_abs_diff(bloch_derivative(op, k, {1}), fd), 1e-9);
}

TEST(Jacobi, EigenpairsAndOrdering) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  for (int m : {1, 2, 3, 5, 8}) {
    CMatrix a(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) a(i, j) = cplx(nd(rng), nd(rng));
    a = (a + a.adjoint()).eval();
    const auto e = jacobi_eigen(a);
    for (int i = 1; i < m; ++i) EXPECT_LE(e.values(i - 1), e.values(i));
    const double nrm = spectral_norm(a);
    for (int i = 0; i < m; ++i) EXPECT_LE((a * e.vectors.col(i) - e.values(i) * e.vectors.col(i)).norm(), 1e-12 * nrm);
    EXPECT_LT((e.vectors.adjoint() * e.vectors - CMatrix::Identity(m, m)).norm(), 1e-12);
  }
}

TEST(Bands, Examples) {
  const RVector b = band_functions(fx::z2_laplacian(), fx::k2(pi, pi));
  ASSERT_EQ(b.size(), 1);
  EXPECT_NEAR(b(0), 8.0, 1e-14);
  for (double k : {-2.5, -0.3, 0.0, 1.0, 3.0}) {
    const RVector s = band_functions(fx::ssh(), fx::k1(k));
    EXPECT_NEAR(s(0), -2.0 * std::abs(std::cos(k / 2)), 1e-13);
    EXPECT_NEAR(s(1), 2.0 * std::abs(std::cos(k / 2)), 1e-13);
  }
  try {
    band_functions(fx::drifted_walk(), fx::k1(0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
  }
}

TEST(Bands, EvenInKForRealWeights) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-pi, pi);
  for (int i = 0; i < 20; ++i) {
    const double k = u(rng);
    EXPECT_LT((band_functions(fx::ssh(1.0, 2.0), fx::k1(k)) - band_functions(fx::ssh(1.0, 2.0), fx::k1(-k))).norm(), 1e-13);
    const RVector k2 = fx::k2(u(rng), u(rng));
    EXPECT_LT((band_functions(fx::z2_laplacian(), k2) - band_functions(fx::z2_laplacian(), RVector(-k2))).norm(), 1e-13);
  }
}

TEST(BandPath, ThreeSamples) {
  const auto rows = band_path(fx::z1_laplacian(), {fx::k1(0), fx::k1(pi)}, 3);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(rows[0].eigenvalues(0), 0.0, 1e-14);
  EXPECT_NEAR(rows[1].eigenvalues(0), 2.0, 1e-14);
  EXPECT_NEAR(rows[2].eigenvalues(0), 4.0, 1e-14);
  EXPECT_NEAR(rows[2].t, pi, 1e-15);
}

TEST(BandPath, EndpointsOnlyAndClosedPath) {
  EXPECT_EQ(band_path(fx::z1_laplacian(), {fx::k1(0), fx::k1(1)}, 1).size(), 2u);
  const auto rows = band_path(fx::z2_laplacian(), {fx::k2(0, 0), fx::k2(pi, 0), fx::k2(pi, pi), fx::k2(0, 0)}, 11);
  EXPECT_EQ(rows.size(), 31u);
  EXPECT_LT((rows.front().eigenvalues - rows.back().eigenvalues).norm(), 1e-14);
  EXPECT_THROW(band_path(fx::z1_laplacian(), {fx::k1(0)}, 4), Error);
}

TEST(BandPath, LipschitzContinuity) {
  const auto op = fx::ssh(1.0, 2.0);
  const auto rows = band_path(op, {fx::k1(-pi), fx::k1(pi)}, 200);
  const double lip = op.lipschitz_constant();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double dk = (rows[i].k - rows[i - 1].k).norm();
    EXPECT_LE((rows[i].eigenvalues - rows[i - 1].eigenvalues).cwiseAbs().maxCoeff(), lip * dk + 1e-14);
  }
}

TEST(BandPath, CsvFormat) {
  std::ostringstream os;
  write_band_csv(os, band_path(fx::ssh(), {fx::k1(0), fx::k1(pi)}, 5));
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,k1,band1,band2");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 5);
}

TEST(Transform, DeltaFunctions) {
  const KGrid grid(1, 16);
  WindowFunction d0(Box::centered(1, 2), 2);
  d0.at(DeckIndex{0}, 1) = 1.0;
  auto s = floquet_transform(d0, grid);
  for (std::size_t q = 0; q < grid.size(); ++q) {
    EXPECT_LT(std::abs(s.values(static_cast<Eigen::Index>(q), 0)), 1e-15);
    EXPECT_LT(std::abs(s.values(static_cast<Eigen::Index>(q), 1) - 1.0), 1e-15);
  }
  WindowFunction d1(Box::centered(1, 2), 1);
  d1.at(DeckIndex{1}, 0) = 1.0;
  s = floquet_transform(d1, grid);
  for (std::size_t q = 0; q < grid.size(); ++q)
    EXPECT_LT(std::abs(s.values(static_cast<Eigen::Index>(q), 0) - std::exp(-I * grid.point(q)(0))), 1e-14);
}

TEST(Transform, InverseOfConstantAndShift) {
  const KGrid grid(2, 8);
  FloquetSamples s{grid, default_inversion_box(grid), CMatrix::Ones(static_cast<Eigen::Index>(grid.size()), 1)};
  auto u = inverse_floquet_transform(s);
  u.window().for_each([&](const DeckIndex& g) { EXPECT_LT(std::abs(u.at(g, 0) - (g.is_zero() ? 1.0 : 0.0)), 1e-14); });

  const DeckIndex g0{2, -1};
  CVector phi(2);
  phi << cplx(0.5, 1.0), cplx(-2.0, 0.0);
  FloquetSamples t{grid, default_inversion_box(grid), CMatrix(static_cast<Eigen::Index>(grid.size()), 2)};
  for (std::size_t q = 0; q < grid.size(); ++q)
    t.values.row(static_cast<Eigen::Index>(q)) = std::exp(-I * g0.dot(grid.point(q))) * phi.transpose();
  u = inverse_floquet_transform(t);
  u.window().for_each([&](const DeckIndex& g) {
    for (std::size_t v = 0; v < 2; ++v)
      EXPECT_LT(std::abs(u.at(g, v) - (g == g0 ? phi(static_cast<Eigen::Index>(v)) : cplx{})), 1e-14);
  });
}

TEST(Transform, Aliasing) {
  try {
    floquet_transform(WindowFunction(Box::centered(1, 5), 1), KGrid(1, 8));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
  }
}

TEST(Transform, RoundTripAndParseval) {
  std::mt19937_64 rng(1234);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + trial % 2;
    const KGrid grid(n, n == 1 ? 16 : 8);
    Box box = Box::centered(n, 1 + trial % 3);
    const auto u = WindowFunction::from(box, 2, [&](const DeckIndex&, std::size_t) { return cplx(nd(rng), nd(rng)); });
    const auto s = floquet_transform(u, grid);
    const auto back = inverse_floquet_transform(s);
    double err = 0.0, lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < u.values().size(); ++i) {
      err = std::max(err, std::abs(u.values()[i] - back.values()[i]));
      lhs += std::norm(u.values()[i]);
    }
    rhs = s.values.squaredNorm() / static_cast<double>(grid.size());
    EXPECT_LT(err, 1e-10);
    EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::max(1.0, lhs));
  }
}
