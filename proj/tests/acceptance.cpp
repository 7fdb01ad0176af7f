// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "floquet/floquet.hpp"
#include "floquet/io.hpp"

#ifndef FLOQUET_DATA_DIR
#define FLOQUET_DATA_DIR "data"
#endif

using namespace floquet;

namespace {

PeriodicGraphOperator bundled(const std::string& name) {
  return io::load_operator(std::string(FLOQUET_DATA_DIR) + "/operators/" + name + ".json");
}

RVector vec(std::initializer_list<double> xs) {
  RVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

/// Collects failed checks with a short reason.
struct Checks {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  bool ok() const { return failures.empty(); }
};

std::string show(const std::vector<std::int64_t>& v) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ']';
  return os.str();
}

HomogeneousMatrixPolynomial random_poly(std::size_t n, std::size_t r, int deg, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  HomogeneousMatrixPolynomial q(n, r, deg);
  for (const auto& a : monomials_of_degree(n, deg)) {
    CMatrix c(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r));
    for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = cplx(nd(rng), nd(rng));
    q.add(a, c);
  }
  return q;
}

double rel_poly_err(const HomogeneousMatrixPolynomial& got, const HomogeneousMatrixPolynomial& want) {
  double num = 0.0, den = 0.0;
  for (const auto& a : monomials_of_degree(want.n(), want.degree())) {
    num += (got.coefficient(a) - want.coefficient(a)).squaredNorm();
    den += want.coefficient(a).squaredNorm();
  }
  return std::sqrt(num / den);
}

const std::vector<std::pair<std::string, std::vector<std::int64_t>>>& criterion1_table() {
  static const std::vector<std::pair<std::string, std::vector<std::int64_t>>> t{
      {"z1_laplacian", {1, 2, 2, 2, 2}}, {"z2_laplacian", {1, 3, 5, 7, 9}}, {"cos_band", {2, 2, 2, 2, 2}},
      {"biharmonic", {1, 2, 3, 4, 4}},   {"ssh_dimer", {2, 2, 2, 2, 2}},    {"drifted_walk", {1, 1, 1, 1, 1}}};
  return t;
}

// ---------------------------------------------------------------------------

Checks criterion1() {
  Checks c;
  for (const auto& [name, want] : criterion1_table()) {
    const auto rep = liouville_dimension(bundled(name), 4);
    c.expect(rep.verdict == LiouvilleVerdict::holds, name + ": verdict " + to_string(rep.verdict));
    c.expect(rep.d_N == rep.oracle_d_N, name + ": formula " + show(rep.d_N) + " vs oracle " + show(rep.oracle_d_N));
    c.expect(rep.d_N == want, name + ": d_N " + show(rep.d_N) + " expected " + show(want));
    for (const auto& p : rep.points) c.expect(p.path == DimensionPath::formula, name + ": point used the " + to_string(p.path) + " path");
  }
  return c;
}

Checks criterion2() {
  Checks c;
  std::mt19937_64 rng(2024);
  int count = 0;
  auto check = [&](std::size_t n, std::size_t r, int deg) {
    const auto q = random_poly(n, r, deg, rng);
    c.expect(det_not_identically_zero(q), "random symbol sampled as degenerate");
    for (int N = 0; N <= 5; ++N) {
      const auto got = static_cast<std::int64_t>(q_harmonic_basis(q, N).dimension());
      const auto want = dim_formula(static_cast<std::int64_t>(n), N, static_cast<std::int64_t>(r), deg);
      if (got != want) {
        std::ostringstream os;
        os << "n=" << n << " r=" << r << " deg=" << deg << " N=" << N << ": " << got << " != " << want;
        c.expect(false, os.str());
      }
    }
    ++count;
  };
  for (std::size_t n = 1; n <= 3; ++n)
    for (std::size_t r = 1; r <= 2; ++r)
      for (int deg = 1; deg <= 3; ++deg) check(n, r, deg);
  check(3, 2, 2);
  check(2, 2, 3);
  c.expect(count == 20, "expected 20 symbols");
  return c;
}

Checks criterion3() {
  Checks c;
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 2);
    const std::size_t r = 1 + static_cast<std::size_t>((trial / 2) % 2);
    const int l0 = 1 + trial % 3;
    const auto lead = random_poly(n, r, l0, rng);
    const auto fam = TaylorFamily::from_terms(n, r, {lead, random_poly(n, r, l0 + 1, rng), random_poly(n, r, l0 + 2, rng)});
    const auto R = right_inverse_R(lead);
    for (int N = 0; N <= 4; ++N) {
      const auto want = static_cast<std::size_t>(dim_formula(static_cast<std::int64_t>(n), N, static_cast<std::int64_t>(r), l0));
      const std::string tag = "trial " + std::to_string(trial) + " N=" + std::to_string(N);
      c.expect(lambda_N_kernel(fam, N).dimension == want, tag + ": kernel dimension");
      const auto map = cokernel_isomorphism(fam, N, R);
      c.expect(map.cokernel_dimension == want, tag + ": cokernel dimension");
      c.expect(map.image_rank == want, tag + ": image dimension");
      c.expect(map.harmonic_residual <= 1e-10, tag + ": harmonic residual " + std::to_string(map.harmonic_residual));
    }
  }
  return c;
}

Checks criterion4() {
  Checks c;
  {
    const auto d = taylor_expand(bundled("z2_laplacian"), vec({0, 0}));
    HomogeneousMatrixPolynomial want(2, 1, 2);
    want.add({2, 0}, cplx(1.0));
    want.add({0, 2}, cplx(1.0));
    c.expect(d.l0 == 2, "z2: l0");
    c.expect(d.l0 == 2 && rel_poly_err(d.lambda_l0, want) <= 1e-6, "z2: lambda_2 relative error");
  }
  {
    const auto d = taylor_expand(bundled("cos_band"), vec({pi / 2}));
    c.expect(d.l0 == 1, "cos_band: l0");
  }
  {
    const auto d = taylor_expand(bundled("biharmonic"), vec({0}));
    HomogeneousMatrixPolynomial want(1, 1, 4);
    want.add({4}, cplx(1.0));
    c.expect(d.l0 == 4, "biharmonic: l0");
    c.expect(d.l0 == 4 && rel_poly_err(d.lambda_l0, want) <= 1e-5, "biharmonic: lambda_4 relative error");
  }
  {
    const auto d = taylor_expand(bundled("ssh_dimer"), vec({pi}));
    c.expect(d.l0 == 1 && d.r == 2, "ssh: l0 and r");
    if (d.l0 == 1) {
      // det lambda_1(kappa) = -kappa^2 up to an overall unimodular factor
      const cplx det = d.lambda_l0.coefficient({1}).determinant();
      c.expect(std::abs(std::abs(det) - 1.0) <= 1e-6, "ssh: |det| coefficient");
      c.expect(std::abs(det + 1.0) <= 1e-6, "ssh: det sign");
    }
  }
  return c;
}

Checks criterion5() {
  Checks c;
  const std::vector<std::pair<std::string, std::vector<RVector>>> finite{
      {"z1_laplacian", {vec({0})}},       {"z2_laplacian", {vec({0, 0})}}, {"cos_band", {vec({-pi / 2}), vec({pi / 2})}},
      {"biharmonic", {vec({0})}},         {"ssh_dimer", {vec({-pi})}},     {"drifted_walk", {vec({0})}}};
  for (const auto& [name, want] : finite) {
    const auto op = bundled(name);
    const auto rep = real_fermi_surface(op);
    c.expect(rep.verdict == FermiVerdict::finite, name + ": verdict");
    c.expect(rep.points.size() == want.size(), name + ": point count");
    for (const auto& w : want) {
      double best = 1e300;
      for (const auto& p : rep.points) best = std::min(best, torus_distance(p.k0, w));
      c.expect(best <= 1e-8, name + ": point accuracy");
    }
    const auto mirror = real_fermi_surface(adjoint(op));
    c.expect(mirror.points.size() == rep.points.size(), name + ": adjoint point count");
    for (const auto& p : rep.points) {
      double best = 1e300;
      for (const auto& q : mirror.points) best = std::min(best, torus_distance(q.k0, RVector(-p.k0)));
      c.expect(best <= 1e-8, name + ": adjoint mirror symmetry");
    }
  }
  for (const std::string name : {"z1_laplacian_gap", "z1_laplacian_shift_up", "ssh_staggered"}) {
    const auto rep = real_fermi_surface(bundled(name));
    c.expect(rep.verdict == FermiVerdict::empty, name + ": expected empty");
  }
  const auto cert = certify_empty(bundled("z1_laplacian_gap"), 64);
  c.expect(cert.bound > 0.0, "gap: certify_empty bound not positive");
  c.expect(real_fermi_surface(bundled("z2_laplacian_midband")).verdict == FermiVerdict::likely_positive_dimensional,
           "midband: expected likely_positive_dimensional");
  return c;
}

Checks criterion6() {
  Checks c;
  int solutions = 0;
  for (const auto& [name, want] : criterion1_table()) {
    const auto op = bundled(name);
    for (const auto& fp : real_fermi_surface(op).points) {
      for (const auto& s : build_floquet_solutions(op, fp.k0, 4)) {
        ++solutions;
        const auto w = s.on_window(Box::centered(op.n(), 10), op.vertex_count());
        const std::string tag = name + " order " + std::to_string(s.order);
        c.expect(verify_solution(op, s, 10).residual <= 1e-9, tag + ": residual");
        c.expect(floquet_order_test(w, s.k, s.order), tag + ": order-N difference test");
        if (s.order >= 1) c.expect(!floquet_order_test(w, s.k, s.order - 1), tag + ": order-(N-1) test should fail");
      }
    }
  }
  c.expect(solutions > 0, "no solutions constructed");
  return c;
}

Checks criterion7() {
  Checks c;
  std::mt19937_64 rng(99);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 2);
    const KGrid grid(n, n == 1 ? 16 : 8);
    const auto u = WindowFunction::from(Box::centered(n, 1 + trial % 3), 1 + static_cast<std::size_t>(trial % 2),
                                        [&](const DeckIndex&, std::size_t) { return cplx(nd(rng), nd(rng)); });
    const auto s = floquet_transform(u, grid);
    const auto back = inverse_floquet_transform(s);
    double err = 0.0, lhs = 0.0;
    for (std::size_t i = 0; i < u.values().size(); ++i) {
      err = std::max(err, std::abs(u.values()[i] - back.values()[i]));
      lhs += std::norm(u.values()[i]);
    }
    const double rhs = s.values.squaredNorm() / static_cast<double>(grid.size());
    c.expect(err <= 1e-10, "round trip error " + std::to_string(err));
    c.expect(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, lhs), "Parseval mismatch");
  }
  return c;
}

Checks criterion8() {
  Checks c;
  const auto drift = maximize_lambda(bundled("drifted_walk"));
  c.expect(std::abs(drift.lambda0 - (1.0 - std::sqrt(3.0) / 2.0)) <= 1e-6, "drifted: Lambda0");
  c.expect(std::abs(drift.xi_star(0) - 0.5 * std::log(3.0)) <= 1e-6, "drifted: xi*");
  const auto lap = maximize_lambda(bundled("z1_laplacian"));
  c.expect(std::abs(lap.lambda0) <= 1e-8, "laplacian: Lambda0");
  c.expect(std::abs(lap.xi_star(0)) <= 1e-6, "laplacian: maximizer at 0");

  const std::vector<std::pair<std::string, LiouvilleCase>> cases{
      {"z1_laplacian_shift_up", LiouvilleCase::vacuous}, {"drifted_walk", LiouvilleCase::noncritical}, {"z1_laplacian", LiouvilleCase::critical}};
  for (const auto& [name, want] : cases) {
    const auto op = bundled(name);
    const auto cl = classify_liouville_case(op, 4);
    c.expect(cl.kind == want, name + ": classified " + to_string(cl.kind));
    if (want != LiouvilleCase::vacuous) {
      const auto rep = liouville_dimension(op, 4);
      c.expect(cl.d_N == rep.oracle_d_N, name + ": d_N " + show(cl.d_N) + " vs oracle " + show(rep.oracle_d_N));
    }
  }
  return c;
}

Checks criterion9() {
  Checks c;
  HomogeneousMatrixPolynomial lin(2, 2, 1), quad(2, 2, 2);
  CMatrix e00 = CMatrix::Zero(2, 2), e11 = CMatrix::Zero(2, 2);
  e00(0, 0) = 1.0;
  e11(1, 1) = 1.0;
  lin.add({1, 0}, e00);
  quad.add({2, 0}, e11);
  quad.add({0, 2}, e11);
  const auto fam = TaylorFamily::from_terms(2, 2, {lin, quad});
  for (int N = 0; N <= 4; ++N) {
    const auto got = static_cast<std::int64_t>(lambda_N_kernel(fam, N).dimension);
    c.expect(got == 3 * N + 2, "N=" + std::to_string(N) + ": kernel " + std::to_string(got));
    c.expect(dim_formula_mixed(2, N, {1, 2}) == 3 * N + 2, "mixed formula at N=" + std::to_string(N));
  }
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    double limit_s;
    std::function<Checks()> run;
  };
  const std::vector<Criterion> all{
      {1, "dimension formula vs ansatz oracle", 10.0, criterion1},
      {2, "Q-harmonic dimension depends on order only", 5.0, criterion2},
      {3, "Lambda_N kernel and cokernel map", 5.0, criterion3},
      {4, "local data recovery", 5.0, criterion4},
      {5, "Fermi machinery", 30.0, criterion5},
      {6, "Floquet characterization by differences", 10.0, criterion6},
      {7, "transform round trip and Parseval", 2.0, criterion7},
      {8, "Lambda(xi), Lambda_0 and classification", 5.0, criterion8},
      {9, "mixed-order corrected formula", 2.0, criterion9},
  };
  int failed = 0;
  for (const auto& cr : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Checks result;
    try {
      result = cr.run();
    } catch (const std::exception& e) {
      result.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > cr.limit_s) {
      std::ostringstream os;
      os << "runtime " << std::fixed << std::setprecision(2) << secs << " s exceeds " << cr.limit_s << " s";
      result.failures.push_back(os.str());
    }
    const bool ok = result.ok();
    if (!ok) ++failed;
    std::cout << "criterion " << cr.id << ": " << (ok ? "PASS" : "FAIL") << "  " << cr.title << "  (" << std::fixed
              << std::setprecision(2) << secs << " s)\n";
    for (std::size_t i = 0; i < result.failures.size() && i < 10; ++i) std::cout << "    - " << result.failures[i] << '\n';
    if (result.failures.size() > 10) std::cout << "    ... " << result.failures.size() - 10 << " more\n";
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criterion(s) failed") << '\n';
  return failed == 0 ? 0 : 1;
}
