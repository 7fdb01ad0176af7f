#pragma once

// Principal eigenvalue Lambda(xi) of the real-twisted cell matrix for
// operators of the form L = D - W (W >= 0), its maximization to Lambda_0 and
// the vacuous / noncritical / critical classification.

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "floquet/combinatorics.hpp"
#include "floquet/model.hpp"

namespace floquet {

namespace positive_defaults {
inline constexpr double eigen_residual = 1e-10;
inline constexpr double gradient_tol = 1e-8;
inline constexpr double bracket_limit = 100.0;
inline constexpr double classify_tol = 1e-8;
inline constexpr int concavity_pairs = 50;
inline constexpr double concavity_slack = 1e-9;
}  // namespace positive_defaults

/// L(xi)_{v,v'} = sum_{t: v -> v'} w_t e^{xi.s_t} - energy_shift delta_{vv'}.
inline RMatrix twisted_matrix(const PeriodicGraphOperator& op, const RVector& xi) {
  const auto m = static_cast<Eigen::Index>(op.vertex_count());
  RMatrix l = RMatrix::Zero(m, m);
  for (const auto& t : op.terms())
    l(static_cast<Eigen::Index>(t.from), static_cast<Eigen::Index>(t.to)) += t.weight.real() * std::exp(t.shift.dot(xi));
  l.diagonal().array() -= op.energy_shift();
  return l;
}

/// Strong connectivity of the cell graph built from nonzero off-diagonal
/// couplings (any shift).
inline bool cell_graph_irreducible(const PeriodicGraphOperator& op) {
  const std::size_t m = op.vertex_count();
  std::vector<std::vector<bool>> adj(m, std::vector<bool>(m, false));
  for (const auto& [key, w] : op.aggregated()) {
    const auto& [from, to, shift] = key;
    if (from != to && std::abs(w) > 0.0) adj[from][to] = true;
  }
  auto reach_all = [&](bool reverse) {
    std::vector<bool> seen(m, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t u = 0; u < m; ++u)
        if (!seen[u] && (reverse ? adj[u][v] : adj[v][u])) seen[u] = true, stack.push_back(u);
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  };
  return reach_all(false) && reach_all(true);
}

inline void require_positive_structure(const PeriodicGraphOperator& op) {
  const double tol = 1e-14 * std::max(1.0, op.weight_scale());
  if (!detail::has_positive_structure(op, tol))
    fail(ErrorKind::precondition, "operator lacks the positivity structure L = D - W with W >= 0");
  if (!cell_graph_irreducible(op)) fail(ErrorKind::precondition, "cell graph is reducible: Perron root need not be simple");
}

struct PrincipalEigen {
  double lambda = 0.0;
  RVector vector;  ///< positive, unit 1-norm
  double residual = 0.0;
  int iterations = 0;
};

namespace detail {

inline PrincipalEigen perron(const RMatrix& l, RVector x, int max_iter = 200000) {
  const auto m = l.rows();
  const double d_max = l.diagonal().maxCoeff() + 1.0;
  const RMatrix b = d_max * RMatrix::Identity(m, m) - l;
  x /= x.sum();
  double rho = 0.0;
  int it = 0;
  for (; it < max_iter; ++it) {
    RVector y = b * x;
    rho = y.sum();  // x has unit 1-norm and y >= 0
    y /= rho;
    const double change = (y - x).cwiseAbs().maxCoeff();
    x = y;
    if (change < 1e-15) break;
  }
  // A few shifted inverse steps remove the remaining power-iteration error.
  for (int polish = 0; polish < 3; ++polish) {
    const double res = (l * x - (d_max - rho) * x).norm();
    if (res <= 1e-13 * std::max(1.0, std::abs(d_max))) break;
    const Eigen::FullPivLU<RMatrix> lu(b - (rho * (1.0 + 1e-12) + 1e-14) * RMatrix::Identity(m, m));
    RVector y = lu.solve(x);
    y /= y.sum();
    x = y;
    rho = (b * x).sum();
  }
  PrincipalEigen out;
  out.lambda = d_max - rho;
  out.vector = x;
  out.residual = (l * x - out.lambda * x).norm();
  out.iterations = it;
  return out;
}

}  // namespace detail

/// Lambda(xi) = d_max - (Perron root of d_max I - L(xi)), d_max = max diag + 1.
inline PrincipalEigen principal_eigenvalue(const PeriodicGraphOperator& op, const RVector& xi,
                                           std::optional<RVector> start = std::nullopt) {
  require_positive_structure(op);
  if (xi.size() != static_cast<Eigen::Index>(op.n())) fail(ErrorKind::precondition, "xi has the wrong length");
  const auto m = static_cast<Eigen::Index>(op.vertex_count());
  RVector x0 = start ? *start : RVector::Ones(m);
  if (x0.size() != m || (x0.array() <= 0.0).any()) fail(ErrorKind::precondition, "start vector must be positive");
  auto pe = detail::perron(twisted_matrix(op, xi), x0);
  if (pe.residual > positive_defaults::eigen_residual)
    fail(ErrorKind::numerical, "power iteration did not reach the eigen-residual tolerance");
  return pe;
}

inline double lambda_at(const PeriodicGraphOperator& op, const RVector& xi) {
  return detail::perron(twisted_matrix(op, xi), RVector::Ones(static_cast<Eigen::Index>(op.vertex_count()))).lambda;
}

struct ConcavitySample {
  RVector xi;
  RVector eta;
  double margin = 0.0;  ///< Lambda(mid) - (Lambda(xi) + Lambda(eta)) / 2
};

struct LambdaProfile {
  double lambda0 = 0.0;
  RVector xi_star;
  double lambda_at_zero = 0.0;
  double gradient_norm = 0.0;
  RMatrix hessian;
  bool hessian_negative_definite = false;
  std::uint64_t seed = 0;
  std::vector<ConcavitySample> concavity;
  bool concavity_certified = false;
  int sweeps = 0;
};

namespace detail {

inline RVector lambda_gradient(const PeriodicGraphOperator& op, const RVector& xi, double h = 1e-5) {
  RVector g(xi.size());
  for (Eigen::Index i = 0; i < xi.size(); ++i) {
    RVector a = xi, b = xi;
    a(i) += h;
    b(i) -= h;
    g(i) = (lambda_at(op, a) - lambda_at(op, b)) / (2.0 * h);
  }
  return g;
}

inline RMatrix lambda_hessian(const PeriodicGraphOperator& op, const RVector& xi, double h = 1e-4) {
  const auto n = xi.size();
  RMatrix hess(n, n);
  const double f0 = lambda_at(op, xi);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      auto f = [&](double di, double dj) {
        RVector p = xi;
        p(i) += di;
        p(j) += dj;
        return lambda_at(op, p);
      };
      double v;
      if (i == j) v = (f(h, 0) - 2.0 * f0 + f(-h, 0)) / (h * h);
      else v = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
      hess(i, j) = hess(j, i) = v;
    }
  return hess;
}

/// Maximizes t -> Lambda(xi + t e_axis) by bracket expansion and golden section.
inline double line_maximize(const PeriodicGraphOperator& op, RVector& xi, Eigen::Index axis) {
  auto f = [&](double t) {
    RVector p = xi;
    p(axis) = t;
    return lambda_at(op, p);
  };
  const double x0 = xi(axis);
  double step = 0.5;
  double a = x0 - step, b = x0, c = x0 + step;
  double fa = f(a), fb = f(b), fc = f(c);
  while (!(fb >= fa && fb >= fc)) {
    if (fc > fb) {
      a = b, fa = fb;
      b = c, fb = fc;
      step *= 2.0;
      c = b + step, fc = f(c);
    } else {
      c = b, fc = fb;
      b = a, fb = fa;
      step *= 2.0;
      a = b - step, fa = f(a);
    }
    if (std::abs(a) > positive_defaults::bracket_limit || std::abs(c) > positive_defaults::bracket_limit)
      fail(ErrorKind::numerical, "no maximum: Lambda keeps increasing beyond the bracket limit");
  }
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = a, hi = c;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-11 * std::max(1.0, std::abs(b))) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2, f1 = f2;
      x2 = lo + gr * (hi - lo), f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1, f2 = f1;
      x1 = hi - gr * (hi - lo), f1 = f(x1);
    }
  }
  xi(axis) = 0.5 * (lo + hi);
  return std::abs(xi(axis) - x0);
}

}  // namespace detail

/// Lambda_0 = max_xi Lambda(xi): coordinate golden-section ascent, then
/// Newton polish until the gradient estimate drops below 1e-8. Emits 50
/// sampled midpoint-concavity checks in the box xi* +- 2.
inline LambdaProfile maximize_lambda(const PeriodicGraphOperator& op, std::uint64_t seed = 0) {
  require_positive_structure(op);
  const auto n = static_cast<Eigen::Index>(op.n());
  LambdaProfile prof;
  prof.seed = seed;
  RVector xi = RVector::Zero(n);
  prof.lambda_at_zero = principal_eigenvalue(op, xi).lambda;

  for (int sweep = 0; sweep < 200; ++sweep) {
    double moved = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) moved = std::max(moved, detail::line_maximize(op, xi, i));
    prof.sweeps = sweep + 1;
    if (moved < 1e-10) break;
  }

  RVector grad = detail::lambda_gradient(op, xi);
  for (int it = 0; it < 20 && grad.norm() >= positive_defaults::gradient_tol; ++it) {
    const RMatrix hess = detail::lambda_hessian(op, xi);
    const RVector step = hess.fullPivLu().solve(-grad);
    const double before = lambda_at(op, xi);
    RVector trial = xi + step;
    if (!step.allFinite() || lambda_at(op, trial) < before - 1e-14) break;
    xi = trial;
    grad = detail::lambda_gradient(op, xi);
  }
  prof.xi_star = xi;
  prof.gradient_norm = grad.norm();
  prof.lambda0 = principal_eigenvalue(op, xi).lambda;
  prof.hessian = detail::lambda_hessian(op, xi);
  Eigen::SelfAdjointEigenSolver<RMatrix> hs(prof.hessian);
  prof.hessian_negative_definite = (hs.eigenvalues().array() < 0.0).all();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  prof.concavity_certified = true;
  for (int p = 0; p < positive_defaults::concavity_pairs; ++p) {
    ConcavitySample s;
    s.xi = RVector(n);
    s.eta = RVector(n);
    for (Eigen::Index i = 0; i < n; ++i) s.xi(i) = xi(i) + unif(rng);
    for (Eigen::Index i = 0; i < n; ++i) s.eta(i) = xi(i) + unif(rng);
    const RVector mid = 0.5 * (s.xi + s.eta);
    s.margin = lambda_at(op, mid) - 0.5 * (lambda_at(op, s.xi) + lambda_at(op, s.eta));
    if (s.margin < -positive_defaults::concavity_slack) prof.concavity_certified = false;
    prof.concavity.push_back(std::move(s));
  }
  return prof;
}

enum class LiouvilleCase { vacuous, noncritical, critical };

inline const char* to_string(LiouvilleCase c) {
  switch (c) {
    case LiouvilleCase::vacuous: return "vacuous";
    case LiouvilleCase::noncritical: return "noncritical";
    case LiouvilleCase::critical: return "critical";
  }
  return "unknown";
}

struct Classification {
  LiouvilleCase kind = LiouvilleCase::vacuous;
  LambdaProfile profile;
  std::vector<std::int64_t> d_N;  ///< N = 0..N_max
  bool check_fermi = false;       ///< Lambda(0) < 0: only "vacuous at 0" is claimed
  std::vector<std::string> notes;
};

/// Three-way case split on the signs of Lambda(0) and Lambda_0 (tolerance 1e-8).
inline Classification classify_liouville_case(const PeriodicGraphOperator& op, int N_max = 4, std::uint64_t seed = 0) {
  Classification cl;
  cl.profile = maximize_lambda(op, seed);
  const double tol = positive_defaults::classify_tol;
  const double l_zero = cl.profile.lambda_at_zero;
  const double l0 = cl.profile.lambda0;
  if (l0 < -tol) fail(ErrorKind::precondition, "Lambda_0 < 0: outside the hypothesis Lambda_0 >= 0");
  const auto n = static_cast<std::int64_t>(op.n());

  if (l_zero > tol) {
    cl.kind = LiouvilleCase::vacuous;
  } else if (l_zero < -tol) {
    cl.kind = LiouvilleCase::vacuous;
    cl.check_fermi = true;
    cl.notes.push_back("Lambda(0) < 0: vacuous at k = 0 only; other real Fermi points are not excluded (run fermi)");
  } else if (l0 > tol) {
    cl.kind = LiouvilleCase::noncritical;
  } else {
    cl.kind = LiouvilleCase::critical;
  }
  if (!cl.profile.concavity_certified) cl.notes.push_back("sampled midpoint concavity failed");

  for (int N = 0; N <= N_max; ++N) {
    std::int64_t d = 0;
    if (cl.kind == LiouvilleCase::noncritical) d = q_dim(n - 1, N);
    else if (cl.kind == LiouvilleCase::critical) d = h_dim(n, N);
    cl.d_N.push_back(d);
  }
  return cl;
}

}  // namespace floquet
