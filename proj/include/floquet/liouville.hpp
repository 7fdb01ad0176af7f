#pragma once

// Liouville dimensions d_N, explicit Floquet solutions
// u(g, v) = e^{i k.g} sum_{|j|<=N} g^j p_j(v) found by a direct ansatz solve,
// residual/growth verification, and the twisted-difference characterization
// of Floquet functions.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "floquet/fermi.hpp"
#include "floquet/localdata.hpp"
#include "floquet/polyalg.hpp"

namespace floquet {

namespace liouville_defaults {
inline constexpr double residual_tol = 1e-9;
inline constexpr double ansatz_rank_tol = 1e-9;
inline constexpr double coefficient_tol = 1e-9;
}  // namespace liouville_defaults

/// Floquet function with quasimomentum k and periodic coefficients p_j.
struct FloquetSolution {
  RVector k;
  int order = 0;
  std::map<MultiIndex, CVector> coeffs;  ///< p_j over cell vertices, |j| <= order

  cplx evaluate(const DeckIndex& g, std::size_t v) const {
    cplx poly = 0.0;
    for (const auto& [j, p] : coeffs) {
      cplx mono = 1.0;
      for (std::size_t i = 0; i < j.size(); ++i)
        for (int e = 0; e < j[i]; ++e) mono *= static_cast<double>(g[i]);
      poly += mono * p(static_cast<Eigen::Index>(v));
    }
    return std::exp(I * g.dot(k)) * poly;
  }

  WindowFunction on_window(const Box& box, std::size_t vertex_count) const {
    return WindowFunction::from(box, vertex_count, [&](const DeckIndex& g, std::size_t v) { return evaluate(g, v); });
  }

  /// Largest |j| with a coefficient above tol (relative to the largest one).
  int exact_order(double rel_tol = liouville_defaults::coefficient_tol) const {
    double top = 0.0;
    for (const auto& [j, p] : coeffs) top = std::max(top, p.cwiseAbs().maxCoeff());
    int ord = -1;
    for (const auto& [j, p] : coeffs)
      if (p.cwiseAbs().maxCoeff() > rel_tol * top) ord = std::max(ord, j.degree());
    return ord;
  }
};

/// Linear system for the p_j obtained from P applied to the ansatz. Rows
/// (beta, v) collect the coefficient of g^beta in (Pu)(g, v) e^{-i k.g}:
/// sum_t w_t e^{i k.s_t} sum_{j >= beta} C(j, beta) s_t^{j-beta} p_j(t.to).
inline CMatrix ansatz_matrix(const PeriodicGraphOperator& op, const RVector& k, int N) {
  const auto monos = monomials_up_to(op.n(), N);
  const std::size_t m = op.vertex_count();
  const auto dim = static_cast<Eigen::Index>(monos.size() * m);
  CMatrix a = CMatrix::Zero(dim, dim);
  for (std::size_t bi = 0; bi < monos.size(); ++bi) {
    const auto& beta = monos[bi];
    for (std::size_t ji = 0; ji < monos.size(); ++ji) {
      const auto& j = monos[ji];
      if (!j.dominates(beta)) continue;
      const MultiIndex diff = j - beta;
      const double binom = j.binomial_over(beta);
      for (const auto& t : op.terms()) {
        double spow = 1.0;
        for (std::size_t i = 0; i < diff.size(); ++i)
          for (int e = 0; e < diff[i]; ++e) spow *= static_cast<double>(t.shift[i]);
        if (spow == 0.0) continue;
        a(static_cast<Eigen::Index>(bi * m + t.from), static_cast<Eigen::Index>(ji * m + t.to)) +=
            t.weight * std::exp(I * t.shift.dot(k)) * binom * spow;
      }
      if (bi == ji && op.energy_shift() != 0.0)
        for (std::size_t v = 0; v < m; ++v)
          a(static_cast<Eigen::Index>(bi * m + v), static_cast<Eigen::Index>(ji * m + v)) -= op.energy_shift();
    }
  }
  return a;
}

/// Basis of Floquet solutions of order <= N with quasimomentum k0, from the
/// kernel of the ansatz system. Independent of the local-data machinery.
inline std::vector<FloquetSolution> build_floquet_solutions(const PeriodicGraphOperator& op, const RVector& k0, int N) {
  if (N < 0) fail(ErrorKind::precondition, "order must be nonnegative");
  const auto monos = monomials_up_to(op.n(), N);
  const std::size_t m = op.vertex_count();
  // the floor keeps roundoff in e^{ik.s} (e.g. at k = pi) from counting as rank
  const double floor = 1e-12 * std::max(1.0, op.weight_scale());
  const auto ker = null_space(ansatz_matrix(op, k0, N), liouville_defaults::ansatz_rank_tol, floor);

  // Echelon form with pivots taken from the highest-degree rows down, so each
  // basis element has a unit leading coefficient at its exact order.
  CMatrix kt = ker.basis.transpose();
  const Eigen::Index rows = kt.rows();
  Eigen::Index lead = 0;
  for (Eigen::Index col = kt.cols() - 1; col >= 0 && lead < rows; --col) {
    Eigen::Index piv = lead;
    double best = 0.0;
    for (Eigen::Index i = lead; i < rows; ++i)
      if (std::abs(kt(i, col)) > best) best = std::abs(kt(i, col)), piv = i;
    if (best < 1e-10) continue;
    kt.row(lead).swap(kt.row(piv));
    kt.row(lead) /= kt(lead, col);
    for (Eigen::Index i = 0; i < rows; ++i)
      if (i != lead) kt.row(i) -= kt(i, col) * kt.row(lead);
    ++lead;
  }

  std::vector<FloquetSolution> out;
  for (Eigen::Index c = 0; c < rows; ++c) {
    const CVector col = kt.row(c).transpose();
    FloquetSolution sol{k0, N, {}};
    for (std::size_t ji = 0; ji < monos.size(); ++ji) {
      CVector p = col.segment(static_cast<Eigen::Index>(ji * m), static_cast<Eigen::Index>(m));
      for (Eigen::Index i = 0; i < p.size(); ++i)
        if (std::abs(p(i)) < 1e-11) p(i) = 0.0;
      if (p.cwiseAbs().maxCoeff() > 0.0) sol.coeffs.emplace(monos[ji], p);
    }
    sol.order = std::max(0, sol.exact_order());
    out.push_back(std::move(sol));
  }
  return out;
}

struct SolutionCheck {
  double residual = 0.0;         ///< max |Pu| on the window interior
  double growth_constant = 0.0;  ///< max |u(g,v)| / (1+|g|)^N
  double growth_exponent = 0.0;  ///< least-squares slope of log shell max vs log |g|_1 over shells |g|_1 >= 1
};

inline SolutionCheck verify_solution(const PeriodicGraphOperator& op, const FloquetSolution& u, std::int64_t R) {
  const Box box = Box::centered(op.n(), R);
  const WindowFunction w = u.on_window(box, op.vertex_count());
  SolutionCheck chk;
  chk.residual = apply_operator(op, w).max_abs();

  std::map<std::int64_t, double> shell;
  box.for_each([&](const DeckIndex& g) {
    double mx = 0.0;
    for (std::size_t v = 0; v < op.vertex_count(); ++v) mx = std::max(mx, std::abs(w.at(g, v)));
    const auto r = g.l1_norm();
    chk.growth_constant = std::max(chk.growth_constant, mx / std::pow(1.0 + static_cast<double>(r), u.order));
    shell[r] = std::max(shell[r], mx);
  });
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (const auto& [r, mx] : shell) {
    if (r == 0 || mx <= 0.0) continue;
    const double x = std::log(static_cast<double>(r));
    const double y = std::log(mx);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++cnt;
  }
  if (cnt >= 2) chk.growth_exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  return chk;
}

/// (Delta_{g;k} u)(h, v) = e^{-i k.g} u(h + g, v) - u(h, v) on the part of the
/// window where h + g stays inside.
inline WindowFunction twisted_difference(const WindowFunction& u, const DeckIndex& g, const RVector& k) {
  const Box& in = u.window();
  if (g.size() != in.rank()) fail(ErrorKind::precondition, "shift rank does not match window rank");
  Box out_box = in;
  for (std::size_t i = 0; i < in.rank(); ++i) {
    out_box.lo[i] = std::max(in.lo[i], in.lo[i] - g[i]);
    out_box.hi[i] = std::min(in.hi[i], in.hi[i] - g[i]);
  }
  if (out_box.empty()) fail(ErrorKind::precondition, "window exhausted by twisted differences");
  const cplx twist = std::exp(-I * g.dot(k));
  return WindowFunction::from(out_box, u.vertex_count(), [&](const DeckIndex& h, std::size_t v) {
    return twist * u.at(h + g, v) - u.at(h, v);
  });
}

/// Delta_{g_1} ... Delta_{g_M} u (rightmost applied first).
inline WindowFunction iterated_difference(const WindowFunction& u, const std::vector<DeckIndex>& shifts, const RVector& k) {
  WindowFunction w = u;
  for (auto it = shifts.rbegin(); it != shifts.rend(); ++it) w = twisted_difference(w, *it, k);
  return w;
}

/// True iff every iterated difference of order N+1 over the standard
/// generators (with repetition) vanishes on the window, to 1e-9 relative to
/// max(1, max |u|).
inline bool floquet_order_test(const WindowFunction& u, const RVector& k, int N) {
  const std::size_t n = u.window().rank();
  for (std::size_t i = 0; i < n; ++i)
    if (u.window().extent(i) < N + 2) fail(ErrorKind::precondition, "window too small for order-(N+1) differences");
  const double tol = liouville_defaults::residual_tol * std::max(1.0, u.max_abs());
  for (const auto& counts : monomials_of_degree(n, N + 1)) {
    std::vector<DeckIndex> shifts;
    for (std::size_t i = 0; i < n; ++i)
      for (int c = 0; c < counts[i]; ++c) shifts.push_back(DeckIndex::unit(n, i));
    if (iterated_difference(u, shifts, k).max_abs() > tol) return false;
  }
  return true;
}

enum class LiouvilleVerdict { holds, fails, vacuous };

inline const char* to_string(LiouvilleVerdict v) {
  switch (v) {
    case LiouvilleVerdict::holds: return "holds";
    case LiouvilleVerdict::fails: return "fails";
    case LiouvilleVerdict::vacuous: return "vacuous";
  }
  return "unknown";
}

/// Which computation produced a point's dimension numbers.
enum class DimensionPath { formula, lambda_kernel, oracle };

inline const char* to_string(DimensionPath p) {
  switch (p) {
    case DimensionPath::formula: return "formula";
    case DimensionPath::lambda_kernel: return "lambda_N_kernel";
    case DimensionPath::oracle: return "oracle";
  }
  return "unknown";
}

struct FermiPointContribution {
  RVector k;
  int r_geom = 0;
  int r_alg = 0;
  std::optional<int> l0;
  bool nondegenerate = false;
  DimensionPath path = DimensionPath::oracle;
  std::vector<std::int64_t> contribution;         ///< per N, from `path`
  std::vector<std::int64_t> oracle_contribution;  ///< per N, ansatz kernel
  std::vector<std::string> caveats;
};

struct LiouvilleReport {
  LiouvilleVerdict verdict = LiouvilleVerdict::fails;
  int N_max = 0;
  FermiSurfaceReport fermi;
  std::vector<FermiPointContribution> points;
  std::vector<std::int64_t> d_N;
  std::vector<std::int64_t> oracle_d_N;
  std::vector<std::string> diagnostics;
};

/// d_N = sum over the real Fermi surface of the Floquet-solution dimension at
/// each point: dim_formula(n, N, r, l0) when lambda_{l0} is nondegenerate,
/// otherwise the Lambda_N kernel (r_geom == r_alg) or the ansatz oracle.
inline LiouvilleReport liouville_dimension(const PeriodicGraphOperator& op, int N_max, int grid_res, std::uint64_t seed = 0) {
  if (N_max < 0) fail(ErrorKind::precondition, "N_max must be nonnegative");
  LiouvilleReport rep;
  rep.N_max = N_max;
  rep.fermi = real_fermi_surface(op, grid_res);
  rep.d_N.assign(static_cast<std::size_t>(N_max + 1), 0);
  rep.oracle_d_N.assign(static_cast<std::size_t>(N_max + 1), 0);

  switch (rep.fermi.verdict) {
    case FermiVerdict::likely_positive_dimensional:
      rep.verdict = LiouvilleVerdict::fails;
      rep.d_N.clear();
      rep.oracle_d_N.clear();
      rep.diagnostics.push_back("real Fermi surface is likely positive dimensional: Liouville property fails");
      return rep;
    case FermiVerdict::empty:
      rep.verdict = LiouvilleVerdict::vacuous;
      if (!rep.fermi.certificate || !rep.fermi.certificate->certified())
        rep.diagnostics.push_back("empty Fermi surface is not certified at this grid resolution");
      return rep;
    case FermiVerdict::finite:
      rep.verdict = LiouvilleVerdict::holds;
      break;
  }

  const auto n = static_cast<std::int64_t>(op.n());
  for (const auto& fp : rep.fermi.points) {
    FermiPointContribution c;
    c.k = fp.k0;
    c.r_geom = fp.r_geom;
    c.r_alg = fp.r_alg;
    for (int N = 0; N <= N_max; ++N)
      c.oracle_contribution.push_back(static_cast<std::int64_t>(build_floquet_solutions(op, fp.k0, N).size()));

    std::optional<LocalSpectralData> local;
    try {
      local = taylor_expand(op, fp.k0, local_defaults::L_max, local_defaults::tol_zero, seed);
    } catch (const Error& e) {
      c.caveats.push_back(std::string("local data unavailable: ") + e.what());
    }
    if (local) {
      c.l0 = local->l0;
      c.nondegenerate = local->nondegenerate;
    }

    if (fp.r_geom < fp.r_alg) {
      c.path = DimensionPath::oracle;
      c.caveats.push_back("geometric and algebraic multiplicities differ; ansatz oracle used");
    } else if (local && local->nondegenerate && local->l0 && *local->l0 >= 1) {
      c.path = DimensionPath::formula;
    } else if (local && local->l0) {
      c.path = DimensionPath::lambda_kernel;
      c.caveats.push_back("det lambda_l0 vanishes on all sampled directions; Lambda_N kernel used");
    } else {
      c.path = DimensionPath::oracle;
    }

    for (int N = 0; N <= N_max; ++N) {
      std::int64_t d = 0;
      switch (c.path) {
        case DimensionPath::formula: d = dim_formula(n, N, local->r, *local->l0); break;
        case DimensionPath::lambda_kernel: d = static_cast<std::int64_t>(lambda_N_kernel(local->taylor, N).dimension); break;
        case DimensionPath::oracle: d = c.oracle_contribution[static_cast<std::size_t>(N)]; break;
      }
      c.contribution.push_back(d);
      rep.d_N[static_cast<std::size_t>(N)] += d;
      rep.oracle_d_N[static_cast<std::size_t>(N)] += c.oracle_contribution[static_cast<std::size_t>(N)];
    }
    if (c.contribution != c.oracle_contribution) c.caveats.push_back("dimension path disagrees with the ansatz oracle");
    rep.points.push_back(std::move(c));
  }
  if (rep.d_N != rep.oracle_d_N) rep.diagnostics.push_back("d_N differs from the brute-force oracle");
  return rep;
}

inline LiouvilleReport liouville_dimension(const PeriodicGraphOperator& op, int N_max) {
  return liouville_dimension(op, N_max, default_grid_resolution(op.n()));
}

}  // namespace floquet
