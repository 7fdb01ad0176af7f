#pragma once

// Real Fermi surface F_{P,R} = { k in B : P(k) singular }: grid scan,
// refinement of individual points, finiteness heuristic, emptiness
// certificates and multiplicities.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "floquet/bloch.hpp"

namespace floquet {

namespace fermi_defaults {
inline constexpr double tol_fermi = 1e-9;      ///< relative to the grid max of |P(k)|
inline constexpr double merge_radius = 1e-6;
inline constexpr double refine_tol = 1e-10;    ///< sigma_min <= refine_tol * scale after refinement
inline constexpr int max_iter = 100;
inline constexpr double cluster_radius = 1e-6; ///< relative, for the eigenvalue cluster at 0
inline constexpr double doubling_ratio = 1.5;
}  // namespace fermi_defaults

inline int default_grid_resolution(std::size_t rank) {
  if (rank <= 2) return 64;
  if (rank == 3) return 24;
  return 12;
}

inline double sigma_min_at(const PeriodicGraphOperator& op, const RVector& k) {
  return min_singular_value(bloch_matrix_entries(op, k));
}

/// max over the grid of the spectral norm of P(k).
inline double operator_scale(const PeriodicGraphOperator& op, int grid_res) {
  const KGrid grid(op.n(), grid_res);
  double s = 0.0;
  for (std::size_t q = 0; q < grid.size(); ++q) s = std::max(s, spectral_norm(bloch_matrix_entries(op, grid.point(q))));
  return s > 0.0 ? s : 1.0;
}

inline double operator_scale(const PeriodicGraphOperator& op) {
  return operator_scale(op, default_grid_resolution(op.n()));
}

struct FermiCandidate {
  RVector k;
  double sigma = 0.0;
  std::size_t cluster = 0;
};

struct FermiScan {
  int grid_res = 0;
  double scale = 1.0;
  double grid_min_sigma = 0.0;
  std::vector<FermiCandidate> candidates;
  /// lowest-sigma candidate of each connected cluster, lexicographic by k
  std::vector<FermiCandidate> seeds;
};

/// A grid point is a candidate when it is a discrete local minimum of
/// sigma_min over its 3^n neighbourhood (ties within tol * scale allowed) and
/// sigma_min can still reach tol * scale inside the neighbouring cells,
/// judged by the Lipschitz bound of k -> P(k).
inline FermiScan scan_fermi(const PeriodicGraphOperator& op, int grid_res, double tol = fermi_defaults::tol_fermi) {
  if (grid_res < 8) fail(ErrorKind::precondition, "scan_fermi needs grid_res >= 8");
  const KGrid grid(op.n(), grid_res);
  const std::size_t total = grid.size();
  std::vector<double> sigma(total);
  double scale = 0.0;
  for (std::size_t q = 0; q < total; ++q) {
    const RVector s = singular_values(bloch_matrix_entries(op, grid.point(q)));
    sigma[q] = s(s.size() - 1);
    scale = std::max(scale, s(0));
  }
  if (scale <= 0.0) scale = 1.0;

  FermiScan scan;
  scan.grid_res = grid_res;
  scan.scale = scale;
  scan.grid_min_sigma = *std::min_element(sigma.begin(), sigma.end());

  const std::size_t n = op.n();
  const double reach = op.lipschitz_constant() * grid.spacing() * std::sqrt(static_cast<double>(n));
  const double ceiling = tol * scale + reach;
  const double tie = tol * scale;

  std::vector<std::vector<int>> offsets;
  {
    std::size_t count = 1;
    for (std::size_t i = 0; i < n; ++i) count *= 3;
    for (std::size_t c = 0; c < count; ++c) {
      std::vector<int> off(n);
      std::size_t x = c;
      bool zero = true;
      for (std::size_t i = 0; i < n; ++i) {
        off[i] = static_cast<int>(x % 3) - 1;
        x /= 3;
        zero = zero && off[i] == 0;
      }
      if (!zero) offsets.push_back(off);
    }
  }
  auto neighbour = [&](std::size_t q, const std::vector<int>& off) {
    auto idx = grid.index(q);
    for (std::size_t i = 0; i < n; ++i) idx[i] += off[i];
    return grid.flat(idx);
  };

  std::vector<long> cand_of(total, -1);
  for (std::size_t q = 0; q < total; ++q) {
    if (sigma[q] > ceiling) continue;
    bool local_min = true;
    for (const auto& off : offsets) {
      if (sigma[neighbour(q, off)] + tie < sigma[q]) {
        local_min = false;
        break;
      }
    }
    if (!local_min) continue;
    cand_of[q] = static_cast<long>(scan.candidates.size());
    scan.candidates.push_back(FermiCandidate{grid.point(q), sigma[q], 0});
  }

  // connected components of candidate points under 3^n adjacency
  std::vector<std::size_t> cand_flat;
  for (std::size_t q = 0; q < total; ++q)
    if (cand_of[q] >= 0) cand_flat.push_back(q);
  std::vector<long> comp(scan.candidates.size(), -1);
  std::size_t ncomp = 0;
  for (std::size_t c = 0; c < cand_flat.size(); ++c) {
    const auto start = static_cast<std::size_t>(cand_of[cand_flat[c]]);
    if (comp[start] >= 0) continue;
    std::vector<std::size_t> stack{cand_flat[c]};
    comp[start] = static_cast<long>(ncomp);
    while (!stack.empty()) {
      const std::size_t q = stack.back();
      stack.pop_back();
      for (const auto& off : offsets) {
        const std::size_t nb = neighbour(q, off);
        if (cand_of[nb] < 0) continue;
        auto& cc = comp[static_cast<std::size_t>(cand_of[nb])];
        if (cc >= 0) continue;
        cc = static_cast<long>(ncomp);
        stack.push_back(nb);
      }
    }
    ++ncomp;
  }
  std::vector<long> best(ncomp, -1);
  for (std::size_t i = 0; i < scan.candidates.size(); ++i) {
    scan.candidates[i].cluster = static_cast<std::size_t>(comp[i]);
    auto& b = best[static_cast<std::size_t>(comp[i])];
    if (b < 0 || scan.candidates[i].sigma < scan.candidates[static_cast<std::size_t>(b)].sigma) b = static_cast<long>(i);
  }
  for (long b : best) scan.seeds.push_back(scan.candidates[static_cast<std::size_t>(b)]);
  return scan;
}

struct FermiPoint {
  RVector k0;
  double sigma_min = 0.0;
  int r_geom = 0;
  int r_alg = 0;
  bool converged = false;
  int iterations = 0;
};

namespace detail {

/// Gradient of sigma_min(P(k))^2 from the singular vectors and exact dP/dk_i.
inline RVector sigma2_gradient(const PeriodicGraphOperator& op, const RVector& k) {
  const CMatrix p = bloch_matrix_entries(op, k);
  Eigen::JacobiSVD<CMatrix> svd(p, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Index last = p.rows() - 1;
  const double s = svd.singularValues()(last);
  const CVector u = svd.matrixU().col(last);
  const CVector v = svd.matrixV().col(last);
  const auto n = static_cast<Eigen::Index>(op.n());
  RVector g(n);
  const CVector kc = k.cast<cplx>();
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<int> alpha(op.n(), 0);
    alpha[static_cast<std::size_t>(i)] = 1;
    const CMatrix d = bloch_derivative(op, kc, alpha);
    g(i) = 2.0 * s * (u.adjoint() * d * v)(0).real();
  }
  return g;
}

inline double golden_min(const std::function<double(double)>& f, double a, double b, int iters = 90) {
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - ratio * (b - a);
  double x2 = a + ratio * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < iters && b - a > 0.0; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

/// Nearest p*pi/q with q <= 12 within `radius`, preferring small denominators.
inline std::optional<double> snap_to_rational_pi(double x, double radius) {
  for (int q = 1; q <= 12; ++q) {
    const double p = std::round(x * q / pi);
    const double y = p * pi / q;
    if (std::abs(y - x) <= radius) return y;
  }
  return std::nullopt;
}

}  // namespace detail

/// Refines a scan seed: Newton on sigma_min^2 (finite-difference Hessian of
/// the exact gradient), then per-axis golden-section sweeps on sigma_min, then
/// an attempt to snap onto rational multiples of pi. The point is flagged as
/// converged when sigma_min <= refine_tol * scale.
inline FermiPoint refine_fermi_point(const PeriodicGraphOperator& op, const RVector& seed, double scale,
                                     double search_radius) {
  const auto n = static_cast<Eigen::Index>(op.n());
  auto sig = [&](const RVector& k) { return sigma_min_at(op, k); };
  RVector k = seed;
  double s = sig(k);
  const double floor = 1e-16 * scale;
  int it = 0;

  for (; it < fermi_defaults::max_iter && s > floor; ++it) {
    const RVector grad = detail::sigma2_gradient(op, k);
    const double h = 1e-6;
    RMatrix hess(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      RVector kp = k, km = k;
      kp(j) += h;
      km(j) -= h;
      hess.col(j) = (detail::sigma2_gradient(op, kp) - detail::sigma2_gradient(op, km)) / (2.0 * h);
    }
    hess = 0.5 * (hess + hess.transpose()).eval();
    Eigen::LDLT<RMatrix> ldlt(hess);
    RVector step = -grad;
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) step = ldlt.solve(-grad);
    if (!step.allFinite()) break;
    if (step.norm() > search_radius) step *= search_radius / step.norm();
    bool accepted = false;
    for (int half = 0; half < 30; ++half) {
      const RVector trial = k + step;
      const double st = sig(trial);
      if (st < s) {
        k = trial;
        s = st;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || step.norm() < 1e-15) break;
  }

  double width = search_radius;
  for (int sweep = 0; sweep < 40 && s > floor; ++sweep) {
    double moved = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      auto line = [&](double x) {
        RVector t = k;
        t(j) = x;
        return sig(t);
      };
      const double x = detail::golden_min(line, k(j) - width, k(j) + width);
      const double sx = line(x);
      if (sx < s) {
        moved = std::max(moved, std::abs(x - k(j)));
        k(j) = x;
        s = sx;
      }
    }
    if (moved < 1e-15) break;
    width = std::max(10.0 * moved, 1e-12);
  }

  // Near a multiple root sigma_min is at roundoff level on a whole interval;
  // move to the middle of that interval on each axis.
  const double flat = 4.0 * std::numeric_limits<double>::epsilon() * scale;
  if (s <= flat) {
    for (Eigen::Index j = 0; j < n; ++j) {
      auto below = [&](double x) {
        RVector t = k;
        t(j) = x;
        return sig(t) <= flat;
      };
      auto edge = [&](double dir) {
        double in = 0.0, out = 1e-12;
        while (below(k(j) + dir * out) && out < 1e-3) in = out, out *= 2.0;
        for (int b = 0; b < 60; ++b) {
          const double mid = 0.5 * (in + out);
          (below(k(j) + dir * mid) ? in : out) = mid;
        }
        return k(j) + dir * in;
      };
      k(j) = 0.5 * (edge(1.0) + edge(-1.0));
    }
    s = sig(k);
  }

  {
    RVector snapped = k;
    bool any = false;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (auto y = detail::snap_to_rational_pi(k(j), 1e-3)) {
        snapped(j) = *y;
        any = true;
      }
    }
    if (any) {
      const double ss = sig(snapped);
      if (ss <= std::max(s, 8.0 * std::numeric_limits<double>::epsilon() * scale)) {
        k = snapped;
        s = ss;
      }
    }
  }

  FermiPoint fp;
  fp.k0 = reduce_to_zone(k);
  fp.sigma_min = s;
  fp.converged = s <= fermi_defaults::refine_tol * scale;
  fp.iterations = it;
  return fp;
}

inline FermiPoint refine_fermi_point(const PeriodicGraphOperator& op, const RVector& seed) {
  const int res = default_grid_resolution(op.n());
  return refine_fermi_point(op, seed, operator_scale(op, res), 2.0 * pi / res);
}

/// (r_geom, r_alg) at k0: r_geom counts singular values below tol_fermi * scale,
/// r_alg counts eigenvalues of P(k0) within cluster_radius * max(|P(k0)|, scale) of 0.
inline std::pair<int, int> multiplicities(const PeriodicGraphOperator& op, const RVector& k0, double scale) {
  const CMatrix p = bloch_matrix_entries(op, k0);
  const RVector s = singular_values(p);
  int geom = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) < fermi_defaults::tol_fermi * scale) ++geom;
  if (geom == 0) fail(ErrorKind::precondition, "multiplicities: k0 is not a Fermi point (P(k0) is invertible)");
  const double radius = fermi_defaults::cluster_radius * std::max(s(0), scale);
  const CVector ev = complex_eigenvalues(p);
  int alg = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) <= radius) ++alg;
  alg = std::max(alg, geom);
  return {geom, alg};
}

inline std::pair<int, int> multiplicities(const PeriodicGraphOperator& op, const RVector& k0) {
  return multiplicities(op, k0, operator_scale(op));
}

struct EmptinessCertificate {
  double bound = 0.0;  ///< lower bound on min_k sigma_min(P(k)) over all of B
  double grid_min = 0.0;
  double lipschitz = 0.0;
  int grid_res = 0;
  bool certified() const { return bound > 0.0; }
};

/// Grid minimum of sigma_min minus Lipschitz constant times the covering
/// radius of the grid. A positive bound proves the real Fermi surface empty.
inline EmptinessCertificate certify_empty(const PeriodicGraphOperator& op, int grid_res) {
  const KGrid grid(op.n(), grid_res);
  double mn = std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < grid.size(); ++q) mn = std::min(mn, sigma_min_at(op, grid.point(q)));
  EmptinessCertificate c;
  c.grid_min = mn;
  c.lipschitz = op.lipschitz_constant();
  c.grid_res = grid_res;
  c.bound = mn - c.lipschitz * 0.5 * grid.spacing() * std::sqrt(static_cast<double>(op.n()));
  return c;
}

enum class FermiVerdict { empty, finite, likely_positive_dimensional };

inline const char* to_string(FermiVerdict v) {
  switch (v) {
    case FermiVerdict::empty: return "empty";
    case FermiVerdict::finite: return "finite";
    case FermiVerdict::likely_positive_dimensional: return "likely_positive_dimensional";
  }
  return "unknown";
}

struct FermiSurfaceReport {
  FermiVerdict verdict = FermiVerdict::empty;
  std::vector<FermiPoint> points;  ///< converged, pairwise distinct, lexicographic in k
  std::vector<FermiPoint> rejected;  ///< refinements that did not converge
  int grid_resolution = 0;
  double scale = 1.0;
  std::size_t candidates_coarse = 0;
  std::size_t candidates_fine = 0;
  std::optional<EmptinessCertificate> certificate;
  std::vector<std::string> diagnostics;
};

/// Finiteness is decided heuristically: the candidate count has to stay
/// bounded (ratio < 1.5) when the grid is doubled.
inline FermiSurfaceReport real_fermi_surface(const PeriodicGraphOperator& op, int grid_res) {
  FermiSurfaceReport rep;
  rep.grid_resolution = grid_res;
  const FermiScan coarse = scan_fermi(op, grid_res);
  const FermiScan fine = scan_fermi(op, 2 * grid_res);
  rep.scale = coarse.scale;
  rep.candidates_coarse = coarse.candidates.size();
  rep.candidates_fine = fine.candidates.size();

  if (coarse.candidates.empty() && fine.candidates.empty()) {
    rep.verdict = FermiVerdict::empty;
    rep.certificate = certify_empty(op, grid_res);
    if (!rep.certificate->certified()) rep.diagnostics.push_back("no candidates, but the emptiness bound is not positive");
    return rep;
  }
  if (coarse.candidates.empty() ||
      static_cast<double>(fine.candidates.size()) >= fermi_defaults::doubling_ratio * static_cast<double>(coarse.candidates.size())) {
    rep.verdict = FermiVerdict::likely_positive_dimensional;
    rep.diagnostics.push_back("candidate count grows under grid doubling: " + std::to_string(coarse.candidates.size()) +
                              " -> " + std::to_string(fine.candidates.size()));
    return rep;
  }

  for (const auto& seed : fine.seeds) {
    FermiPoint fp = refine_fermi_point(op, seed.k, rep.scale, 2.0 * pi / fine.grid_res);
    if (!fp.converged) {
      rep.rejected.push_back(fp);
      continue;
    }
    bool duplicate = false;
    for (const auto& other : rep.points)
      if (torus_distance(other.k0, fp.k0) <= fermi_defaults::merge_radius) duplicate = true;
    if (duplicate) continue;
    auto [g, a] = multiplicities(op, fp.k0, rep.scale);
    fp.r_geom = g;
    fp.r_alg = a;
    rep.points.push_back(fp);
  }
  std::sort(rep.points.begin(), rep.points.end(), [](const FermiPoint& a, const FermiPoint& b) {
    return std::lexicographical_compare(a.k0.data(), a.k0.data() + a.k0.size(), b.k0.data(), b.k0.data() + b.k0.size());
  });
  if (!rep.rejected.empty())
    rep.diagnostics.push_back(std::to_string(rep.rejected.size()) + " candidate(s) did not converge and were excluded");

  if (rep.points.empty()) {
    rep.verdict = FermiVerdict::empty;
    rep.certificate = certify_empty(op, grid_res);
    if (!rep.certificate->certified()) rep.diagnostics.push_back("no converged Fermi point, emptiness not certified");
  } else {
    rep.verdict = FermiVerdict::finite;
  }
  return rep;
}

inline FermiSurfaceReport real_fermi_surface(const PeriodicGraphOperator& op) {
  return real_fermi_surface(op, default_grid_resolution(op.n()));
}

}  // namespace floquet
