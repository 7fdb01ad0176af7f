#pragma once

// Local analytic data of the dispersion relation at a Fermi point k0:
// the Riesz projector of P*(-k) for the eigenvalue cluster at 0, the r x r
// matrix function lambda(k), its homogeneous Taylor terms, the leading order
// l0 and the nondegeneracy test for lambda_{l0}.
//
// Pairing convention: lambda(k)_{ij} = <e_j, P*(-k) Pi(k) e_i> with the
// orthonormal basis e_j of range Pi(k0) frozen at k0. For a scalar cell this
// is the eigenvalue branch of P*(-k) through 0.

#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "floquet/bloch.hpp"
#include "floquet/fermi.hpp"
#include "floquet/polyalg.hpp"

namespace floquet {

namespace local_defaults {
inline constexpr int contour_nodes = 64;
inline constexpr double tol_zero = 1e-7;
inline constexpr int L_max = 8;
inline constexpr double base_step = 1e-2;
inline constexpr double nondegeneracy_threshold = 1e-8;
inline constexpr int nondegeneracy_samples = 50;
}  // namespace local_defaults

struct SpectralProjector {
  RVector k;
  CMatrix matrix;
  double contour_radius = 0.0;
  int rank = 0;
};

/// P*(-k) for real k, with P* the dual under the bilinear pairing, so that
/// P*(-k) = P(k)^T is singular exactly on F_P. For real weights this is the
/// conjugate-transpose adjoint at -k as well.
inline CMatrix adjoint_bloch_at_minus(const PeriodicGraphOperator& op, const RVector& k) {
  return bloch_matrix_entries(bilinear_dual(op), RVector(-k));
}

/// Half the distance from 0 to the nearest eigenvalue of P*(-k0) outside the
/// cluster at 0. Without such eigenvalues the circle encloses the whole
/// spectrum for every real k.
inline double auto_contour_radius(const PeriodicGraphOperator& op, const RVector& k0, double scale) {
  const CVector ev = complex_eigenvalues(adjoint_bloch_at_minus(op, k0));
  const double cluster = fermi_defaults::cluster_radius * scale;
  double nearest = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) > cluster) nearest = std::min(nearest, std::abs(ev(i)));
  if (!std::isfinite(nearest)) return 2.0 * op.weight_scale() + 1.0;
  return 0.5 * nearest;
}

/// Pi(k) = (2 pi i)^{-1} oint (z - P*(-k))^{-1} dz, trapezoid rule on |z| = radius.
/// Throws a numerical error when an eigenvalue enters the annulus
/// radius/2 < |z| < 3 radius/2 or the enclosed count differs from expected_rank.
inline SpectralProjector spectral_projector(const PeriodicGraphOperator& op, const RVector& k, double radius,
                                            std::optional<int> expected_rank = std::nullopt) {
  const CMatrix a = adjoint_bloch_at_minus(op, k);
  const auto m = a.rows();
  const CVector ev = complex_eigenvalues(a);
  int inside = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double mag = std::abs(ev(i));
    if (mag > 0.5 * radius && mag < 1.5 * radius)
      fail(ErrorKind::numerical, "contour breach: an eigenvalue of P*(-k) approaches the integration circle");
    if (mag <= 0.5 * radius) ++inside;
  }
  if (expected_rank && inside != *expected_rank)
    fail(ErrorKind::numerical, "contour breach: enclosed eigenvalue count changed");

  const int q = local_defaults::contour_nodes;
  CMatrix pi_k = CMatrix::Zero(m, m);
  const CMatrix id = CMatrix::Identity(m, m);
  for (int j = 0; j < q; ++j) {
    const cplx z = radius * std::exp(I * (2.0 * pi * (j + 0.5) / q));
    pi_k += z * (z * id - a).partialPivLu().inverse();
  }
  pi_k /= static_cast<double>(q);
  return SpectralProjector{k, pi_k, radius, inside};
}

/// Evaluates lambda(k) near a fixed Fermi point.
class LocalModel {
 public:
  LocalModel(const PeriodicGraphOperator& op, RVector k0, double scale)
      : op_(op), k0_(std::move(k0)), radius_(auto_contour_radius(op, k0_, scale)) {
    const SpectralProjector p0 = spectral_projector(op_, k0_, radius_);
    rank_ = p0.rank;
    if (rank_ == 0) fail(ErrorKind::precondition, "k0 is not a Fermi point: no eigenvalue of P*(-k0) at 0");
    basis_ = column_space(p0.matrix, 1e-8).leftCols(rank_);
  }

  const RVector& k0() const { return k0_; }
  int rank() const { return rank_; }
  double contour_radius() const { return radius_; }
  const CMatrix& basis() const { return basis_; }

  CMatrix lambda(const RVector& k) const {
    const SpectralProjector p = spectral_projector(op_, k, radius_, rank_);
    const CMatrix a = adjoint_bloch_at_minus(op_, k);
    return (basis_.adjoint() * a * p.matrix * basis_).transpose();
  }

 private:
  PeriodicGraphOperator op_;
  RVector k0_;
  double radius_;
  int rank_ = 0;
  CMatrix basis_;
};

inline CMatrix lambda_matrix(const PeriodicGraphOperator& op, const RVector& k0, const RVector& k) {
  return LocalModel(op, k0, operator_scale(op)).lambda(k);
}

struct LocalSpectralData {
  RVector k0;
  int r = 0;
  std::optional<int> l0;
  HomogeneousMatrixPolynomial lambda_l0;
  TaylorFamily taylor;
  bool nondegenerate = false;
  double det_sample_max = 0.0;
  double contour_radius = 0.0;
  double reference_scale = 1.0;
};

namespace detail {

/// Central mixed differences of lambda at k0 with step h; offsets are kept on
/// a lattice of h/4 so both Richardson levels share the cache.
class StencilCache {
 public:
  StencilCache(const LocalModel& model, double base_step) : model_(model), unit_(base_step / 4.0) {}

  const CMatrix& at(const std::vector<int>& units) {
    auto it = cache_.find(units);
    if (it != cache_.end()) return it->second;
    RVector k = model_.k0();
    for (std::size_t i = 0; i < units.size(); ++i) k(static_cast<Eigen::Index>(i)) += units[i] * unit_;
    return cache_.emplace(units, model_.lambda(k)).first->second;
  }

  /// d^alpha lambda(k0) by central differences with step base/scale_div (1 or 2).
  CMatrix derivative(const MultiIndex& alpha, int scale_div) {
    const std::size_t n = alpha.size();
    const double h = 4.0 * unit_ / scale_div;
    const int unit_per_half = 2 / scale_div;  // units in h/2
    CMatrix acc = CMatrix::Zero(model_.rank(), model_.rank());
    std::vector<int> j(n, 0);
    while (true) {
      double w = 1.0;
      std::vector<int> units(n);
      for (std::size_t i = 0; i < n; ++i) {
        w *= ((j[i] % 2) ? -1.0 : 1.0) * static_cast<double>(binomial(alpha[i], j[i]));
        units[i] = (alpha[i] - 2 * j[i]) * unit_per_half;
      }
      acc += w * at(units);
      std::size_t axis = 0;
      while (axis < n && ++j[axis] > alpha[axis]) {
        j[axis] = 0;
        ++axis;
      }
      if (axis == n) break;
    }
    return acc / std::pow(h, alpha.degree());
  }

 private:
  const LocalModel& model_;
  double unit_;
  std::map<std::vector<int>, CMatrix> cache_;
};

}  // namespace detail

/// Homogeneous Taylor terms lambda(k0 + kappa) = sum_l lambda_l(kappa) up to
/// L_max by Richardson-extrapolated central differences (steps h, h/2).
/// Coefficients below max(tol_zero * ref, roundoff estimate) are set to zero;
/// ref is the sum of |weights| of the operator.
inline LocalSpectralData taylor_expand(const PeriodicGraphOperator& op, const RVector& k0, int L_max = local_defaults::L_max,
                                       double tol_zero = local_defaults::tol_zero, std::uint64_t seed = 0) {
  if (L_max < 0 || L_max > 8) fail(ErrorKind::precondition, "taylor_expand supports 0 <= L_max <= 8");
  const double scale = operator_scale(op);
  const LocalModel model(op, k0, scale);
  const std::size_t n = op.n();
  const auto r = static_cast<std::size_t>(model.rank());
  const double ref = std::max(op.weight_scale(), 1e-300);
  const double h = local_defaults::base_step;

  LocalSpectralData out;
  out.k0 = k0;
  out.r = model.rank();
  out.contour_radius = model.contour_radius();
  out.reference_scale = ref;
  out.taylor = TaylorFamily{n, r, {}};

  detail::StencilCache cache(model, h);
  for (int l = 0; l <= L_max; ++l) {
    HomogeneousMatrixPolynomial term(n, r, l);
    for (const auto& alpha : monomials_of_degree(n, l)) {
      const CMatrix coarse = cache.derivative(alpha, 1);
      const CMatrix fine = cache.derivative(alpha, 2);
      CMatrix c = (4.0 * fine - coarse) / 3.0 / alpha.factorial();
      const double roundoff = 1e-15 * ref * std::pow(4.0 / h, l) / alpha.factorial();
      const double cut = std::max(tol_zero * ref, roundoff);
      for (Eigen::Index i = 0; i < c.size(); ++i)
        if (std::abs(c.data()[i]) <= cut) c.data()[i] = 0.0;
      if (c.cwiseAbs().maxCoeff() > 0.0) term.add(alpha, c);
    }
    out.taylor.terms.push_back(std::move(term));
  }

  out.l0 = out.taylor.leading_order();
  if (!out.l0) fail(ErrorKind::numerical, "lambda is flat to order L_max: no leading Taylor term found");
  out.lambda_l0 = out.taylor.terms[static_cast<std::size_t>(*out.l0)];
  out.det_sample_max = sampled_det_max(out.lambda_l0, local_defaults::nondegeneracy_samples, seed);
  out.nondegenerate = out.det_sample_max > local_defaults::nondegeneracy_threshold;
  return out;
}

}  // namespace floquet
