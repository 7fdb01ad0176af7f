#pragma once

// Bloch matrices P(k), band functions, band-structure paths and the discrete
// Floquet-Gelfand transform on uniform Brillouin-zone grids.

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "floquet/model.hpp"

namespace floquet {

/// Quasimomentum reduced to [-pi, pi) componentwise.
inline RVector reduce_to_zone(RVector k) {
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    double x = std::remainder(k(i), 2.0 * pi);  // in [-pi, pi]
    if (x >= pi) x -= 2.0 * pi;
    k(i) = x;
  }
  return k;
}

/// Distance on the torus R^n / 2 pi Z^n.
inline double torus_distance(const RVector& a, const RVector& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double d = std::remainder(a(i) - b(i), 2.0 * pi);
    s += d * d;
  }
  return std::sqrt(s);
}

struct BlochMatrix {
  CVector k;
  CMatrix entries;
};

/// P(k)_{v,v'} = sum_{t: from=v, to=v'} w_t exp(i k . s_t) - energy_shift delta_{vv'}.
/// Accepts complex quasimomenta.
inline CMatrix bloch_matrix_entries(const PeriodicGraphOperator& op, const CVector& k) {
  if (static_cast<std::size_t>(k.size()) != op.n())
    fail(ErrorKind::precondition, "quasimomentum length does not match operator rank");
  const auto m = static_cast<Eigen::Index>(op.vertex_count());
  CMatrix p = CMatrix::Zero(m, m);
  for (const auto& t : op.terms())
    p(static_cast<Eigen::Index>(t.from), static_cast<Eigen::Index>(t.to)) += t.weight * std::exp(I * t.shift.dot(k));
  if (op.energy_shift() != 0.0) p.diagonal().array() -= op.energy_shift();
  return p;
}

inline CMatrix bloch_matrix_entries(const PeriodicGraphOperator& op, const RVector& k) {
  return bloch_matrix_entries(op, CVector(k.cast<cplx>()));
}

inline BlochMatrix bloch_matrix(const PeriodicGraphOperator& op, const CVector& k) {
  return BlochMatrix{k, bloch_matrix_entries(op, k)};
}

inline BlochMatrix bloch_matrix(const PeriodicGraphOperator& op, const RVector& k) {
  return bloch_matrix(op, CVector(k.cast<cplx>()));
}

/// Mixed partial derivative d^alpha P(k) (exact, from the term list).
inline CMatrix bloch_derivative(const PeriodicGraphOperator& op, const CVector& k,
                                const std::vector<int>& alpha) {
  const auto m = static_cast<Eigen::Index>(op.vertex_count());
  CMatrix d = CMatrix::Zero(m, m);
  bool zero_order = true;
  for (int a : alpha) zero_order = zero_order && a == 0;
  for (const auto& t : op.terms()) {
    cplx factor = t.weight * std::exp(I * t.shift.dot(k));
    for (std::size_t i = 0; i < alpha.size(); ++i)
      factor *= std::pow(I * static_cast<double>(t.shift[i]), alpha[i]);
    d(static_cast<Eigen::Index>(t.from), static_cast<Eigen::Index>(t.to)) += factor;
  }
  if (zero_order && op.energy_shift() != 0.0) d.diagonal().array() -= op.energy_shift();
  return d;
}

struct BandSample {
  double t = 0.0;  ///< path parameter (arc length in k)
  RVector k;
  RVector eigenvalues;  ///< ascending
};

/// Ascending eigenvalues of the Hermitian P(k). Refuses non-selfadjoint operators.
inline RVector band_functions(const PeriodicGraphOperator& op, const RVector& k) {
  if (!validate_operator(op).selfadjoint)
    fail(ErrorKind::precondition, "band functions require a selfadjoint operator");
  return jacobi_eigen(bloch_matrix_entries(op, k)).values;
}

/// Linear interpolation through the waypoints; each segment contributes
/// max(samples_per_segment - 1, 1) steps, shared endpoints emitted once.
inline std::vector<BandSample> band_path(const PeriodicGraphOperator& op, const std::vector<RVector>& waypoints,
                                         int samples_per_segment) {
  if (waypoints.size() < 2) fail(ErrorKind::precondition, "band path needs at least two waypoints");
  if (samples_per_segment < 1) fail(ErrorKind::precondition, "samples_per_segment must be >= 1");
  for (const auto& w : waypoints)
    if (static_cast<std::size_t>(w.size()) != op.n()) fail(ErrorKind::precondition, "waypoint length mismatch");
  if (!validate_operator(op).selfadjoint)
    fail(ErrorKind::precondition, "band functions require a selfadjoint operator");

  const int steps = std::max(samples_per_segment - 1, 1);
  std::vector<BandSample> out;
  double t0 = 0.0;
  for (std::size_t seg = 0; seg + 1 < waypoints.size(); ++seg) {
    const RVector& a = waypoints[seg];
    const RVector& b = waypoints[seg + 1];
    const double len = (b - a).norm();
    for (int s = seg == 0 ? 0 : 1; s <= steps; ++s) {
      const double frac = static_cast<double>(s) / steps;
      BandSample row;
      row.k = a + frac * (b - a);
      row.t = t0 + frac * len;
      row.eigenvalues = jacobi_eigen(bloch_matrix_entries(op, row.k)).values;
      out.push_back(std::move(row));
    }
    t0 += len;
  }
  return out;
}

/// CSV with header t,k1..kn,band1..bandm and 17 significant digits.
inline void write_band_csv(std::ostream& os, const std::vector<BandSample>& rows) {
  if (rows.empty()) return;
  const auto n = rows.front().k.size();
  const auto m = rows.front().eigenvalues.size();
  os << "t";
  for (Eigen::Index i = 0; i < n; ++i) os << ",k" << i + 1;
  for (Eigen::Index j = 0; j < m; ++j) os << ",band" << j + 1;
  os << '\n';
  std::ostringstream line;
  line << std::setprecision(17);
  for (const auto& r : rows) {
    line.str("");
    line << r.t;
    for (Eigen::Index i = 0; i < n; ++i) line << ',' << r.k(i);
    for (Eigen::Index j = 0; j < m; ++j) line << ',' << r.eigenvalues(j);
    os << line.str() << '\n';
  }
}

/// Uniform grid of points_per_axis^n quasimomenta k_i = -pi + 2 pi i / points.
class KGrid {
 public:
  KGrid(std::size_t rank, int points_per_axis) : rank_(rank), points_(points_per_axis) {
    if (points_per_axis < 1) fail(ErrorKind::precondition, "grid needs at least one point per axis");
  }

  std::size_t rank() const { return rank_; }
  int points_per_axis() const { return points_; }
  double spacing() const { return 2.0 * pi / points_; }

  std::size_t size() const {
    std::size_t s = 1;
    for (std::size_t i = 0; i < rank_; ++i) s *= static_cast<std::size_t>(points_);
    return s;
  }

  /// Multi-index of flat position, last axis fastest.
  std::vector<int> index(std::size_t flat) const {
    std::vector<int> idx(rank_);
    for (std::size_t i = rank_; i-- > 0;) {
      idx[i] = static_cast<int>(flat % static_cast<std::size_t>(points_));
      flat /= static_cast<std::size_t>(points_);
    }
    return idx;
  }

  std::size_t flat(const std::vector<int>& idx) const {
    std::size_t f = 0;
    for (std::size_t i = 0; i < rank_; ++i) {
      const int w = ((idx[i] % points_) + points_) % points_;
      f = f * static_cast<std::size_t>(points_) + static_cast<std::size_t>(w);
    }
    return f;
  }

  RVector point(std::size_t flat_index) const {
    const auto idx = index(flat_index);
    RVector k(static_cast<Eigen::Index>(rank_));
    for (std::size_t i = 0; i < rank_; ++i) k(static_cast<Eigen::Index>(i)) = -pi + spacing() * idx[i];
    return k;
  }

 private:
  std::size_t rank_;
  int points_;
};

/// Floquet-Gelfand transform sampled on a grid: values(q, v) = Uf(k_q, v).
struct FloquetSamples {
  KGrid grid;
  Box support;  ///< deck-index box the samples are inverted onto
  CMatrix values;  ///< grid.size() x vertex count
};

/// Uf(k, v) = sum_g u(g, v) exp(-i k . g). The window of u must fit inside the
/// grid's Nyquist box (extent <= points per axis), else the samples alias.
inline FloquetSamples floquet_transform(const WindowFunction& u, const KGrid& grid) {
  const Box& box = u.window();
  if (box.rank() != grid.rank()) fail(ErrorKind::precondition, "grid rank does not match function rank");
  for (std::size_t i = 0; i < box.rank(); ++i)
    if (box.extent(i) > grid.points_per_axis())
      fail(ErrorKind::precondition, "support exceeds the Nyquist box of the grid (aliasing)");
  const auto m = static_cast<Eigen::Index>(u.vertex_count());
  FloquetSamples out{grid, box, CMatrix::Zero(static_cast<Eigen::Index>(grid.size()), m)};
  for (std::size_t q = 0; q < grid.size(); ++q) {
    const RVector k = grid.point(q);
    box.for_each([&](const DeckIndex& g) {
      const cplx phase = std::exp(-I * g.dot(k));
      for (Eigen::Index v = 0; v < m; ++v) out.values(static_cast<Eigen::Index>(q), v) += u.at(g, static_cast<std::size_t>(v)) * phase;
    });
  }
  return out;
}

/// Default inversion box for hand-built samples: the window centred at 0 with
/// extent points_per_axis on every axis.
inline Box default_inversion_box(const KGrid& grid) {
  const int p = grid.points_per_axis();
  Box b{DeckIndex(grid.rank()), DeckIndex(grid.rank())};
  for (std::size_t i = 0; i < grid.rank(); ++i) {
    b.lo[i] = -((p - 1) / 2);
    b.hi[i] = b.lo[i] + p - 1;
  }
  return b;
}

/// u(g, v) = mean over the grid of Uf(k, v) exp(i k . g), on samples.support.
inline WindowFunction inverse_floquet_transform(const FloquetSamples& samples) {
  const Box& box = samples.support;
  for (std::size_t i = 0; i < box.rank(); ++i)
    if (box.extent(i) > samples.grid.points_per_axis())
      fail(ErrorKind::precondition, "support exceeds the Nyquist box of the grid (aliasing)");
  const auto m = samples.values.cols();
  WindowFunction u(box, static_cast<std::size_t>(m));
  const double norm = 1.0 / static_cast<double>(samples.grid.size());
  for (std::size_t q = 0; q < samples.grid.size(); ++q) {
    const RVector k = samples.grid.point(q);
    box.for_each([&](const DeckIndex& g) {
      const cplx phase = std::exp(I * g.dot(k)) * norm;
      for (Eigen::Index v = 0; v < m; ++v) u.at(g, static_cast<std::size_t>(v)) += samples.values(static_cast<Eigen::Index>(q), v) * phase;
    });
  }
  return u;
}

}  // namespace floquet
