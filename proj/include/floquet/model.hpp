#pragma once

// Periodic difference operators on Z^n-covers of finite graphs, deck-index
// arithmetic, and finite windows of functions on the cover.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "floquet/error.hpp"
#include "floquet/linalg.hpp"

namespace floquet {

/// Coordinate g in the deck group Z^n.
class DeckIndex {
 public:
  DeckIndex() = default;
  explicit DeckIndex(std::size_t n) : c_(n, 0) {}
  DeckIndex(std::initializer_list<std::int64_t> c) : c_(c) {}
  explicit DeckIndex(std::vector<std::int64_t> c) : c_(std::move(c)) {}

  static DeckIndex unit(std::size_t n, std::size_t axis) {
    DeckIndex g(n);
    g.c_[axis] = 1;
    return g;
  }

  std::size_t size() const { return c_.size(); }
  std::int64_t operator[](std::size_t i) const { return c_[i]; }
  std::int64_t& operator[](std::size_t i) { return c_[i]; }
  const std::vector<std::int64_t>& components() const { return c_; }

  /// |g| = sum |g_i|
  std::int64_t l1_norm() const {
    std::int64_t s = 0;
    for (auto x : c_) s += std::abs(x);
    return s;
  }

  std::int64_t max_norm() const {
    std::int64_t s = 0;
    for (auto x : c_) s = std::max<std::int64_t>(s, std::abs(x));
    return s;
  }

  double dot(const RVector& k) const {
    double s = 0.0;
    for (std::size_t i = 0; i < c_.size(); ++i) s += k(static_cast<Eigen::Index>(i)) * static_cast<double>(c_[i]);
    return s;
  }

  cplx dot(const CVector& k) const {
    cplx s = 0.0;
    for (std::size_t i = 0; i < c_.size(); ++i) s += k(static_cast<Eigen::Index>(i)) * static_cast<double>(c_[i]);
    return s;
  }

  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](std::int64_t x) { return x == 0; });
  }

  DeckIndex operator-() const {
    DeckIndex r(*this);
    for (auto& x : r.c_) x = -x;
    return r;
  }
  DeckIndex operator+(const DeckIndex& o) const {
    DeckIndex r(*this);
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] += o.c_[i];
    return r;
  }
  DeckIndex operator-(const DeckIndex& o) const { return *this + (-o); }

  auto operator<=>(const DeckIndex&) const = default;

 private:
  std::vector<std::int64_t> c_;
};

/// Axis-aligned box [lo, hi] (inclusive) of deck indices.
struct Box {
  DeckIndex lo;
  DeckIndex hi;

  static Box centered(std::size_t n, std::int64_t radius) {
    Box b{DeckIndex(n), DeckIndex(n)};
    for (std::size_t i = 0; i < n; ++i) {
      b.lo[i] = -radius;
      b.hi[i] = radius;
    }
    return b;
  }

  std::size_t rank() const { return lo.size(); }

  bool empty() const {
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (hi[i] < lo[i]) return true;
    return false;
  }

  std::int64_t extent(std::size_t axis) const { return hi[axis] - lo[axis] + 1; }

  std::size_t count() const {
    if (empty()) return 0;
    std::size_t c = 1;
    for (std::size_t i = 0; i < lo.size(); ++i) c *= static_cast<std::size_t>(extent(i));
    return c;
  }

  bool contains(const DeckIndex& g) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (g[i] < lo[i] || g[i] > hi[i]) return false;
    return true;
  }

  /// Shrinks every axis symmetrically by margin[i].
  Box shrunk(const std::vector<std::int64_t>& margin) const {
    Box b = *this;
    for (std::size_t i = 0; i < lo.size(); ++i) {
      b.lo[i] += margin[i];
      b.hi[i] -= margin[i];
    }
    return b;
  }

  /// Row-major flat index, last axis fastest.
  std::size_t offset(const DeckIndex& g) const {
    std::size_t off = 0;
    for (std::size_t i = 0; i < lo.size(); ++i)
      off = off * static_cast<std::size_t>(extent(i)) + static_cast<std::size_t>(g[i] - lo[i]);
    return off;
  }

  template <class F>
  void for_each(F&& f) const {
    if (empty()) return;
    DeckIndex g = lo;
    const std::size_t n = lo.size();
    while (true) {
      f(static_cast<const DeckIndex&>(g));
      std::size_t axis = n;
      while (axis > 0) {
        --axis;
        if (g[axis] < hi[axis]) {
          ++g[axis];
          for (std::size_t j = axis + 1; j < n; ++j) g[j] = lo[j];
          break;
        }
        if (axis == 0) return;
      }
      if (n == 0) return;
    }
  }

  bool operator==(const Box&) const = default;
};

/// Complex function on box x cell vertices.
class WindowFunction {
 public:
  WindowFunction() = default;
  WindowFunction(Box window, std::size_t vertex_count)
      : window_(std::move(window)),
        vertices_(vertex_count),
        values_(window_.count() * vertex_count, cplx{}) {}

  template <class F>
  static WindowFunction from(Box window, std::size_t vertex_count, F&& f) {
    WindowFunction u(std::move(window), vertex_count);
    u.window_.for_each([&](const DeckIndex& g) {
      for (std::size_t v = 0; v < vertex_count; ++v) u.at(g, v) = f(g, v);
    });
    return u;
  }

  const Box& window() const { return window_; }
  std::size_t vertex_count() const { return vertices_; }

  cplx& at(const DeckIndex& g, std::size_t v) { return values_[window_.offset(g) * vertices_ + v]; }
  cplx at(const DeckIndex& g, std::size_t v) const { return values_[window_.offset(g) * vertices_ + v]; }

  const std::vector<cplx>& values() const { return values_; }

  double max_abs() const {
    double m = 0.0;
    for (const auto& x : values_) m = std::max(m, std::abs(x));
    return m;
  }

  WindowFunction& operator+=(const WindowFunction& o) {
    check_same(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  WindowFunction& operator*=(cplx s) {
    for (auto& x : values_) x *= s;
    return *this;
  }
  friend WindowFunction operator+(WindowFunction a, const WindowFunction& b) { return a += b; }
  friend WindowFunction operator*(cplx s, WindowFunction a) { return a *= s; }

  /// Restriction to a sub-box.
  WindowFunction restricted(const Box& sub) const {
    if (!sub.empty() && (!window_.contains(sub.lo) || !window_.contains(sub.hi)))
      fail(ErrorKind::precondition, "restriction box is not inside the window");
    return from(sub, vertices_, [&](const DeckIndex& g, std::size_t v) { return at(g, v); });
  }

 private:
  void check_same(const WindowFunction& o) const {
    if (!(o.window_ == window_) || o.vertices_ != vertices_)
      fail(ErrorKind::precondition, "window functions live on different windows");
  }

  Box window_;
  std::size_t vertices_ = 0;
  std::vector<cplx> values_;
};

/// One term of P: contributes weight * u(g + shift, to) to (Pu)(g, from).
struct Term {
  std::size_t from = 0;
  std::size_t to = 0;
  DeckIndex shift;
  cplx weight;
};

/// Operator as read from a file, before label resolution.
struct OperatorDescription {
  struct RawTerm {
    std::string from;
    std::string to;
    std::vector<std::int64_t> shift;
    cplx weight;
  };
  int rank = 0;
  double energy_shift = 0.0;
  std::vector<std::string> vertices;
  std::vector<RawTerm> terms;
};

struct ValidationReport {
  bool valid = false;
  std::vector<std::string> errors;
  bool selfadjoint = false;
  /// L = D - W with W >= 0 entrywise: off-diagonal weights real and <= 0,
  /// diagonal weights real.
  bool positive_structure = false;
};

/// Periodic finite-order difference operator on the Z^n-cover of a finite
/// graph. The stored energy shift is subtracted from the diagonal: every
/// computation sees P - energy_shift * I.
class PeriodicGraphOperator {
 public:
  PeriodicGraphOperator(int rank, std::vector<std::string> vertices, std::vector<Term> terms,
                        double energy_shift = 0.0)
      : rank_(rank), vertices_(std::move(vertices)), terms_(std::move(terms)), energy_shift_(energy_shift) {
    if (rank_ < 1) fail(ErrorKind::validation, "operator rank must be >= 1");
    if (vertices_.empty()) fail(ErrorKind::validation, "operator needs at least one cell vertex");
    for (const auto& t : terms_) {
      if (t.from >= vertices_.size() || t.to >= vertices_.size())
        fail(ErrorKind::validation, "term references an unknown vertex");
      if (t.shift.size() != static_cast<std::size_t>(rank_))
        fail(ErrorKind::validation, "term shift length does not match operator rank");
    }
  }

  static PeriodicGraphOperator from_description(const OperatorDescription& d);

  int rank() const { return rank_; }
  std::size_t n() const { return static_cast<std::size_t>(rank_); }
  std::size_t vertex_count() const { return vertices_.size(); }
  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<Term>& terms() const { return terms_; }
  double energy_shift() const { return energy_shift_; }

  PeriodicGraphOperator with_energy_shift(double shift) const {
    return PeriodicGraphOperator(rank_, vertices_, terms_, shift);
  }

  /// Same operator plus `delta` on the diagonal, i.e. energy shift reduced by delta.
  PeriodicGraphOperator plus_identity(double delta) const { return with_energy_shift(energy_shift_ - delta); }

  /// Largest |shift component| per axis.
  std::vector<std::int64_t> reach() const {
    std::vector<std::int64_t> r(n(), 0);
    for (const auto& t : terms_)
      for (std::size_t i = 0; i < n(); ++i) r[i] = std::max<std::int64_t>(r[i], std::abs(t.shift[i]));
    return r;
  }

  /// sum_t |w_t| |s_t|_2 : Lipschitz constant of k -> P(k) in spectral norm.
  double lipschitz_constant() const {
    double s = 0.0;
    for (const auto& t : terms_) {
      double len = 0.0;
      for (std::size_t i = 0; i < n(); ++i) len += static_cast<double>(t.shift[i] * t.shift[i]);
      s += std::abs(t.weight) * std::sqrt(len);
    }
    return s;
  }

  /// sum of |weights| including the energy shift; bounds |P(k)| for real k.
  double weight_scale() const {
    double s = std::abs(energy_shift_);
    for (const auto& t : terms_) s += std::abs(t.weight);
    return s;
  }

  /// Terms aggregated by (from, to, shift), energy shift folded into the diagonal.
  std::map<std::tuple<std::size_t, std::size_t, DeckIndex>, cplx> aggregated() const {
    std::map<std::tuple<std::size_t, std::size_t, DeckIndex>, cplx> agg;
    for (const auto& t : terms_) agg[{t.from, t.to, t.shift}] += t.weight;
    if (energy_shift_ != 0.0)
      for (std::size_t v = 0; v < vertex_count(); ++v) agg[{v, v, DeckIndex(n())}] -= energy_shift_;
    return agg;
  }

 private:
  int rank_;
  std::vector<std::string> vertices_;
  std::vector<Term> terms_;
  double energy_shift_;
};

namespace detail {

inline bool is_selfadjoint(const PeriodicGraphOperator& op, double tol) {
  const auto agg = op.aggregated();
  for (const auto& [key, w] : agg) {
    const auto& [from, to, shift] = key;
    auto it = agg.find({to, from, -shift});
    const cplx mirror = it == agg.end() ? cplx{} : it->second;
    if (std::abs(mirror - std::conj(w)) > tol) return false;
  }
  return true;
}

inline bool has_positive_structure(const PeriodicGraphOperator& op, double tol) {
  for (const auto& [key, w] : op.aggregated()) {
    const auto& [from, to, shift] = key;
    if (std::abs(w.imag()) > tol) return false;
    const bool diagonal = from == to && shift.is_zero();
    if (!diagonal && w.real() > tol) return false;
  }
  return true;
}

}  // namespace detail

/// Checks labels and shapes; on success also reports the self-adjointness and
/// positivity flags of the resolved operator.
inline ValidationReport validate_operator(const OperatorDescription& d) {
  ValidationReport rep;
  if (d.rank < 1) rep.errors.push_back("rank must be >= 1");
  if (d.vertices.empty()) rep.errors.push_back("at least one cell vertex is required");
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < d.vertices.size(); ++i) {
    if (!index.emplace(d.vertices[i], i).second) rep.errors.push_back("duplicate vertex label '" + d.vertices[i] + "'");
  }
  for (std::size_t i = 0; i < d.terms.size(); ++i) {
    const auto& t = d.terms[i];
    const std::string where = "term " + std::to_string(i) + ": ";
    if (!index.count(t.from)) rep.errors.push_back(where + "unknown vertex '" + t.from + "'");
    if (!index.count(t.to)) rep.errors.push_back(where + "unknown vertex '" + t.to + "'");
    if (d.rank >= 1 && t.shift.size() != static_cast<std::size_t>(d.rank))
      rep.errors.push_back(where + "shift has " + std::to_string(t.shift.size()) + " components, rank is " +
                           std::to_string(d.rank));
    if (!std::isfinite(t.weight.real()) || !std::isfinite(t.weight.imag()))
      rep.errors.push_back(where + "non-finite weight");
  }
  if (!std::isfinite(d.energy_shift)) rep.errors.push_back("non-finite energy shift");
  rep.valid = rep.errors.empty();
  if (!rep.valid) return rep;

  const auto op = PeriodicGraphOperator::from_description(d);
  const double tol = 1e-14 * std::max(1.0, op.weight_scale());
  rep.selfadjoint = detail::is_selfadjoint(op, tol);
  rep.positive_structure = detail::has_positive_structure(op, tol);
  return rep;
}

inline ValidationReport validate_operator(const PeriodicGraphOperator& op) {
  ValidationReport rep;
  rep.valid = true;
  const double tol = 1e-14 * std::max(1.0, op.weight_scale());
  rep.selfadjoint = detail::is_selfadjoint(op, tol);
  rep.positive_structure = detail::has_positive_structure(op, tol);
  return rep;
}

inline PeriodicGraphOperator PeriodicGraphOperator::from_description(const OperatorDescription& d) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < d.vertices.size(); ++i) index.emplace(d.vertices[i], i);
  std::vector<Term> terms;
  terms.reserve(d.terms.size());
  for (const auto& t : d.terms) {
    auto f = index.find(t.from);
    auto g = index.find(t.to);
    if (f == index.end() || g == index.end())
      fail(ErrorKind::validation, "term references unknown vertex '" + (f == index.end() ? t.from : t.to) + "'");
    terms.push_back(Term{f->second, g->second, DeckIndex(t.shift), t.weight});
  }
  return PeriodicGraphOperator(d.rank, d.vertices, std::move(terms), d.energy_shift);
}

/// (Pu)(g, v) = sum_{t.from = v} w_t u(g + s_t, t.to) - energy_shift u(g, v).
/// The output window is the input window shrunk by the operator reach.
inline WindowFunction apply_operator(const PeriodicGraphOperator& op, const WindowFunction& u) {
  if (u.window().rank() != op.n()) fail(ErrorKind::precondition, "window rank does not match operator rank");
  if (u.vertex_count() != op.vertex_count())
    fail(ErrorKind::precondition, "window vertex count does not match operator");
  const Box out_box = u.window().shrunk(op.reach());
  if (out_box.empty()) fail(ErrorKind::precondition, "window too small: no interior point left after applying the operator");
  WindowFunction out(out_box, op.vertex_count());
  out_box.for_each([&](const DeckIndex& g) {
    for (const auto& t : op.terms()) out.at(g, t.from) += t.weight * u.at(g + t.shift, t.to);
    if (op.energy_shift() != 0.0)
      for (std::size_t v = 0; v < op.vertex_count(); ++v) out.at(g, v) -= op.energy_shift() * u.at(g, v);
  });
  return out;
}

/// Formal adjoint with respect to the sesquilinear pairing: each term
/// (v -> v', s, w) becomes (v' -> v, -s, conj w).
inline PeriodicGraphOperator adjoint(const PeriodicGraphOperator& op) {
  std::vector<Term> terms;
  terms.reserve(op.terms().size());
  for (const auto& t : op.terms()) terms.push_back(Term{t.to, t.from, -t.shift, std::conj(t.weight)});
  return PeriodicGraphOperator(op.rank(), op.vertices(), std::move(terms), op.energy_shift());
}

/// Dual with respect to the bilinear pairing <g, f> = sum f g: each term
/// (v -> v', s, w) becomes (v' -> v, -s, w). Its Bloch matrix at k is the
/// transpose of P(-k), so its Fermi surface is exactly -F_P.
inline PeriodicGraphOperator bilinear_dual(const PeriodicGraphOperator& op) {
  std::vector<Term> terms;
  terms.reserve(op.terms().size());
  for (const auto& t : op.terms()) terms.push_back(Term{t.to, t.from, -t.shift, t.weight});
  return PeriodicGraphOperator(op.rank(), op.vertices(), std::move(terms), op.energy_shift());
}

}  // namespace floquet
