#pragma once

// Multi-indices, matrix-coefficient homogeneous polynomials and graded
// monomial bases of spaces of C^r-valued polynomials.

#include <algorithm>
#include <cmath>
#include <compare>
#include <functional>
#include <cstdint>
#include <map>
#include <vector>

#include "floquet/combinatorics.hpp"
#include "floquet/linalg.hpp"

namespace floquet {

/// Exponent vector alpha in Z_+^n. Ordered graded-lexicographically: lower
/// total degree first, then x_1-heavier monomials first within a degree.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t n) : e_(n, 0) {}
  MultiIndex(std::initializer_list<int> e) : e_(e) {}
  explicit MultiIndex(std::vector<int> e) : e_(std::move(e)) {}

  std::size_t size() const { return e_.size(); }
  int operator[](std::size_t i) const { return e_[i]; }
  int& operator[](std::size_t i) { return e_[i]; }
  const std::vector<int>& exponents() const { return e_; }

  int degree() const {
    int d = 0;
    for (int x : e_) d += x;
    return d;
  }

  /// alpha! = prod alpha_i!
  double factorial() const {
    double f = 1.0;
    for (int x : e_)
      for (int i = 2; i <= x; ++i) f *= i;
    return f;
  }

  /// prod C(alpha_i, beta_i); zero unless beta <= alpha componentwise.
  double binomial_over(const MultiIndex& beta) const {
    double b = 1.0;
    for (std::size_t i = 0; i < e_.size(); ++i) {
      if (beta.e_[i] > e_[i] || beta.e_[i] < 0) return 0.0;
      b *= static_cast<double>(binomial(e_[i], beta.e_[i]));
    }
    return b;
  }

  bool dominates(const MultiIndex& beta) const {
    for (std::size_t i = 0; i < e_.size(); ++i)
      if (beta.e_[i] > e_[i]) return false;
    return true;
  }

  MultiIndex operator+(const MultiIndex& o) const {
    MultiIndex r(*this);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] += o.e_[i];
    return r;
  }
  MultiIndex operator-(const MultiIndex& o) const {
    MultiIndex r(*this);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] -= o.e_[i];
    return r;
  }

  /// x^alpha for complex x.
  template <class Vec>
  cplx power_of(const Vec& x) const {
    cplx p = 1.0;
    for (std::size_t i = 0; i < e_.size(); ++i)
      for (int j = 0; j < e_[i]; ++j) p *= x[static_cast<Eigen::Index>(i)];
    return p;
  }

  std::strong_ordering operator<=>(const MultiIndex& o) const {
    if (auto c = degree() <=> o.degree(); c != 0) return c;
    for (std::size_t i = 0; i < e_.size(); ++i)
      if (e_[i] != o.e_[i]) return o.e_[i] <=> e_[i];
    return std::strong_ordering::equal;
  }
  bool operator==(const MultiIndex& o) const = default;

 private:
  std::vector<int> e_;
};

/// All multi-indices of total degree d in n variables, graded-lex order.
inline std::vector<MultiIndex> monomials_of_degree(std::size_t n, int d) {
  std::vector<MultiIndex> out;
  if (d < 0) return out;
  if (n == 0) {
    if (d == 0) out.emplace_back(0);
    return out;
  }
  MultiIndex cur(n);
  // recursive fill: first exponent runs from d down to 0
  std::function<void(std::size_t, int)> rec = [&](std::size_t axis, int left) {
    if (axis + 1 == n) {
      cur[axis] = left;
      out.push_back(cur);
      return;
    }
    for (int e = left; e >= 0; --e) {
      cur[axis] = e;
      rec(axis + 1, left - e);
    }
  };
  rec(0, d);
  return out;
}

inline std::vector<MultiIndex> monomials_up_to(std::size_t n, int N) {
  std::vector<MultiIndex> out;
  for (int d = 0; d <= N; ++d) {
    auto m = monomials_of_degree(n, d);
    out.insert(out.end(), m.begin(), m.end());
  }
  return out;
}

/// Homogeneous polynomial of degree s in n variables with r x r matrix
/// coefficients: Q(k) = sum_{|alpha| = s} C_alpha k^alpha.
class HomogeneousMatrixPolynomial {
 public:
  HomogeneousMatrixPolynomial() = default;
  HomogeneousMatrixPolynomial(std::size_t n, std::size_t r, int degree) : n_(n), r_(r), degree_(degree) {}

  std::size_t n() const { return n_; }
  std::size_t r() const { return r_; }
  int degree() const { return degree_; }
  const std::map<MultiIndex, CMatrix>& coefficients() const { return coeffs_; }

  void add(const MultiIndex& alpha, const CMatrix& c) {
    if (alpha.size() != n_ || alpha.degree() != degree_)
      fail(ErrorKind::precondition, "coefficient multi-index has the wrong degree or length");
    if (c.rows() != static_cast<Eigen::Index>(r_) || c.cols() != static_cast<Eigen::Index>(r_))
      fail(ErrorKind::precondition, "coefficient matrix has the wrong size");
    auto it = coeffs_.find(alpha);
    if (it == coeffs_.end()) coeffs_.emplace(alpha, c);
    else it->second += c;
  }

  void add(const MultiIndex& alpha, cplx scalar) { add(alpha, CMatrix::Identity(static_cast<Eigen::Index>(r_), static_cast<Eigen::Index>(r_)) * scalar); }

  CMatrix coefficient(const MultiIndex& alpha) const {
    auto it = coeffs_.find(alpha);
    if (it == coeffs_.end()) return CMatrix::Zero(static_cast<Eigen::Index>(r_), static_cast<Eigen::Index>(r_));
    return it->second;
  }

  template <class Vec>
  CMatrix evaluate(const Vec& k) const {
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(r_), static_cast<Eigen::Index>(r_));
    for (const auto& [alpha, c] : coeffs_) out += c * alpha.power_of(k);
    return out;
  }

  /// Largest coefficient entry in absolute value.
  double max_abs() const {
    double m = 0.0;
    for (const auto& [alpha, c] : coeffs_) m = std::max(m, c.cwiseAbs().maxCoeff());
    return m;
  }

  bool is_zero(double tol = 0.0) const { return max_abs() <= tol; }

  /// Drops coefficient entries with |c| <= tol.
  HomogeneousMatrixPolynomial pruned(double tol) const {
    HomogeneousMatrixPolynomial out(n_, r_, degree_);
    for (const auto& [alpha, c] : coeffs_) {
      CMatrix d = c;
      for (Eigen::Index i = 0; i < d.size(); ++i)
        if (std::abs(d.data()[i]) <= tol) d.data()[i] = 0.0;
      if (d.cwiseAbs().maxCoeff() > 0.0) out.coeffs_.emplace(alpha, d);
    }
    return out;
  }

  HomogeneousMatrixPolynomial transposed() const {
    HomogeneousMatrixPolynomial out(n_, r_, degree_);
    for (const auto& [alpha, c] : coeffs_) out.coeffs_.emplace(alpha, c.transpose());
    return out;
  }

  /// A * Q * B
  HomogeneousMatrixPolynomial sandwiched(const CMatrix& a, const CMatrix& b) const {
    HomogeneousMatrixPolynomial out(n_, r_, degree_);
    for (const auto& [alpha, c] : coeffs_) out.coeffs_.emplace(alpha, a * c * b);
    return out;
  }

 private:
  std::size_t n_ = 0;
  std::size_t r_ = 0;
  int degree_ = 0;
  std::map<MultiIndex, CMatrix> coeffs_;
};

/// Basis of C^r-valued polynomials of degree in [min_degree, max_degree]:
/// monomials graded-lex, then component index.
class PolySpaceBasis {
 public:
  struct Element {
    MultiIndex mono;
    std::size_t component;
  };

  PolySpaceBasis(std::size_t n, std::size_t r, int min_degree, int max_degree)
      : n_(n), r_(r), min_degree_(min_degree), max_degree_(max_degree) {
    for (int d = std::max(min_degree, 0); d <= max_degree; ++d) {
      degree_offset_[d] = elements_.size();
      for (const auto& m : monomials_of_degree(n, d))
        for (std::size_t c = 0; c < r; ++c) elements_.push_back({m, c});
    }
    for (std::size_t i = 0; i < elements_.size(); ++i) index_.emplace(std::make_pair(elements_[i].mono, elements_[i].component), i);
  }

  /// P_N = polynomials of degree <= N.
  static PolySpaceBasis up_to(std::size_t n, std::size_t r, int N) { return PolySpaceBasis(n, r, 0, N); }
  /// P_l = homogeneous polynomials of degree l.
  static PolySpaceBasis homogeneous(std::size_t n, std::size_t r, int l) { return PolySpaceBasis(n, r, l, l); }

  std::size_t n() const { return n_; }
  std::size_t r() const { return r_; }
  int max_degree() const { return max_degree_; }
  std::size_t size() const { return elements_.size(); }
  const std::vector<Element>& elements() const { return elements_; }
  const Element& operator[](std::size_t i) const { return elements_[i]; }

  std::size_t index(const MultiIndex& m, std::size_t component) const {
    auto it = index_.find({m, component});
    if (it == index_.end()) fail(ErrorKind::precondition, "monomial not in basis");
    return it->second;
  }

  bool contains(const MultiIndex& m) const {
    const int d = m.degree();
    return d >= min_degree_ && d <= max_degree_;
  }

  /// Offset and length of the homogeneous degree-d block.
  std::pair<std::size_t, std::size_t> block(int d) const {
    if (d < std::max(min_degree_, 0) || d > max_degree_) return {0, 0};
    const std::size_t start = degree_offset_.at(d);
    return {start, r_ * static_cast<std::size_t>(q_dim(static_cast<std::int64_t>(n_) - 1, d))};
  }

  /// Evaluates the C^r-valued polynomial with the given coefficients at x.
  template <class Vec>
  CVector evaluate(const CVector& coeffs, const Vec& x) const {
    CVector out = CVector::Zero(static_cast<Eigen::Index>(r_));
    for (std::size_t i = 0; i < elements_.size(); ++i)
      out(static_cast<Eigen::Index>(elements_[i].component)) += coeffs(static_cast<Eigen::Index>(i)) * elements_[i].mono.power_of(x);
    return out;
  }

 private:
  std::size_t n_;
  std::size_t r_;
  int min_degree_;
  int max_degree_;
  std::vector<Element> elements_;
  std::map<int, std::size_t> degree_offset_;
  std::map<std::pair<MultiIndex, std::size_t>, std::size_t> index_;
};

}  // namespace floquet
