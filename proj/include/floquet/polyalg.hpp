#pragma once

// Linear algebra on spaces of vector-valued polynomials: constant-coefficient
// operators Q(D), Q-harmonic kernels, homogeneity-preserving right inverses,
// the triangular system Lambda_N built from Taylor data, its kernel and the
// explicit cokernel map onto harmonic tuples.
//
// Convention: D^alpha x^beta = beta!/(beta-alpha)! x^(beta-alpha), i.e. plain
// partial derivatives, factorials included.

#include <map>
#include <optional>
#include <random>
#include <vector>

#include "floquet/combinatorics.hpp"
#include "floquet/linalg.hpp"
#include "floquet/polynomial.hpp"

namespace floquet {

namespace polyalg_defaults {
inline constexpr double rank_tol = 1e-10;
inline constexpr double det_threshold = 1e-10;
inline constexpr int det_samples = 50;
}  // namespace polyalg_defaults

/// Matrix of Q(D) : P_{l+s} -> P_l in the homogeneous monomial bases
/// (rows: degree l, columns: degree l+s).
inline CMatrix qd_operator_matrix(const HomogeneousMatrixPolynomial& q, int l) {
  const auto rows = PolySpaceBasis::homogeneous(q.n(), q.r(), l);
  const auto cols = PolySpaceBasis::homogeneous(q.n(), q.r(), l + q.degree());
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const auto& beta = cols[j].mono;
    const std::size_t c = cols[j].component;
    for (const auto& [alpha, coeff] : q.coefficients()) {
      if (!beta.dominates(alpha)) continue;
      const MultiIndex gamma = beta - alpha;
      const double fall = beta.factorial() / gamma.factorial();
      for (std::size_t cp = 0; cp < q.r(); ++cp) {
        const cplx a = coeff(static_cast<Eigen::Index>(cp), static_cast<Eigen::Index>(c));
        if (a == cplx{}) continue;
        m(static_cast<Eigen::Index>(rows.index(gamma, cp)), static_cast<Eigen::Index>(j)) += a * fall;
      }
    }
  }
  return m;
}

/// Q(D) on all of P_N (lowering degrees by s), as a square matrix in the
/// P_N basis.
inline CMatrix qd_operator_on_space(const HomogeneousMatrixPolynomial& q, int N) {
  const auto space = PolySpaceBasis::up_to(q.n(), q.r(), N);
  const auto dim = static_cast<Eigen::Index>(space.size());
  CMatrix m = CMatrix::Zero(dim, dim);
  for (int l = 0; l + q.degree() <= N; ++l) {
    const CMatrix block = qd_operator_matrix(q, l);
    const auto [row0, nr] = space.block(l);
    const auto [col0, nc] = space.block(l + q.degree());
    m.block(static_cast<Eigen::Index>(row0), static_cast<Eigen::Index>(col0), static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(nc)) = block;
  }
  return m;
}

/// Random point on the real unit sphere in R^n.
inline RVector random_unit_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  RVector x(static_cast<Eigen::Index>(n));
  do {
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = nd(rng);
  } while (x.norm() < 1e-12);
  return x / x.norm();
}

/// max over sampled unit directions of |det Q(u)|.
inline double sampled_det_max(const HomogeneousMatrixPolynomial& q, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    const RVector u = random_unit_vector(q.n(), rng);
    best = std::max(best, std::abs(q.evaluate(CVector(u.cast<cplx>())).determinant()));
  }
  return best;
}

/// det Q not identically zero, decided by sampling.
inline bool det_not_identically_zero(const HomogeneousMatrixPolynomial& q, std::uint64_t seed = 0,
                                     double threshold = polyalg_defaults::det_threshold) {
  return sampled_det_max(q, polyalg_defaults::det_samples, seed) > threshold;
}

struct HarmonicBasis {
  std::size_t n = 0;
  std::size_t r = 0;
  int N = 0;
  CMatrix basis;  ///< columns: coefficient vectors in PolySpaceBasis::up_to(n, r, N)
  std::vector<int> per_degree;  ///< kernel dimension inside each P_l
  std::size_t dimension() const { return static_cast<std::size_t>(basis.cols()); }
};

/// Kernel of Q(D) on P_N, computed degree by degree.
inline HarmonicBasis q_harmonic_basis(const HomogeneousMatrixPolynomial& q, int N) {
  const auto space = PolySpaceBasis::up_to(q.n(), q.r(), N);
  HarmonicBasis out{q.n(), q.r(), N, CMatrix(static_cast<Eigen::Index>(space.size()), 0), {}};
  std::vector<CVector> cols;
  for (int d = 0; d <= N; ++d) {
    const auto [off, len] = space.block(d);
    CMatrix ker;
    if (d < q.degree()) {
      ker = CMatrix::Identity(static_cast<Eigen::Index>(len), static_cast<Eigen::Index>(len));
    } else {
      ker = null_space(qd_operator_matrix(q, d - q.degree()), polyalg_defaults::rank_tol).basis;
    }
    out.per_degree.push_back(static_cast<int>(ker.cols()));
    for (Eigen::Index c = 0; c < ker.cols(); ++c) {
      CVector v = CVector::Zero(static_cast<Eigen::Index>(space.size()));
      v.segment(static_cast<Eigen::Index>(off), static_cast<Eigen::Index>(len)) = ker.col(c);
      cols.push_back(v);
    }
  }
  out.basis.resize(static_cast<Eigen::Index>(space.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.basis.col(static_cast<Eigen::Index>(c)) = cols[c];
  return out;
}

/// r [ C(n+N, N) - C(n+N-l0, N-l0) ]
inline std::int64_t dim_formula(std::int64_t n, std::int64_t N, std::int64_t r, std::int64_t l0) {
  if (r < 1 || l0 < 1) fail(ErrorKind::precondition, "dim_formula needs r >= 1 and l0 >= 1");
  return r * (q_dim(n, N) - q_dim(n, N - l0));
}

/// sum_j [ C(n+N, N) - C(n+N-l_j, N-l_j) ] for diagonal symbols with
/// per-entry leading orders l_j.
inline std::int64_t dim_formula_mixed(std::int64_t n, std::int64_t N, const std::vector<int>& orders) {
  std::int64_t d = 0;
  for (int l : orders) d += dim_formula(n, N, 1, l);
  return d;
}

/// Homogeneity-preserving right inverse of Q(D): on every P_l it is the
/// pseudo-inverse of Q(D) : P_{l+s} -> P_l (minimum-norm solutions).
class RightInverse {
 public:
  explicit RightInverse(HomogeneousMatrixPolynomial q) : q_(std::move(q)) {}

  const HomogeneousMatrixPolynomial& symbol() const { return q_; }

  /// Matrix P_l -> P_{l+s}.
  const CMatrix& matrix(int l) const {
    auto it = cache_.find(l);
    if (it == cache_.end()) it = cache_.emplace(l, pseudo_inverse(qd_operator_matrix(q_, l))).first;
    return it->second;
  }

  /// Applies R to a homogeneous degree-l polynomial given in P_l coordinates.
  CVector apply(const CVector& p, int l) const { return matrix(l) * p; }

 private:
  HomogeneousMatrixPolynomial q_;
  mutable std::map<int, CMatrix> cache_;
};

inline RightInverse right_inverse_R(const HomogeneousMatrixPolynomial& q, std::uint64_t seed = 0) {
  if (!det_not_identically_zero(q, seed))
    fail(ErrorKind::precondition, "degenerate symbol: det Q vanishes identically");
  return RightInverse(q);
}

/// Homogeneous Taylor terms lambda_0, lambda_1, ... (index = degree).
struct TaylorFamily {
  std::size_t n = 0;
  std::size_t r = 0;
  std::vector<HomogeneousMatrixPolynomial> terms;

  std::optional<int> leading_order(double tol = 0.0) const {
    for (std::size_t l = 0; l < terms.size(); ++l)
      if (!terms[l].is_zero(tol)) return static_cast<int>(l);
    return std::nullopt;
  }

  const HomogeneousMatrixPolynomial* term(int l) const {
    if (l < 0 || static_cast<std::size_t>(l) >= terms.size()) return nullptr;
    return &terms[static_cast<std::size_t>(l)];
  }

  TaylorFamily transposed() const {
    TaylorFamily t{n, r, {}};
    for (const auto& x : terms) t.terms.push_back(x.transposed());
    return t;
  }

  TaylorFamily sandwiched(const CMatrix& a, const CMatrix& b) const {
    TaylorFamily t{n, r, {}};
    for (const auto& x : terms) t.terms.push_back(x.sandwiched(a, b));
    return t;
  }

  /// Family from an explicit list, padding missing degrees with zeros.
  static TaylorFamily from_terms(std::size_t n, std::size_t r, const std::vector<HomogeneousMatrixPolynomial>& list) {
    TaylorFamily t{n, r, {}};
    int top = -1;
    for (const auto& x : list) top = std::max(top, x.degree());
    for (int l = 0; l <= top; ++l) t.terms.emplace_back(n, r, l);
    for (const auto& x : list)
      for (const auto& [alpha, c] : x.coefficients()) t.terms[static_cast<std::size_t>(x.degree())].add(alpha, c);
    return t;
  }
};

/// Multiplication by the homogeneous symbol q : P_j -> P_{j+s}.
inline CMatrix multiplication_matrix(const HomogeneousMatrixPolynomial& q, int j) {
  const auto src = PolySpaceBasis::homogeneous(q.n(), q.r(), j);
  const auto dst = PolySpaceBasis::homogeneous(q.n(), q.r(), j + q.degree());
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(dst.size()), static_cast<Eigen::Index>(src.size()));
  for (std::size_t col = 0; col < src.size(); ++col) {
    const auto& beta = src[col].mono;
    const std::size_t c = src[col].component;
    for (const auto& [alpha, coeff] : q.coefficients())
      for (std::size_t cp = 0; cp < q.r(); ++cp)
        m(static_cast<Eigen::Index>(dst.index(alpha + beta, cp)), static_cast<Eigen::Index>(col)) +=
            coeff(static_cast<Eigen::Index>(cp), static_cast<Eigen::Index>(c));
  }
  return m;
}

/// Lambda_N : P_N -> P_N, p -> Taylor polynomial of order N of lambda(k) p(k).
/// Block (i, j) is multiplication by lambda_{i-j} for i - j >= l0, zero otherwise.
inline CMatrix lambda_N_matrix(const TaylorFamily& taylor, int N) {
  const auto space = PolySpaceBasis::up_to(taylor.n, taylor.r, N);
  const auto dim = static_cast<Eigen::Index>(space.size());
  CMatrix m = CMatrix::Zero(dim, dim);
  const int l0 = taylor.leading_order().value_or(N + 1);
  for (int j = 0; j <= N; ++j) {
    for (int i = j + l0; i <= N; ++i) {
      const auto* lam = taylor.term(i - j);
      if (lam == nullptr || lam->coefficients().empty()) continue;
      const auto [row0, nr] = space.block(i);
      const auto [col0, nc] = space.block(j);
      m.block(static_cast<Eigen::Index>(row0), static_cast<Eigen::Index>(col0), static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(nc)) =
          multiplication_matrix(*lam, j);
    }
  }
  return m;
}

struct LambdaKernel {
  std::size_t dimension = 0;
  CMatrix basis;  ///< columns in PolySpaceBasis::up_to(n, r, N)
};

inline LambdaKernel lambda_N_kernel(const TaylorFamily& taylor, int N) {
  if (!taylor.leading_order()) fail(ErrorKind::precondition, "lambda_N_kernel: all Taylor terms vanish");
  auto ker = null_space(lambda_N_matrix(taylor, N), polyalg_defaults::rank_tol);
  return LambdaKernel{static_cast<std::size_t>(ker.basis.cols()), std::move(ker.basis)};
}

struct CokernelMap {
  int l0 = 0;
  std::size_t cokernel_dimension = 0;  ///< dim ker Lambda_N^T
  CMatrix psi_hat;  ///< Fourier images of the cokernel functionals, columns in P_N coordinates
  CMatrix phi;      ///< images: lambda_{l0}-harmonic tuples, columns in P_N coordinates
  std::size_t image_rank = 0;
  double harmonic_residual = 0.0;  ///< max |lambda_{l0}(D) phi| over image columns
};

/// Cokernel functionals psi of Lambda_N, carried to lambda_{l0}-harmonic
/// tuples via phi_j = psi_hat_j + R sum_{i>j} lambda_{i-j+l0}(D) psi_hat_i.
///
/// The cokernel is computed as the kernel of the transpose of Lambda_N
/// assembled from the transposed family; under x^beta <-> delta-derivative
/// duality (psi_hat coefficient = psi(x^beta)/beta!) its elements solve
/// sum_{j >= i+l0} lambda_{j-i}(D) psi_hat_j = 0.
inline CokernelMap cokernel_isomorphism(const TaylorFamily& taylor, int N, const RightInverse& R) {
  const auto l0_opt = taylor.leading_order();
  if (!l0_opt) fail(ErrorKind::precondition, "cokernel_isomorphism: all Taylor terms vanish");
  const int l0 = *l0_opt;
  const auto& lead = taylor.terms[static_cast<std::size_t>(l0)];
  if (!det_not_identically_zero(lead)) fail(ErrorKind::precondition, "cokernel_isomorphism: degenerate leading term");
  if (R.symbol().degree() != l0) fail(ErrorKind::precondition, "right inverse does not belong to the leading term");

  const auto space = PolySpaceBasis::up_to(taylor.n, taylor.r, N);
  const auto dim = static_cast<Eigen::Index>(space.size());
  const CMatrix dual = lambda_N_matrix(taylor.transposed(), N).transpose();
  const auto ker = null_space(dual, polyalg_defaults::rank_tol);

  CokernelMap out;
  out.l0 = l0;
  out.cokernel_dimension = static_cast<std::size_t>(ker.basis.cols());
  out.psi_hat = ker.basis;
  for (Eigen::Index i = 0; i < dim; ++i) out.psi_hat.row(i) /= space[static_cast<std::size_t>(i)].mono.factorial();

  out.phi = out.psi_hat;
  for (int j = l0; j <= N; ++j) {
    const auto [off_j, len_j] = space.block(j);
    const auto [off_low, len_low] = space.block(j - l0);
    for (Eigen::Index c = 0; c < out.psi_hat.cols(); ++c) {
      CVector rhs = CVector::Zero(static_cast<Eigen::Index>(len_low));
      for (int i = j + 1; i <= N; ++i) {
        const auto* lam = taylor.term(i - j + l0);
        if (lam == nullptr || lam->coefficients().empty()) continue;
        const auto [off_i, len_i] = space.block(i);
        rhs += qd_operator_matrix(*lam, j - l0) *
               out.psi_hat.col(c).segment(static_cast<Eigen::Index>(off_i), static_cast<Eigen::Index>(len_i));
      }
      out.phi.col(c).segment(static_cast<Eigen::Index>(off_j), static_cast<Eigen::Index>(len_j)) += R.apply(rhs, j - l0);
    }
  }

  out.image_rank = static_cast<std::size_t>(matrix_rank(out.phi, polyalg_defaults::rank_tol));
  const CMatrix lead_d = qd_operator_on_space(lead, N);
  for (Eigen::Index c = 0; c < out.phi.cols(); ++c)
    out.harmonic_residual = std::max(out.harmonic_residual, (lead_d * out.phi.col(c)).cwiseAbs().maxCoeff());
  return out;
}

}  // namespace floquet
