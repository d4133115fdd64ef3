#pragma once

// Dense multi-qudit pure states.
//
// Amplitudes are stored flat in big-endian subsystem order: site 0 is the most
// significant digit, so for dims {d0, d1, d2} basis |a b c> sits at index
// (a * d1 + b) * d2 + c.
//
// All types are templated on the real scalar; the aliases at the bottom of the
// file fix it to double, which is what the protocol layers use.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qvote/errors.hpp"
#include "qvote/rng.hpp"

namespace qvote {

template <typename Real>
using VectorXcT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using MatrixXcT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using RowMajorXcT =
    Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Dims = std::vector<std::size_t>;

namespace tol {
inline constexpr double kExact = 1e-12;     // single algebraic identities
inline constexpr double kPipeline = 1e-10;  // composed operations
}  // namespace tol

// Upper bound on the dense state length (2^22 > 2 * 10^6).
inline constexpr std::size_t kMaxDenseDimension = std::size_t{1} << 22;

inline std::size_t total_dimension(const Dims& dims) {
  std::size_t total = 1;
  for (std::size_t d : dims) {
    if (d < 2) throw ConfigError("subsystem dimension must be >= 2, got " + std::to_string(d));
    if (total > kMaxDenseDimension / d)
      throw ConfigError("state dimension exceeds the dense limit of " +
                        std::to_string(kMaxDenseDimension));
    total *= d;
  }
  return total;
}

namespace detail {

// Stride of each site in the flat index.
inline std::vector<std::size_t> strides(const Dims& dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t i = dims.size(); i-- > 1;) s[i - 1] = s[i] * dims[i];
  return s;
}

// Flat offsets contributed by every joint value of `sites` (big-endian in the
// given order).
inline std::vector<std::size_t> offsets(const Dims& dims, const std::vector<std::size_t>& stride,
                                        std::span<const std::size_t> sites) {
  std::vector<std::size_t> out{0};
  for (std::size_t site : sites) {
    std::vector<std::size_t> next;
    next.reserve(out.size() * dims[site]);
    for (std::size_t base : out)
      for (std::size_t k = 0; k < dims[site]; ++k) next.push_back(base + k * stride[site]);
    out = std::move(next);
  }
  return out;
}

inline std::vector<std::size_t> complement_sites(std::size_t count,
                                                 std::span<const std::size_t> sites) {
  std::vector<bool> used(count, false);
  for (std::size_t s : sites) {
    if (s >= count)
      throw ConfigError("site index " + std::to_string(s) + " out of range for " +
                        std::to_string(count) + " sites");
    if (used[s]) throw ConfigError("site index " + std::to_string(s) + " listed twice");
    used[s] = true;
  }
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < count; ++i)
    if (!used[i]) rest.push_back(i);
  return rest;
}

// Picks an outcome index from `probs` with one uniform draw. Returns
// probs.size() for the residual (complement) event, which only fires when its
// weight is above rounding level.
template <typename Real>
std::size_t sample_index(const std::vector<Real>& probs, Real u) {
  Real cumulative = 0;
  std::size_t last_nonzero = probs.size();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cumulative += probs[i];
    if (probs[i] > 0) last_nonzero = i;
    if (u < cumulative) return i;
  }
  if (Real(1) - cumulative <= Real(tol::kExact) && last_nonzero < probs.size()) return last_nonzero;
  return probs.size();
}

}  // namespace detail

template <typename Real>
class BasicPureState {
 public:
  using Scalar = std::complex<Real>;
  using Vector = VectorXcT<Real>;

  /// Validating constructor: length must equal the product of dims and the
  /// norm must be 1 within tol::kExact.
  static BasicPureState from_amplitudes(Dims dims, Vector amps) {
    const std::size_t total = total_dimension(dims);
    if (static_cast<std::size_t>(amps.size()) != total)
      throw ConfigError("amplitude count " + std::to_string(amps.size()) +
                        " does not match product of dims " + std::to_string(total));
    if (std::abs(amps.norm() - Real(1)) > Real(tol::kExact))
      throw ConfigError("state is not normalized (norm " + std::to_string(double(amps.norm())) +
                        ")");
    return BasicPureState(std::move(dims), std::move(amps));
  }

  /// Rescales `amps` to unit norm; rejects the zero vector.
  static BasicPureState normalized(Dims dims, Vector amps) {
    const Real n = amps.norm();
    if (!(n > Real(0))) throw ConfigError("cannot normalize a zero vector");
    amps /= n;
    return from_amplitudes(std::move(dims), std::move(amps));
  }

  static BasicPureState basis(Dims dims, std::span<const std::size_t> digits) {
    const std::size_t total = total_dimension(dims);
    if (digits.size() != dims.size()) throw ConfigError("basis digit count does not match sites");
    std::size_t index = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (digits[i] >= dims[i]) throw ConfigError("basis digit out of range");
      index = index * dims[i] + digits[i];
    }
    Vector amps = Vector::Zero(static_cast<Eigen::Index>(total));
    amps[static_cast<Eigen::Index>(index)] = Scalar(1);
    return BasicPureState(std::move(dims), std::move(amps));
  }

  static BasicPureState basis(Dims dims, std::initializer_list<std::size_t> digits) {
    std::vector<std::size_t> v(digits);
    return basis(std::move(dims), std::span<const std::size_t>(v));
  }

  const Dims& dims() const { return dims_; }
  std::size_t site_count() const { return dims_.size(); }
  std::size_t dim(std::size_t site) const { return dims_.at(site); }
  std::size_t size() const { return static_cast<std::size_t>(amps_.size()); }
  const Vector& amplitudes() const { return amps_; }
  Scalar operator[](std::size_t index) const { return amps_[static_cast<Eigen::Index>(index)]; }
  Real norm() const { return amps_.norm(); }

  // Internal results are already normalized up to rounding; skip the O(n)
  // recheck.
  struct Unchecked {};
  BasicPureState(Unchecked, Dims dims, Vector amps) : dims_(std::move(dims)), amps_(std::move(amps)) {}

 private:
  BasicPureState(Dims dims, Vector amps) : dims_(std::move(dims)), amps_(std::move(amps)) {}

  Dims dims_;
  Vector amps_;
};

template <typename Real>
class BasicLocalUnitary {
 public:
  using Matrix = MatrixXcT<Real>;

  static BasicLocalUnitary from_matrix(Matrix mat) {
    if (mat.rows() != mat.cols() || mat.rows() < 2)
      throw ConfigError("local unitary must be square with dimension >= 2");
    const Matrix gram = mat.adjoint() * mat;
    const Matrix eye = Matrix::Identity(mat.rows(), mat.cols());
    if ((gram - eye).cwiseAbs().maxCoeff() > Real(tol::kExact))
      throw ConfigError("matrix is not unitary within tolerance");
    return BasicLocalUnitary(std::move(mat));
  }

  /// diag(e^{i phase_k}).
  static BasicLocalUnitary diagonal_phases(std::span<const Real> phases) {
    Matrix mat = Matrix::Zero(static_cast<Eigen::Index>(phases.size()),
                              static_cast<Eigen::Index>(phases.size()));
    for (std::size_t k = 0; k < phases.size(); ++k)
      mat(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) =
          std::polar(Real(1), phases[k]);
    return from_matrix(std::move(mat));
  }

  std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }
  const Matrix& matrix() const { return mat_; }

  BasicLocalUnitary adjoint() const { return BasicLocalUnitary(mat_.adjoint()); }

  BasicLocalUnitary pow(std::size_t exponent) const {
    Matrix out = Matrix::Identity(mat_.rows(), mat_.cols());
    for (std::size_t i = 0; i < exponent; ++i) out = mat_ * out;
    return BasicLocalUnitary(std::move(out));
  }

  friend BasicLocalUnitary operator*(const BasicLocalUnitary& a, const BasicLocalUnitary& b) {
    if (a.dim() != b.dim()) throw ConfigError("unitary dimension mismatch");
    return BasicLocalUnitary(a.mat_ * b.mat_);
  }

 private:
  explicit BasicLocalUnitary(Matrix mat) : mat_(std::move(mat)) {}
  Matrix mat_;
};

template <typename Real>
class BasicDensityMatrix {
 public:
  using Matrix = MatrixXcT<Real>;

  static BasicDensityMatrix from_matrix(Matrix mat) {
    if (mat.rows() != mat.cols()) throw ConfigError("density matrix must be square");
    if ((mat - mat.adjoint()).cwiseAbs().maxCoeff() > Real(tol::kExact))
      throw ConfigError("density matrix is not Hermitian");
    if (std::abs(mat.trace() - std::complex<Real>(1)) > Real(tol::kExact))
      throw ConfigError("density matrix trace is not 1");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(mat, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -Real(tol::kExact))
      throw ConfigError("density matrix has a negative eigenvalue");
    return BasicDensityMatrix(std::move(mat));
  }

  std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }
  const Matrix& matrix() const { return mat_; }

  /// max_ij |rho_ij - delta_ij / dim|
  Real deviation_from_maximally_mixed() const {
    const Matrix target = Matrix::Identity(mat_.rows(), mat_.cols()) / Real(mat_.rows());
    return (mat_ - target).cwiseAbs().maxCoeff();
  }

  struct Unchecked {};
  BasicDensityMatrix(Unchecked, Matrix mat) : mat_(std::move(mat)) {}

 private:
  explicit BasicDensityMatrix(Matrix mat) : mat_(std::move(mat)) {}
  Matrix mat_;
};

/// A set of mutually orthogonal projectors, not necessarily complete.
///
/// Each projector P_a is held through an isometry Q_a (dim x rank, orthonormal
/// columns) with P_a = Q_a Q_a^+, so rank-1 projectors on a 10^6-dimensional
/// space cost one column rather than a dense square matrix. The residual
/// I - sum P_a is the implicit INVALID outcome.
template <typename Real>
class BasicProjectorSet {
 public:
  using Matrix = MatrixXcT<Real>;
  using Vector = VectorXcT<Real>;

  static BasicProjectorSet from_isometries(std::size_t dim, std::vector<Matrix> factors) {
    for (const Matrix& q : factors) {
      if (static_cast<std::size_t>(q.rows()) != dim)
        throw ConfigError("projector factor has wrong row count");
      const Matrix gram = q.adjoint() * q;
      if ((gram - Matrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff() > Real(tol::kPipeline))
        throw ConfigError("projector factor columns are not orthonormal");
    }
    for (std::size_t a = 0; a < factors.size(); ++a)
      for (std::size_t b = a + 1; b < factors.size(); ++b)
        if ((factors[a].adjoint() * factors[b]).cwiseAbs().maxCoeff() > Real(tol::kPipeline))
          throw ConfigError("projectors " + std::to_string(a) + " and " + std::to_string(b) +
                            " are not orthogonal");
    return BasicProjectorSet(dim, std::move(factors));
  }

  /// One rank-1 projector per (unit) vector.
  static BasicProjectorSet from_vectors(std::size_t dim, const std::vector<Vector>& vectors) {
    std::vector<Matrix> factors;
    factors.reserve(vectors.size());
    for (const Vector& v : vectors) factors.emplace_back(v);
    return from_isometries(dim, std::move(factors));
  }

  /// Accepts dense projector matrices; checks P = P^+ = P^2 and factors each
  /// through its unit-eigenvalue eigenvectors.
  static BasicProjectorSet from_matrices(std::size_t dim, const std::vector<Matrix>& mats) {
    std::vector<Matrix> factors;
    for (const Matrix& p : mats) {
      if (static_cast<std::size_t>(p.rows()) != dim || p.rows() != p.cols())
        throw ConfigError("projector has wrong shape");
      if ((p - p.adjoint()).cwiseAbs().maxCoeff() > Real(tol::kPipeline))
        throw ConfigError("projector is not Hermitian");
      if ((p * p - p).cwiseAbs().maxCoeff() > Real(tol::kPipeline))
        throw ConfigError("projector is not idempotent");
      Eigen::SelfAdjointEigenSolver<Matrix> solver(p);
      std::vector<Eigen::Index> cols;
      for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
        if (solver.eigenvalues()[i] > Real(0.5)) cols.push_back(i);
      Matrix q(p.rows(), static_cast<Eigen::Index>(cols.size()));
      for (std::size_t c = 0; c < cols.size(); ++c)
        q.col(static_cast<Eigen::Index>(c)) = solver.eigenvectors().col(cols[c]);
      factors.push_back(std::move(q));
    }
    return from_isometries(dim, std::move(factors));
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return factors_.size(); }
  const Matrix& isometry(std::size_t a) const { return factors_.at(a); }
  Matrix matrix(std::size_t a) const { return factors_.at(a) * factors_.at(a).adjoint(); }

 private:
  BasicProjectorSet(std::size_t dim, std::vector<Matrix> factors)
      : dim_(dim), factors_(std::move(factors)) {}

  std::size_t dim_;
  std::vector<Matrix> factors_;
};

template <typename Real>
struct BasicMeasurement {
  std::optional<std::size_t> outcome;  // nullopt: the INVALID complement fired
  BasicPureState<Real> post;
  Real probability;
};

template <typename Real>
struct BasicDigitMeasurement {
  std::size_t digit;
  BasicPureState<Real> post;
  Real probability;
};

// ---------------------------------------------------------------------------
// Site-subset reshaping

/// Rearranges the amplitudes as a (prod dims[sites]) x (rest) matrix. Rows
/// run over `sites` in the order given, columns over the remaining sites in
/// their original order.
template <typename Real>
MatrixXcT<Real> gather_sites(const BasicPureState<Real>& state, std::span<const std::size_t> sites) {
  const auto rest = detail::complement_sites(state.site_count(), sites);
  const auto stride = detail::strides(state.dims());
  const auto rows = detail::offsets(state.dims(), stride, sites);
  const auto cols = detail::offsets(state.dims(), stride, rest);
  MatrixXcT<Real> out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  const auto& amps = state.amplitudes();
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t r = 0; r < rows.size(); ++r)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          amps[static_cast<Eigen::Index>(rows[r] + cols[c])];
  return out;
}

/// Inverse of gather_sites.
template <typename Real>
VectorXcT<Real> scatter_sites(const Dims& dims, std::span<const std::size_t> sites,
                              const MatrixXcT<Real>& block) {
  const auto rest = detail::complement_sites(dims.size(), sites);
  const auto stride = detail::strides(dims);
  const auto rows = detail::offsets(dims, stride, sites);
  const auto cols = detail::offsets(dims, stride, rest);
  VectorXcT<Real> amps(static_cast<Eigen::Index>(rows.size() * cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t r = 0; r < rows.size(); ++r)
      amps[static_cast<Eigen::Index>(rows[r] + cols[c])] =
          block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  return amps;
}

// ---------------------------------------------------------------------------
// Operations

template <typename Real>
BasicPureState<Real> tensor(const BasicPureState<Real>& a, const BasicPureState<Real>& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  total_dimension(dims);
  VectorXcT<Real> amps(static_cast<Eigen::Index>(a.size() * b.size()));
  // Row-major outer product: index (i, j) -> i * |b| + j.
  Eigen::Map<RowMajorXcT<Real>>(amps.data(), static_cast<Eigen::Index>(a.size()),
                                static_cast<Eigen::Index>(b.size())) =
      a.amplitudes() * b.amplitudes().transpose();
  return {typename BasicPureState<Real>::Unchecked{}, std::move(dims), std::move(amps)};
}

template <typename Real>
BasicPureState<Real> apply_local(const BasicPureState<Real>& state, std::size_t site,
                                 const BasicLocalUnitary<Real>& u) {
  if (site >= state.site_count())
    throw ConfigError("site " + std::to_string(site) + " out of range");
  const std::size_t d = state.dim(site);
  if (u.dim() != d)
    throw ConfigError("unitary dimension " + std::to_string(u.dim()) + " does not match site " +
                      std::to_string(site) + " dimension " + std::to_string(d));
  std::size_t right = 1;
  for (std::size_t i = site + 1; i < state.site_count(); ++i) right *= state.dim(i);
  const std::size_t left = state.size() / (d * right);

  VectorXcT<Real> amps = state.amplitudes();
  for (std::size_t l = 0; l < left; ++l) {
    Eigen::Map<RowMajorXcT<Real>> block(amps.data() + l * d * right, static_cast<Eigen::Index>(d),
                                        static_cast<Eigen::Index>(right));
    block = u.matrix() * block;
  }
  return {typename BasicPureState<Real>::Unchecked{}, state.dims(), std::move(amps)};
}

/// <a|b>, conjugate-linear in a.
template <typename Real>
std::complex<Real> inner(const BasicPureState<Real>& a, const BasicPureState<Real>& b) {
  if (a.dims() != b.dims()) throw ConfigError("inner product of states with different dims");
  return a.amplitudes().dot(b.amplitudes());
}

template <typename Real>
BasicDensityMatrix<Real> reduced_density(const BasicPureState<Real>& state,
                                         std::span<const std::size_t> keep_sites) {
  const MatrixXcT<Real> block = gather_sites(state, keep_sites);
  MatrixXcT<Real> rho = block * block.adjoint();
  return {typename BasicDensityMatrix<Real>::Unchecked{}, std::move(rho)};
}

template <typename Real>
BasicDensityMatrix<Real> reduced_density(const BasicPureState<Real>& state,
                                         std::initializer_list<std::size_t> keep_sites) {
  std::vector<std::size_t> v(keep_sites);
  return reduced_density(state, std::span<const std::size_t>(v));
}

/// Outcome probabilities of `proj` acting on `sites` (in that order); the
/// final entry is the weight of the complement I - sum P_a.
template <typename Real>
std::vector<Real> outcome_probabilities(const BasicPureState<Real>& state,
                                        std::span<const std::size_t> sites,
                                        const BasicProjectorSet<Real>& proj) {
  const MatrixXcT<Real> block = gather_sites(state, sites);
  if (static_cast<std::size_t>(block.rows()) != proj.dim())
    throw ConfigError("projector dimension " + std::to_string(proj.dim()) +
                      " does not match measured subsystem dimension " +
                      std::to_string(block.rows()));
  std::vector<Real> probs;
  probs.reserve(proj.size() + 1);
  Real total = 0;
  for (std::size_t a = 0; a < proj.size(); ++a) {
    const Real p = (proj.isometry(a).adjoint() * block).squaredNorm();
    probs.push_back(p);
    total += p;
  }
  probs.push_back(std::max(Real(0), Real(1) - total));
  return probs;
}

template <typename Real>
std::vector<Real> outcome_probabilities(const BasicPureState<Real>& state,
                                        const BasicProjectorSet<Real>& proj) {
  std::vector<std::size_t> all(state.site_count());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return outcome_probabilities(state, std::span<const std::size_t>(all), proj);
}

/// Projective measurement of `proj` on the listed sites; other sites are
/// untouched apart from the collapse.
template <typename Real>
BasicMeasurement<Real> measure_local(const BasicPureState<Real>& state,
                                     std::span<const std::size_t> sites,
                                     const BasicProjectorSet<Real>& proj, Rng& rng) {
  const MatrixXcT<Real> block = gather_sites(state, sites);
  if (static_cast<std::size_t>(block.rows()) != proj.dim())
    throw ConfigError("projector dimension does not match measured subsystem dimension");
  std::vector<Real> probs;
  probs.reserve(proj.size());
  for (std::size_t a = 0; a < proj.size(); ++a)
    probs.push_back((proj.isometry(a).adjoint() * block).squaredNorm());

  const std::size_t pick = detail::sample_index(probs, Real(rng.uniform()));
  MatrixXcT<Real> collapsed;
  Real prob;
  std::optional<std::size_t> outcome;
  if (pick < proj.size()) {
    const auto& q = proj.isometry(pick);
    collapsed = q * (q.adjoint() * block);
    prob = probs[pick];
    outcome = pick;
  } else {
    collapsed = block;
    for (std::size_t a = 0; a < proj.size(); ++a)
      collapsed -= proj.isometry(a) * (proj.isometry(a).adjoint() * block);
    prob = collapsed.squaredNorm();
  }
  collapsed /= std::sqrt(prob);
  return {outcome,
          BasicPureState<Real>{typename BasicPureState<Real>::Unchecked{}, state.dims(),
                               scatter_sites<Real>(state.dims(), sites, collapsed)},
          prob};
}

template <typename Real>
BasicMeasurement<Real> measure_projective(const BasicPureState<Real>& state,
                                          const BasicProjectorSet<Real>& proj, Rng& rng) {
  if (proj.dim() != state.size())
    throw ConfigError("projector dimension does not match state dimension");
  std::vector<std::size_t> all(state.site_count());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return measure_local(state, std::span<const std::size_t>(all), proj, rng);
}

/// Marginal distribution of one site in the computational basis.
template <typename Real>
std::vector<Real> site_marginal(const BasicPureState<Real>& state, std::size_t site) {
  if (site >= state.site_count()) throw ConfigError("site out of range");
  const std::size_t d = state.dim(site);
  std::size_t right = 1;
  for (std::size_t i = site + 1; i < state.site_count(); ++i) right *= state.dim(i);
  const std::size_t left = state.size() / (d * right);
  std::vector<Real> probs(d, Real(0));
  const auto& amps = state.amplitudes();
  for (std::size_t l = 0; l < left; ++l)
    for (std::size_t k = 0; k < d; ++k)
      probs[k] += amps.segment(static_cast<Eigen::Index>((l * d + k) * right),
                               static_cast<Eigen::Index>(right))
                      .squaredNorm();
  return probs;
}

template <typename Real>
BasicDigitMeasurement<Real> measure_computational(const BasicPureState<Real>& state,
                                                  std::size_t site, Rng& rng) {
  const std::vector<Real> probs = site_marginal(state, site);
  std::size_t digit = detail::sample_index(probs, Real(rng.uniform()));
  if (digit >= probs.size()) digit = probs.size() - 1;  // marginals sum to 1
  const std::size_t d = state.dim(site);
  std::size_t right = 1;
  for (std::size_t i = site + 1; i < state.site_count(); ++i) right *= state.dim(i);
  const std::size_t left = state.size() / (d * right);

  VectorXcT<Real> amps = VectorXcT<Real>::Zero(static_cast<Eigen::Index>(state.size()));
  const Real scale = Real(1) / std::sqrt(probs[digit]);
  for (std::size_t l = 0; l < left; ++l) {
    const auto offset = static_cast<Eigen::Index>((l * d + digit) * right);
    amps.segment(offset, static_cast<Eigen::Index>(right)) =
        state.amplitudes().segment(offset, static_cast<Eigen::Index>(right)) * scale;
  }
  return {digit,
          BasicPureState<Real>{typename BasicPureState<Real>::Unchecked{}, state.dims(),
                               std::move(amps)},
          probs[digit]};
}

// ---------------------------------------------------------------------------
// Correlated-basis states
//
// States of the form sum_k a_k |k>^{(x) M} for M sites of dimension d. Every
// honest and single-qudit-forgery path of the voting-qudit protocol stays in
// this d-dimensional subspace, so these hold 2N-site ballots without the d^{2N}
// dense vector.

template <typename Real>
class BasicCorrelatedState {
 public:
  using Scalar = std::complex<Real>;
  using Vector = VectorXcT<Real>;

  static BasicCorrelatedState from_coefficients(std::size_t sites, Vector coeffs) {
    if (sites < 1) throw ConfigError("correlated state needs at least one site");
    if (coeffs.size() < 2) throw ConfigError("correlated state dimension must be >= 2");
    if (std::abs(coeffs.norm() - Real(1)) > Real(tol::kExact))
      throw ConfigError("correlated state is not normalized");
    return BasicCorrelatedState(sites, std::move(coeffs));
  }

  /// Extracts the coefficients of a dense state with all sites of equal
  /// dimension; throws if it has weight outside the correlated subspace.
  static BasicCorrelatedState from_dense(const BasicPureState<Real>& state) {
    const std::size_t d = state.dim(0);
    for (std::size_t s : state.dims())
      if (s != d) throw ConfigError("correlated state requires equal site dimensions");
    Vector coeffs(static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k) coeffs[static_cast<Eigen::Index>(k)] = state[diagonal_index(d, state.site_count(), k)];
    if (std::abs(coeffs.norm() - Real(1)) > Real(tol::kPipeline))
      throw ConfigError("state has weight outside the correlated subspace");
    return BasicCorrelatedState(state.site_count(), std::move(coeffs));
  }

  std::size_t dim() const { return static_cast<std::size_t>(coeffs_.size()); }
  std::size_t site_count() const { return sites_; }
  const Vector& coefficients() const { return coeffs_; }

  BasicPureState<Real> to_dense() const {
    Dims dims(sites_, dim());
    Vector amps = Vector::Zero(static_cast<Eigen::Index>(total_dimension(dims)));
    for (std::size_t k = 0; k < dim(); ++k)
      amps[static_cast<Eigen::Index>(diagonal_index(dim(), sites_, k))] = coeffs_[static_cast<Eigen::Index>(k)];
    return {typename BasicPureState<Real>::Unchecked{}, std::move(dims), std::move(amps)};
  }

  /// A diagonal unitary on any one site multiplies coefficient k by its k-th
  /// entry; the site is irrelevant.
  BasicCorrelatedState apply_diagonal(const BasicLocalUnitary<Real>& u) const {
    if (u.dim() != dim()) throw ConfigError("unitary dimension mismatch");
    if ((u.matrix() - Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>(u.matrix().diagonal().asDiagonal()))
            .cwiseAbs()
            .maxCoeff() > Real(tol::kExact))
      throw ConfigError("only diagonal unitaries preserve the correlated subspace");
    return BasicCorrelatedState(sites_, u.matrix().diagonal().cwiseProduct(coeffs_));
  }

  struct Unchecked {};
  BasicCorrelatedState(Unchecked, std::size_t sites, Vector coeffs)
      : sites_(sites), coeffs_(std::move(coeffs)) {}

 private:
  BasicCorrelatedState(std::size_t sites, Vector coeffs) : sites_(sites), coeffs_(std::move(coeffs)) {}

  static std::size_t diagonal_index(std::size_t d, std::size_t sites, std::size_t k) {
    std::size_t index = 0;
    for (std::size_t s = 0; s < sites; ++s) index = index * d + k;
    return index;
  }

  std::size_t sites_;
  Vector coeffs_;
};

template <typename Real>
std::complex<Real> inner(const BasicCorrelatedState<Real>& a, const BasicCorrelatedState<Real>& b) {
  if (a.dim() != b.dim() || a.site_count() != b.site_count())
    throw ConfigError("inner product of correlated states with different shapes");
  return a.coefficients().dot(b.coefficients());
}

using PureState = BasicPureState<double>;
using LocalUnitary = BasicLocalUnitary<double>;
using DensityMatrix = BasicDensityMatrix<double>;
using ProjectorSet = BasicProjectorSet<double>;
using CorrelatedState = BasicCorrelatedState<double>;
using Measurement = BasicMeasurement<double>;
using DigitMeasurement = BasicDigitMeasurement<double>;
using VectorXc = VectorXcT<double>;
using MatrixXc = MatrixXcT<double>;

}  // namespace qvote
