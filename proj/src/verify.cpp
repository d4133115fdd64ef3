#include "qvote/verify.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "qvote/errors.hpp"

namespace qvote {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::complex<double> expectation(const VectorXc& omega, const MatrixXc& op) {
  return omega.dot(op * omega);
}

// Terms <U x I>, <I x V>, <U x V>, 1 - <U x V^+>; f is the sum of their squared moduli.
std::array<std::complex<double>, 4> privacy_terms(const MatrixXc& u, const MatrixXc& v,
                                                  const VectorXc& omega) {
  const MatrixXc iu = MatrixXc::Identity(u.rows(), u.cols());
  const MatrixXc iv = MatrixXc::Identity(v.rows(), v.cols());
  return {expectation(omega, Eigen::kroneckerProduct(u, iv).eval()),
          expectation(omega, Eigen::kroneckerProduct(iu, v).eval()),
          expectation(omega, Eigen::kroneckerProduct(u, v).eval()),
          1.0 - expectation(omega, Eigen::kroneckerProduct(u, v.adjoint()).eval())};
}

Eigen::Vector3d unit_from_angles(double polar, double azimuth) {
  return {std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth), std::cos(polar)};
}

// x = (nu, theta, m polar, m azimuth, n polar, n azimuth, Re/Im omega_0..3).
constexpr int kInputs = 14;

QubitSchemeParams params_from_vector(const Eigen::VectorXd& x) {
  QubitSchemeParams p;
  p.nu = x[0];
  p.theta = x[1];
  p.m_hat = unit_from_angles(x[2], x[3]);
  p.n_hat = unit_from_angles(x[4], x[5]);
  for (int j = 0; j < 4; ++j) p.omega[j] = {x[6 + 2 * j], x[7 + 2 * j]};
  const double norm = p.omega.norm();
  if (norm > 0.0) p.omega /= norm;
  else p.omega = Eigen::Vector4cd::UnitX();
  return p;
}

// Residuals padded with zeros to one per input; the solver needs m >= n.
struct NogoFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  int inputs() const { return kInputs; }
  int values() const { return kInputs; }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const {
    const QubitSchemeParams p = params_from_vector(x);
    const auto terms = privacy_terms(qubit_unitary(p.nu, p.m_hat), qubit_unitary(p.theta, p.n_hat),
                                     VectorXc(p.omega));
    fvec.setZero(kInputs);
    for (int k = 0; k < 4; ++k) {
      fvec[2 * k] = terms[k].real();
      fvec[2 * k + 1] = terms[k].imag();
    }
    return 0;
  }
};

}  // namespace

Json PrivacyReport::to_json() const {
  return Json{{"scheme", to_string(scheme)},
              {"d", d},
              {"n", n},
              {"pass", pass},
              {"worst_same_deviation", worst_same_deviation},
              {"worst_cross_overlap", worst_cross_overlap},
              {"same_pairs", same_pairs},
              {"cross_pairs", cross_pairs}};
}

PrivacyReport check_privacy(Scheme scheme, std::size_t d, std::size_t n, double tolerance) {
  if (scheme != Scheme::DistributedBallot && scheme != Scheme::TravellingBallot)
    throw ConfigError("privacy check supports the db and tb schemes");
  if (n > kPrivacyMaxVoters)
    throw ConfigError("privacy check enumerates 2^N vote vectors; N must be <= " +
                      std::to_string(kPrivacyMaxVoters));
  if (n < 1) throw ConfigError("privacy check needs at least one voter");
  if (d < 2) throw ConfigError("d must be >= 2");

  const bool db = scheme == Scheme::DistributedBallot;
  const PureState ballot = db ? tally_state(d, n, 0) : prepare_tb_ballot(d);
  const LocalUnitary shift = shift_unitary(d);
  const std::size_t count = std::size_t{1} << n;
  std::vector<PureState> states;
  std::vector<std::size_t> weights;
  states.reserve(count);
  for (std::size_t mask = 0; mask < count; ++mask) {
    PureState s = ballot;
    std::size_t w = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!((mask >> i) & 1)) continue;
      ++w;
      s = db ? cast_vote_db(s, i, VoteChoice::yes()) : apply_local(s, 1, shift);
    }
    states.push_back(std::move(s));
    weights.push_back(w);
  }

  PrivacyReport report;
  report.scheme = scheme;
  report.d = d;
  report.n = n;
  for (std::size_t a = 0; a < count; ++a)
    for (std::size_t b = a; b < count; ++b) {
      const double overlap = std::abs(inner(states[a], states[b]));
      if (weights[a] == weights[b]) {
        report.worst_same_deviation = std::max(report.worst_same_deviation, std::abs(1.0 - overlap));
        ++report.same_pairs;
      } else {
        report.worst_cross_overlap = std::max(report.worst_cross_overlap, overlap);
        ++report.cross_pairs;
      }
    }
  report.pass = report.worst_same_deviation <= tolerance && report.worst_cross_overlap <= tolerance;
  return report;
}

ReducedCheck check_reduced_identity(const PureState& state, const std::vector<std::size_t>& sites,
                                    double tolerance) {
  std::set<std::size_t> unique(sites.begin(), sites.end());
  if (sites.empty()) throw ConfigError("subset must not be empty");
  if (unique.size() != sites.size()) throw ConfigError("duplicate site in subset");
  if (sites.size() >= state.site_count())
    throw ConfigError("subset must be strict: the full state is pure, never proportional to I");
  const DensityMatrix rho = reduced_density(state, std::span<const std::size_t>(sites));
  ReducedCheck out;
  out.deviation = rho.deviation_from_maximally_mixed();
  out.pass = out.deviation <= tolerance;
  return out;
}

// ---------------------------------------------------------------------------

void QubitSchemeParams::validate() const {
  if (std::abs(m_hat.norm() - 1.0) > tol::kPipeline) throw ConfigError("m_hat must be a unit vector");
  if (std::abs(n_hat.norm() - 1.0) > tol::kPipeline) throw ConfigError("n_hat must be a unit vector");
  if (std::abs(omega.norm() - 1.0) > tol::kPipeline) throw ConfigError("omega must be normalized");
}

Json QubitSchemeParams::to_json() const {
  Json om = Json::array();
  for (int j = 0; j < 4; ++j) om.push_back({omega[j].real(), omega[j].imag()});
  return Json{{"nu", nu},
              {"m_hat", {m_hat.x(), m_hat.y(), m_hat.z()}},
              {"theta", theta},
              {"n_hat", {n_hat.x(), n_hat.y(), n_hat.z()}},
              {"omega", std::move(om)}};
}

Eigen::Matrix2cd qubit_unitary(double angle, const Eigen::Vector3d& axis) {
  using C = std::complex<double>;
  Eigen::Matrix2cd sigma;
  sigma << C(axis.z(), 0), C(axis.x(), -axis.y()), C(axis.x(), axis.y()), C(-axis.z(), 0);
  return std::cos(angle) * Eigen::Matrix2cd::Identity() + C(0, std::sin(angle)) * sigma;
}

double privacy_residual(const MatrixXc& u, const MatrixXc& v, const VectorXc& omega) {
  if (u.rows() != u.cols() || v.rows() != v.cols() || omega.size() != u.rows() * v.rows())
    throw ConfigError("privacy residual: shape mismatch");
  double f = 0.0;
  for (const auto& t : privacy_terms(u, v, omega)) f += std::norm(t);
  return f;
}

double privacy_residual(const QubitSchemeParams& params) {
  params.validate();
  return privacy_residual(qubit_unitary(params.nu, params.m_hat),
                          qubit_unitary(params.theta, params.n_hat), VectorXc(params.omega));
}

Json NogoResult::to_json() const {
  return Json{{"min_residual", min_residual},
              {"floor", kQubitNogoFloor},
              {"above_floor", above_floor},
              {"restarts", restarts},
              {"best", best.to_json()}};
}

NogoResult qubit_nogo_search(std::size_t restarts, std::size_t iterations, Rng& rng) {
  if (restarts < 1) throw ConfigError("at least one restart is required");
  if (iterations < 1) throw ConfigError("at least one iteration is required");
  NogoResult result;
  result.restarts = restarts;
  result.min_residual = std::numeric_limits<double>::infinity();

  NogoFunctor functor;
  Eigen::NumericalDiff<NogoFunctor> numeric(functor);
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng start = rng.split("restart", r);
    Eigen::VectorXd x(kInputs);
    x[0] = start.uniform(0.0, kTwoPi);
    x[1] = start.uniform(0.0, kTwoPi);
    x[2] = std::acos(start.uniform(-1.0, 1.0));
    x[3] = start.uniform(0.0, kTwoPi);
    x[4] = std::acos(start.uniform(-1.0, 1.0));
    x[5] = start.uniform(0.0, kTwoPi);
    for (int j = 6; j < kInputs; ++j) x[j] = start.normal();

    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<NogoFunctor>> lm(numeric);
    lm.parameters.maxfev = static_cast<Eigen::Index>(iterations);
    lm.minimize(x);

    const QubitSchemeParams p = params_from_vector(x);
    const double f = privacy_residual(p);
    if (f < result.min_residual) {
      result.min_residual = f;
      result.best = p;
    }
  }
  result.above_floor = result.min_residual >= kQubitNogoFloor;
  return result;
}

double qutrit_solution_check(const std::array<double, 3>& eigenphases) {
  const std::vector<double> phases(eigenphases.begin(), eigenphases.end());
  const MatrixXc u = LocalUnitary::diagonal_phases(phases).matrix();
  return privacy_residual(u, u, prepare_tb_ballot(3).amplitudes());
}

double qutrit_solution_check() {
  return qutrit_solution_check({kTwoPi / 3.0, 2.0 * kTwoPi / 3.0, kTwoPi});
}

Json AnsatzReport::to_json() const {
  return Json{{"second_harmonic", second_harmonic},
              {"first_harmonic", first_harmonic},
              {"normalization", normalization},
              {"holds", holds}};
}

AnsatzReport ansatz_check(std::size_t d, const std::vector<double>& etas,
                          const std::vector<double>& alphas, double tolerance) {
  if (etas.size() != d || alphas.size() != d) throw ConfigError("etas and alphas must have length d");
  std::complex<double> first = 0.0, second = 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double w = alphas[j] * alphas[j];
    first += w * std::polar(1.0, etas[j]);
    second += w * std::polar(1.0, 2.0 * etas[j]);
    total += w;
  }
  AnsatzReport r;
  r.first_harmonic = std::abs(first);
  r.second_harmonic = std::abs(second);
  r.normalization = std::abs(total - 1.0);
  r.holds = r.first_harmonic <= tolerance && r.second_harmonic <= tolerance && r.normalization <= tolerance;
  return r;
}

}  // namespace qvote
