#pragma once

// Privacy-condition checks and the qubit/qutrit feasibility searches.

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qvote/ballots.hpp"
#include "qvote/transcript.hpp"

namespace qvote {

struct PrivacyReport {
  Scheme scheme = Scheme::DistributedBallot;
  std::size_t d = 0;
  std::size_t n = 0;
  bool pass = false;
  double worst_same_deviation = 0.0;  // max | 1 - |<a|b>| | over equal tallies
  double worst_cross_overlap = 0.0;   // max |<a|b>| over different tallies
  std::size_t same_pairs = 0;
  std::size_t cross_pairs = 0;

  Json to_json() const;
};

inline constexpr std::size_t kPrivacyMaxVoters = 16;

/// Builds the returned ballot for every v in {Y, N}^N and checks the overlap
/// conditions. d is not required to exceed N, so aliasing shows up as a
/// failure rather than an error.
PrivacyReport check_privacy(Scheme scheme, std::size_t d, std::size_t n,
                            double tolerance = tol::kPipeline);

struct ReducedCheck {
  double deviation = 0.0;  // max |rho_S - I / D|
  bool pass = false;
};

ReducedCheck check_reduced_identity(const PureState& state, const std::vector<std::size_t>& sites,
                                    double tolerance = tol::kPipeline);

// ---------------------------------------------------------------------------
// Two-voter feasibility

/// U = cos(nu) I + i sin(nu) m.sigma, V = cos(theta) I + i sin(theta) n.sigma,
/// and a two-qubit ballot omega.
struct QubitSchemeParams {
  double nu = 0.0;
  Eigen::Vector3d m_hat = Eigen::Vector3d::UnitZ();
  double theta = 0.0;
  Eigen::Vector3d n_hat = Eigen::Vector3d::UnitZ();
  Eigen::Vector4cd omega = Eigen::Vector4cd::UnitX();

  void validate() const;
  Json to_json() const;
};

Eigen::Matrix2cd qubit_unitary(double angle, const Eigen::Vector3d& axis);

/// f = |<U x I>|^2 + |<I x V>|^2 + |<U x V>|^2 + |1 - <U x V^+>|^2 in the
/// ballot state. Zero iff both votes are hidden and the tally is readable.
double privacy_residual(const MatrixXc& u, const MatrixXc& v, const VectorXc& omega);
double privacy_residual(const QubitSchemeParams& params);

/// Lower bound on the qubit minimum, produced by the grid oracle in
/// tests/oracles and stored alongside it in tests/fixtures/nogo_floor.json.
inline constexpr double kQubitNogoFloor = 0.4999995;

struct NogoResult {
  double min_residual = 0.0;
  QubitSchemeParams best;
  std::size_t restarts = 0;
  bool above_floor = false;

  Json to_json() const;
};

/// Multi-start Levenberg-Marquardt over all qubit parameters.
NogoResult qubit_nogo_search(std::size_t restarts, std::size_t iterations, Rng& rng);

/// Residual of U = V = diag(e^{i phi_0}, e^{i phi_1}, e^{i phi_2}) with the
/// maximally entangled qutrit ballot.
double qutrit_solution_check(const std::array<double, 3>& eigenphases);
/// The stated solution phi_j = 2 pi (j + 1) / 3.
double qutrit_solution_check();

struct AnsatzReport {
  double second_harmonic = 0.0;  // |sum_j |a_j|^2 e^{2 i eta_j}|
  double first_harmonic = 0.0;   // |sum_j |a_j|^2 e^{i eta_j}|
  double normalization = 0.0;    // |sum_j |a_j|^2 - 1|
  bool holds = false;

  Json to_json() const;
};

AnsatzReport ansatz_check(std::size_t d, const std::vector<double>& etas,
                          const std::vector<double>& alphas, double tolerance = tol::kPipeline);

}  // namespace qvote
