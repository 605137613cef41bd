#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nitns/eulerian_lagrangian.hpp"
#include "nitns/field.hpp"
#include "nitns/mollifier.hpp"

namespace nitns {

// Conventions: energies, dissipation and enstrophy are physical integrals
// over the box and carry the (2 pi)^d volume factor. Analytic norms and the
// Gevrey quantity are bare sums over the spectral lattice.

/// One row of the monitored time series. NaN marks a quantity that does not
/// apply to the run (written as an empty CSV cell).
struct DiagnosticsRecord {
  double t = 0.0;
  double K = 0.0;
  double eps = 0.0;
  double enstrophy = 0.0;
  double omega_l1 = 0.0;
  double dir_diss = 0.0;
  double alpha_max = 0.0;
  double u_linf = 0.0;
  double suf1 = 0.0;
  double suf2 = 0.0;
  double maxu = 0.0;
  double y_gevrey = 0.0;
  double analytic_norm = 0.0;
  double budget_residual = 0.0;
  double paired_energy = 0.0;
  double paired_residual = 0.0;
  double max_grad_ell = 0.0;
  double logdet_err = 0.0;
  double weber_cauchy_err = 0.0;
  double zeta_gap = 0.0;
  double min_det = 0.0;
  int restarts = -1;
  double t1 = 0.0;
  double G = 0.0;
  double rho = 0.0;
  double tau = 0.0;
  double interpolation_ratio = 0.0;
  double mode_bound_excess = 0.0;
  double ltwo_ratio = 0.0;
  double nablaeltwo_ratio = 0.0;
  double maxdel_ratio = 0.0;
  double lbound_ratio = 0.0;
  double grl_ratio = 0.0;
};

/// Column names of the main time-series CSV, in order.
const std::vector<std::string>& csv_columns();
/// Columns of the companion file with the remaining monitored ratios.
const std::vector<std::string>& extra_csv_columns();
std::vector<double> csv_values(const DiagnosticsRecord& r);
std::vector<double> extra_csv_values(const DiagnosticsRecord& r);

struct NondimNumbers {
  double R0 = 0.0;
  double G = 0.0;
  double rho = 0.0;
  double lambda_tilde = 0.0;
  /// Dimensional analyticity length sqrt(nu T) lambda_tilde.
  double lambda = 0.0;
  double U_r = 0.0;
  double tau = 0.0;
  double g = 0.0;
  /// False when nu = 0 or T = 0; the dependent fields are then NaN.
  bool applicable = true;
};

/// Inputs are K(0), initial enstrophy, the running maximum enstrophy.
/// Constants of the scaling relations are set to 1; r = (1 - gamma) lambda
/// with gamma = 1/8.
NondimNumbers nondim_numbers(double K0, double enstrophy0, double max_enstrophy, double nu,
                             double T, double g, double s0);

/// Fraction gamma in r = (1 - gamma) lambda.
inline constexpr double kGamma = 0.125;
/// Largest exponent accepted by the exponential weights.
inline constexpr double kMaxWeightExponent = 300.0;

double kinetic_energy(const SpectralField& u);
/// Physical quadrature variant.
double kinetic_energy(const PhysicalField& u);
/// int |omega|^2 (scalar omega in 2D).
double enstrophy(const SpectralField& omega);
/// nu int |grad u|^2.
double dissipation_rate(const SpectralField& u, double nu);

struct BudgetSample {
  double t;
  double K;
  double eps;
};
/// K(t_last) + int eps ds - K(t_first) with the trapezoid rule.
double energy_budget_residual(std::span<const BudgetSample> series);

struct VortexEnergyPair {
  double energy_physical = 0.0;   ///< 1/2 int u . [u]
  double energy_spectral = 0.0;   ///< 1/2 (2 pi)^d sum J^-1 |[u]_k|^2
  double dissipation_physical = 0.0;  ///< nu int tr(grad u grad [u]^T)
  double dissipation_spectral = 0.0;  ///< nu (2 pi)^d sum J^-1 |k|^2 |[u]_k|^2
  /// 1/2 int |J^-1/2 [u]|^2 and its gradient counterpart; empty with a
  /// reason when the inverse square root is not representable.
  std::optional<double> gevrey_energy;
  std::optional<double> gevrey_dissipation;
  std::string omitted_reason;
};

VortexEnergyPair vortex_energy_pair(const SpectralField& u, const Mollifier& m, double nu);

struct DirectionField {
  PhysicalField xi;                   ///< 3 components; (0,0,1) in 2D
  std::vector<unsigned char> defined;  ///< 0 where |omega| <= 1e-12 max|omega|
};

DirectionField vorticity_direction(const SpectralField& omega);
/// int |omega| |grad xi|^2 over the region where xi is defined; 0 in 2D.
double direction_dissipation(const SpectralField& omega);
/// alpha = xi . S xi, zero where xi is undefined and identically zero in 2D.
PhysicalField stretching_alpha(const SpectralField& u, const SpectralField& omega);

/// {sum_k exp(p lambda |k|) |f_k|^p}^(1/p), |f_k| the Euclidean norm over
/// components. Throws OverflowGuardError when lambda |k|max > 300.
double analytic_norm(const SpectralField& f, double lambda, int p);

/// y(t) = sum_k exp(2 sqrt(nu/T) (t - s) |k|) |omega_k|^2.
double gevrey_y(const SpectralField& omega, double nu, double T, double s, double t);

/// max_k (|u_k| - |omega_k| / |k|) / max_k |u_k| over nonzero modes; never
/// positive beyond roundoff for divergence-free u with omega = curl u.
double mode_bound_excess(const SpectralField& u, const SpectralField& omega);

/// |u|_inf / (sqrt(4 pi) |omega|_2^1/2 |grad omega|_2^1/2).
double interpolation_ratio(const SpectralField& u, const SpectralField& omega);

/// Measured-to-bound ratios for the displacement of one reset window.
struct DisplacementBounds {
  double maxdel = 0.0;      ///< |ell|_inf / K_inf
  double ltwo = 0.0;        ///< int |ell|^2 / (2 K0 (t - t1)^2)
  double nablaeltwo = 0.0;  ///< int_t1^t int |grad ell|^2 / (K0 (t - t1)^2 / nu)
  double lbound = 0.0;      ///< |ell|_{A,r,1} / ((t - t1) U_r exp((t - t1) U_r^2 / nu))
  double grl = 0.0;         ///< gradient analogue at r1 = (1 - gamma) r
};

/// window_grad_sq is int_t1^t int |grad ell|^2 accumulated by the caller.
DisplacementBounds displacement_bound_report(const ELState& state, double window_grad_sq,
                                             double K0, double K_inf, double nu,
                                             const NondimNumbers& numbers);

struct MonitorOptions {
  double nu = 0.0;
  /// Horizon T of the Gevrey weight and of the non-dimensional numbers.
  double horizon = 0.0;
  double g = 0.1;
  double s0 = 0.25;
  double analytic_lambda = 0.1;
  int analytic_p = 2;
  /// Present for vortex and cotangent runs: enables the paired budget.
  std::optional<Mollifier> paired;
};

/// Accumulates the time integrals of a run. accumulate() must be called on
/// every step, record() only when a row is wanted.
class Monitor {
 public:
  explicit Monitor(MonitorOptions options) : opt_(std::move(options)) {}

  void accumulate(double t, const SpectralField& u, const SpectralField& omega,
                  const ELState* el = nullptr);
  DiagnosticsRecord record(const SpectralField& u, const SpectralField& omega,
                           const ELState* el = nullptr) const;
  NondimNumbers nondim() const;

  double K0() const { return K0_; }
  double max_enstrophy() const { return max_enstrophy_; }

 private:
  MonitorOptions opt_;
  bool started_ = false;
  double t0_ = 0.0;
  double t_ = 0.0;
  double K0_ = 0.0;
  double enstrophy0_ = 0.0;
  double max_enstrophy_ = 0.0;
  double K_ = 0.0;
  double eps_ = 0.0;
  double enstrophy_ = 0.0;
  double u_linf_ = 0.0;
  double int_eps_ = 0.0;
  double suf1_ = 0.0;
  double suf2_ = 0.0;
  double maxu_ = 0.0;
  double paired0_ = 0.0;
  double paired_ = 0.0;
  double paired_diss_ = 0.0;
  double int_paired_diss_ = 0.0;
  int restarts_seen_ = 0;
  double grad_sq_ = 0.0;
  double window_grad_sq_ = 0.0;
};

}  // namespace nitns
