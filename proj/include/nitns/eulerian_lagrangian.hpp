#pragma once

#include <optional>

#include "nitns/field.hpp"
#include "nitns/stepper.hpp"
#include "nitns/tensor.hpp"

namespace nitns {

/// State of the diffusive near-identity system. The map is A = x + ell;
/// v is the virtual velocity and u = P((grad A)^T v) the fluid velocity.
struct ELState {
  SpectralField ell;
  SpectralField v;
  /// Evolved log det(grad A), present when tracked.
  std::optional<SpectralField> logdet;
  /// Evolved virtual vorticity (3D only), present when tracked.
  std::optional<SpectralField> zeta;
  double t = 0.0;
  /// Time of the last reset of ell to zero.
  double t1 = 0.0;
  int restart_count = 0;
  /// Reset threshold on sup_x |grad ell|_F.
  double g = 0.1;
  /// sup_x |grad ell|_F at the end of the last step, before any reset.
  double peak_grad_ell = 0.0;
};

/// Fresh window: ell = 0, v = u0, optional trackers at their reset values.
ELState make_el_state(const SpectralField& u0, double g, bool evolve_logdet, bool evolve_zeta,
                      double t = 0.0);

/// Pointwise matrices are stored row-major as components r * dim + c.
/// grad A has (grad A)_{mj} = d_j A^m = delta_mj + d_j ell_m.
PhysicalField grad_map(const SpectralField& ell);

struct InverseJacobian {
  PhysicalField q;    ///< Q = (grad A)^{-1}
  PhysicalField det;  ///< det(grad A)
  double min_abs_det = 0.0;
};

/// Determinant guard below which the map is treated as non-invertible.
inline constexpr double kMinDeterminant = 0.1;
/// Relative overshoot of g beyond which a step is refined by halving so the
/// reset lands near the threshold.
inline constexpr double kRestartOvershoot = 0.02;

/// Pointwise inverse of grad A. Throws InvertibilityError if |det| < 0.1
/// anywhere.
InverseJacobian inverse_grad(const PhysicalField& grad_a);

/// Eulerian-Lagrangian gradient, grad^A_i f_c = Q_ji d_j f_c, laid out as
/// components c * dim + i.
PhysicalField el_gradient(const SpectralField& f, const PhysicalField& q);

struct VirtualVorticity {
  enum class Provenance { derived_from_v, evolved };
  PhysicalField zeta;  ///< 3 components in 3D, 1 in 2D
  Provenance provenance = Provenance::derived_from_v;
};

/// zeta = grad^A x v.
VirtualVorticity el_curl(const SpectralField& v, const PhysicalField& q);

/// Commutator coefficients C^m_{k;i} = Q_ji d_j d_k ell_m, stored at
/// component (m * dim + k) * dim + i.
struct Connection {
  PhysicalField c;
  int dim = 3;
  double operator()(int m, int k, int i, std::size_t p) const {
    return c.at((m * dim + k) * dim + i, p);
  }
};

Connection connection_coeffs(const SpectralField& ell, const PhysicalField& q);

/// -u . grad ell - u (diffusion handled by the integrating factor).
SpectralField displacement_rhs(const SpectralField& ell, const SpectralField& u);
/// -u . grad v_i + 2 nu C^m_{k;i} d_k v_m.
SpectralField virtual_velocity_rhs(const SpectralField& v, const SpectralField& u,
                                   const Connection& c, double nu);
/// u = P((grad A)^T v), divergence-free with zero mean, dealiased.
SpectralField weber_velocity(const SpectralField& ell, const SpectralField& v);

/// Pointwise omega = C(zeta, grad A); in 2D omega = det(grad A) zeta.
PhysicalField cauchy_vorticity(const PhysicalField& zeta, const PhysicalField& grad_a);

/// Evolved virtual vorticity (3D):
/// -u . grad zeta_q + 2 nu C^m_{k;m} d_k zeta_q - 2 nu C^q_{k;j} d_k zeta_j
///   + nu C^m_{k;i} C^r_{k;j} eps_qji eps_rmp zeta_p.
SpectralField virtual_vorticity_rhs(const SpectralField& zeta, const SpectralField& u,
                                    const Connection& c, double nu);

/// Source nu C^i_{k;s} C^s_{k;i} of the log-determinant equation.
PhysicalField logdet_rhs(const Connection& c, double nu);

/// Right-hand side of the coefficient evolution law,
/// dC/dt = -u . grad C + nu Lap C - (d_l A^m) grad^A_i (d_k u_l)
///         - (d_k u_l) C^m_{l;i} + 2 nu C^j_{l;i} d_l C^m_{k;j},
/// evaluated for the current ell and velocity u. Used as a consistency check
/// against time-differenced recomputed coefficients.
PhysicalField connection_rate(const SpectralField& ell, const SpectralField& u, double nu);

/// sup_x |grad ell(x)|_F.
double max_grad_ell(const SpectralField& ell);

enum class RestartDecision { continue_run, restart };

RestartDecision restart_check(const ELState& state);
/// v <- weber_velocity(ell, v), ell <- 0, t1 <- t, trackers reset.
void apply_restart(ELState& state);

/// Nonlinear right-hand side of the coupled (ell, v, [logdet], [zeta]) system.
RhsFn el_rhs(double nu, bool has_logdet, bool has_zeta);

/// Coupled advance of ell and v (plus trackers) with the shared integrator,
/// followed by the restart check. A step that overshoots g by more than
/// kRestartOvershoot is redone in halves (up to 6 levels) and then stops at
/// the reset, so the returned state may lie short of t + dt. On
/// InvertibilityError the step is redone as 2, 4, ... 32 substeps before the
/// error propagates.
ELState el_step(const ELState& state, double nu, double dt, Scheme scheme);

/// Kinematic self-consistency of an EL state.
struct ELConsistency {
  double max_grad_ell = 0.0;
  double min_det = 1.0;
  /// |curl(Weber u) - C(zeta, grad A)|_2 / |curl u|_2.
  double weber_cauchy_err = 0.0;
  /// sup |evolved log det - log det(grad A)|, NaN when not tracked.
  double logdet_err = 0.0;
  /// |evolved zeta - grad^A x v|_2 / |grad^A x v|_2, NaN when not tracked.
  double zeta_gap = 0.0;
};

ELConsistency el_consistency(const ELState& state);

}  // namespace nitns
