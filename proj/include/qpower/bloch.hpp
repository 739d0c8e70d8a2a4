#pragma once

// Driven two-level system in the frame rotating with the drive:
//   H = (hbar*dw/2) sigma_z - (hbar*Omega/2) sigma_x,
// relaxation Gamma1 and total dephasing Gamma2. The density matrix is reduced to
// the Bloch triple (rho11, Re rho10, Im rho10) with rho10 = <sigma^->.
//
// steady_state() is the closed-form fixed point. evolve()/propagate() integrate
// the same equations with fixed-step classical RK4 and serve as the numerical
// oracle for every analytic formula downstream.

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "qpower/series.hpp"
#include "qpower/units.hpp"

namespace qpower {

struct DensityState {
  double rho11 = 0.0;                 // excited-state population
  std::complex<double> rho10{0.0};    // coherence <sigma^->

  static DensityState ground() { return {}; }
  static DensityState excited() { return {1.0, {0.0, 0.0}}; }

  /// True if the state is a valid density matrix within tol.
  bool is_physical(double tol = 1e-9) const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityState> states;
};

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stationary solution of the Bloch equations. Omega = 0 gives the ground state.
DensityState steady_state(const SensorParams& sensor, const DriveConfig& drive);

/// Largest step allowed for a given drive: min(dt_max, 1/(50*fastest rate)).
double max_step(const SensorParams& sensor, const DriveConfig& drive, double dt_max);

/// Full trajectory on a uniform grid from t = 0 to t_end (both included).
Trajectory evolve(const SensorParams& sensor, const DriveConfig& drive,
                  const DensityState& initial, double t_end, double dt_max);

/// Final state only; same stepping as evolve().
DensityState propagate(const SensorParams& sensor, const DriveConfig& drive,
                       const DensityState& initial, double t_end, double dt_max);

/// Integrates from the ground state until transients have decayed by e^-settle.
/// The Bloch generator is -diag(G1, G2, G2) plus a skew-symmetric part, so the
/// distance to the fixed point contracts at least as fast as exp(-min(G1,G2) t).
DensityState integrate_to_steady_state(const SensorParams& sensor, const DriveConfig& drive,
                                       double settle = 40.0);

/// Resonant Rabi experiment: for each pulse length, start in the ground state,
/// drive for tau and record Im<sigma^->. Output preserves the input order.
MeasurementSeries rabi_trace(const SensorParams& sensor, const DriveConfig& drive,
                             std::span<const double> pulse_lengths);

}  // namespace qpower
