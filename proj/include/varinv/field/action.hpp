#pragma once

// Midpoint-rule discretization of the extended-space Lagrangian
//   <E, dA~/dt> + <grad mu, grad(dpsi/dt - phi)> - H(A~, E)
// and its discrete Euler-Lagrange residuals on a stored trajectory.

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "varinv/field/maxwell.hpp"

namespace varinv::field {

struct TrajectoryError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ActionValue {
  double kinetic = 0;      // sum dt <E_bar, (A~_{m+1} - A~_m)/dt>
  double gauge = 0;        // sum dt <grad mu_bar, grad((psi_{m+1} - psi_m)/dt - phi)>
  double hamiltonian = 0;  // sum dt H(A~_bar, E_bar)
  double total = 0;
};

/// States are consecutive leapfrog outputs spaced by the grid time step.
ActionValue discrete_action(Spectral& spectral, const std::vector<ExtendedState>& trajectory,
                            const Gauge& g);

struct StationarityReport {
  double e_residual = 0;        // variation in E
  double a_residual = 0;        // variation in A~
  double psi_rate_residual = 0;  // variation in mu: dpsi/dt = phi
  double mu_rate_residual = 0;   // variation in psi: dmu/dt = 0
  long interior_times = 0;

  double field_residual() const { return std::max(e_residual, a_residual); }
  double residual() const {
    return std::max({e_residual, a_residual, psi_rate_residual, mu_rate_residual});
  }
};

/// Maxnorms of the discrete Euler-Lagrange expressions at interior times,
/// divided by dt and the cell volume.
StationarityReport action_stationarity(Spectral& spectral,
                                       const std::vector<ExtendedState>& trajectory,
                                       const Gauge& g);

}  // namespace varinv::field
