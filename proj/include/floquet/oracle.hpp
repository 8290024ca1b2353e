#pragma once

#include "floquet/evolve.hpp"
#include "floquet/model.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace floquet {

struct IntegratorConfig {
  /// Initial steps per drive period (dt = T / steps).
  int steps_per_period = 256;
  /// Accepted change of the one-period propagator under dt -> dt/2.
  double period_tolerance = 1e-10;
  /// Accepted sup-norm change of the sampled populations under dt -> dt/2.
  double population_tolerance = 1e-8;
  int max_halvings = 4;
  double norm_drift = 1e-8;
};

/// Fills `out` with H(t).
using HamiltonianFn = std::function<void(double t, CMatrix& out)>;

/// Fourth-order commutator-free exponential integrator (two exponentials per
/// step at the Gauss nodes). Returns U(t1, t0).
CMatrix cf4_propagator(const HamiltonianFn& h, double t0, double t1, int steps);

/// H(t) = diag(E) + s * sum_p Vbar_p e^{-i p w_d t}.
HamiltonianFn periodic_hamiltonian(const DrivenSystem& system, double drive_scale = 1.0);

/// Exact state evolution. Uses psi(nT + s) = U(s) U_T^n psi(0) and halves
/// the step until the populations change by less than the tolerance.
EvolutionResult integrate(const DrivenSystem& system, const CVector& psi0,
                          const std::vector<double>& times, const IntegratorConfig& config = {});

/// Evolution at one fixed step count, without convergence control.
EvolutionResult integrate_fixed(const DrivenSystem& system, const CVector& psi0,
                                const std::vector<double>& times, int steps_per_period);

/// One-period propagator, converged by step halving.
CMatrix period_propagator(const DrivenSystem& system, const IntegratorConfig& config = {},
                          int* steps_used = nullptr);

struct QuasiEnergies {
  /// Eigenphases / T folded to (-w_d/2, w_d/2].
  std::vector<double> values;
  /// Floquet states at t = 0 (columns).
  CMatrix vectors;
  /// labels[k]: column continued from bare level k.
  std::vector<int> labels;
  /// Overlap of each label assignment.
  std::vector<double> overlaps;
  /// Some assignment had overlap < 0.5 or was not unique.
  bool ambiguous = false;
};

/// Quasi-energies of the one-period propagator. With continuation_steps > 0
/// the drive is ramped from zero in that many steps and labels follow the
/// eigenvectors by maximal overlap; otherwise they are matched to bare states.
QuasiEnergies quasi_energies(const DrivenSystem& system, const IntegratorConfig& config = {},
                             int continuation_steps = 0);

double fold_quasi_energy(double q, double omega_d, double center = 0.0);

/// Effective Hamiltonian on D reconstructed from the exact Floquet states:
/// the d Floquet modes with the largest weight on the |k, n_k>> sectors are
/// projected there, symmetrically orthonormalized and combined with their
/// quasi-energies (measured from E_0).
struct FloquetEffective {
  CMatrix h;
  /// Weight of each selected Floquet mode on the P support.
  std::vector<double> weights;
  bool ambiguous = false;
};

FloquetEffective floquet_effective_hamiltonian(const DrivenSystem& system,
                                               const ResonantDecomposition& decomp,
                                               const IntegratorConfig& config = {});

struct FloquetResonance {
  double omega_d = 0.0;
  CMatrix h;
  double rabi = 0.0;
  double coupling = 0.0;  // |Omega_10|
  bool ambiguous = false;
};

/// Root of the exact detuning delta_target - delta_0 in the bracket.
FloquetResonance floquet_resonance(const SystemFamily& family, int target,
                                   std::pair<double, double> bracket,
                                   const IntegratorConfig& config = {});

struct TransferOptions {
  int target = 1;
  int initial = 0;
  int grid_points = 41;
  int samples_per_period = 64;
  double omega_tolerance = 1e-8;
  IntegratorConfig integrator;
};

struct TransferOptimum {
  double omega_d = 0.0;
  double t_op = 0.0;
  double fidelity = 0.0;
  /// F_max < 0.5 or the optimum sits on the window edge.
  bool flagged = false;
  std::vector<std::pair<double, double>> grid;  // (w_d, F_max)
};

/// Maximal population transfer over t in [0, t_max] at fixed w_d.
TransferPeak transfer_at(const SystemFamily& family, double omega_d, double t_max,
                         const TransferOptions& options);

/// Coarse grid over the window followed by golden-section refinement.
TransferOptimum optimize_transfer(const SystemFamily& family, std::pair<double, double> window,
                                  double t_max, const TransferOptions& options = {});

}  // namespace floquet
