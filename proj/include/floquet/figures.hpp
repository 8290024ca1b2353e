#pragma once

#include "floquet/model.hpp"
#include "floquet/oracle.hpp"
#include "floquet/pert.hpp"
#include "floquet/pulse.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace floquet {

/// Runs body(i) for i in [0, n) on up to `threads` workers. Results must be
/// written to per-index slots; the first exception is rethrown.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

// ---------------------------------------------------------------------------
// Exact reference for one amplitude.

struct OraclePoint {
  double omega_d = 0.0;
  /// n w_d - (E_target - E_0).
  double epsilon = 0.0;
  /// pi / t_op.
  double rabi = 0.0;
  double fidelity = 0.0;
  double t_op = 0.0;
  bool flagged = false;
};

/// optimize_transfer over w_center +- half_width (default 1.5 rabi_estimate / n)
/// with t_max = t_factor * pi / rabi_estimate.
OraclePoint oracle_optimum(const SystemFamily& family, int target, int photon_number,
                           double omega_center, double rabi_estimate,
                           const TransferOptions& options = {}, double half_width = 0.0,
                           double t_factor = 1.3);

/// Perturbative prediction at cumulative order r_h, on resonance.
struct OrderPrediction {
  int r_h = 0;
  double omega_d = 0.0;
  double epsilon = 0.0;
  double rabi = 0.0;
  double t_pi = 0.0;
};

OrderPrediction predict_resonance(const SystemFamily& family, int target, int photon_number,
                                  int r_h, const SambeOptions& sambe = {});

/// Oracle |<target|psi(t)>|^2 from |initial> under a constant drive.
double square_pulse_fidelity(const DrivenSystem& system, int initial, int target, double t,
                             const IntegratorConfig& config = {});

/// Time of maximal transfer predicted by (r_h, r_w) at the system's drive
/// frequency, searched on [0, t_max].
TransferPeak predicted_transfer(const DrivenSystem& system, int target, int photon_number, int r_h,
                                int r_w, double t_max, int samples_per_period = 64);

// ---------------------------------------------------------------------------
// Subharmonic Rabi model (w01 = 1, n_1 = 3).

struct RabiDynamics {
  double ratio = 0.0;  // Omega_x / w01
  double omega_d = 0.0;
  double t_op = 0.0;
  double oracle_peak = 0.0;
  std::vector<double> times;
  std::vector<double> oracle;
  /// (r_H, r_W) and the predicted population of |1>.
  std::vector<std::pair<std::pair<int, int>, std::vector<double>>> predictions;
  /// r_H-only t_pi = pi / Omega_R and peak transfer 4|Omega_10|^2 / Omega_R^2
  /// at omega_d, per entry of `predictions`.
  std::vector<double> t_pi;
  std::vector<double> peak_transfer;
};

/// Populations over [0, 2 t_op] at the oracle-optimal drive frequency.
RabiDynamics rabi_dynamics(double ratio, const std::vector<std::pair<int, int>>& orders,
                           int samples_per_period = 64);

// ---------------------------------------------------------------------------
// Fluxonium three-photon transition (D = {0, 1}, n_1 = 3).

struct FluxoniumOrder {
  OrderPrediction prediction;
  /// Oracle fidelity of the square pulse at (omega_d, t_pi) of this order.
  double f_square = 0.0;
  /// Oracle fidelity at the oracle-optimal w_d and the (r_H, r_W) transfer time.
  double f_timed = 0.0;
  double t_timed = 0.0;
};

struct FluxoniumPoint {
  double amplitude = 0.0;  // A / 2 pi
  OraclePoint oracle;
  std::vector<FluxoniumOrder> orders;
};

struct FluxoniumOptions {
  std::vector<int> orders{3, 5, 7};
  bool fidelities = true;
  int r_w = 4;
  int threads = 1;
  FluxoniumSpec spec;
};

std::vector<FluxoniumPoint> fluxonium_sweep(const std::vector<double>& amplitudes,
                                            const FluxoniumOptions& options = {});

struct PulsePoint {
  double amplitude = 0.0;  // A / 2 pi
  int r_h = 0;
  bool solved = false;
  std::string failure;
  PulseDesign design;
  double f_designed = 0.0;
  double f_square = 0.0;
};

struct PulseSweepOptions {
  std::vector<int> orders{3, 5, 7};
  double sigma = 4.0;
  double t0 = 18.0;
  MagnusScheme scheme = MagnusScheme::Toggling;
  int threads = 1;
  FluxoniumSpec spec;
};

/// Designed flat-top pulses (convergence check reported, not enforced) and
/// the square pulse of the same order for reference.
std::vector<PulsePoint> pulse_sweep(const std::vector<double>& amplitudes,
                                    const PulseSweepOptions& options = {});

// ---------------------------------------------------------------------------
// Transmon three-photon transition against the RWA frame-change formulas.

struct TransmonPoint {
  double amplitude_ghz = 0.0;  // A / 2 pi
  double eps_dpt = 0.0, eps_rwa = 0.0, eps_num = 0.0;
  double coupling_dpt = 0.0, coupling_rwa = 0.0, coupling_num = 0.0;
  /// Oracle peak transfer and its flag.
  double fidelity = 0.0;
  bool flagged = false;
};

struct TransmonOptions {
  int r_h = 3;
  int threads = 1;
  TransmonSpec spec;
};

std::vector<TransmonPoint> transmon_sweep(const std::vector<double>& amplitudes_ghz,
                                          const TransmonOptions& options = {});

}  // namespace floquet
