#pragma once

#include "floquet/model.hpp"
#include "floquet/pert.hpp"

#include <string>
#include <vector>

namespace floquet {

/// Bare-basis amplitudes c_l(t) sampled on a time grid.
struct EvolutionResult {
  std::vector<double> times;
  /// amplitudes(i, l) = c_l(times[i]).
  Eigen::MatrixXcd amplitudes;
  std::vector<int> degenerate_set;
  int r_h = 0;
  int r_w = 0;
  double omega_d = 0.0;
  bool normalized = false;
  /// |c(0) - c_init| of the reconstructed initial state.
  double initial_mismatch = 0.0;
  std::string source;

  int levels() const { return static_cast<int>(amplitudes.cols()); }
  Eigen::MatrixXd populations() const { return amplitudes.cwiseAbs2(); }
  /// 1 - sum_{l in D} |c_l|^2 per sample.
  std::vector<double> leakage() const;
};

/// Uniform grid on [0, t_end] with the given density per drive period.
std::vector<double> time_grid(double t_end, double omega_d, int samples_per_period = 64);

/// exp(-i H t) by Hermitian eigendecomposition.
CMatrix u_eff(const CMatrix& h, double t);

enum class WProduct {
  /// sum_{i+j <= r_W} W_i e^{-iHt} W_j^dagger: consistent order by order.
  Truncated,
  /// W^{[r_W]} e^{-iHt} W^{[r_W]dagger}.
  Full,
};

struct EvolveOptions {
  bool normalize = true;
  WProduct product = WProduct::Truncated;
  /// Largest tolerated norm of the initial state outside D.
  double initial_tolerance = 1e-6;
};

/// c_l(t) = sum_{p} e^{-i(E_0 + p w_d) t} <<l,p| W e^{-iHt} W^dagger S^dagger(0)|psi(0)>>.
/// `initial` holds bare-basis amplitudes on all levels and must lie in D.
EvolutionResult amplitudes(const ResonantDecomposition& decomp, const CMatrix& heff,
                           const WOperator& w, const CVector& initial,
                           const std::vector<double>& times, const EvolveOptions& options = {});

/// Closed-form first-order evolution with W = P + W_1, evaluated directly
/// from the harmonics without Sambe matrices.
EvolutionResult first_order_amplitudes(const DrivenSystem& system,
                                       const ResonantDecomposition& decomp, const CMatrix& heff,
                                       const CVector& initial, const std::vector<double>& times,
                                       bool normalize = true);

struct TransferPeak {
  double t_op = 0.0;
  double population = 0.0;
  std::size_t sample = 0;
  /// The maximum sits on the first or last sample (no interior peak).
  bool boundary = false;
};

/// First global maximum of |c_target|^2, refined by a parabola through the
/// neighbouring samples.
TransferPeak max_transfer(const EvolutionResult& result, int target);

/// Convenience: initial state |k> on the full level set.
CVector basis_state(int levels, int k);

}  // namespace floquet
