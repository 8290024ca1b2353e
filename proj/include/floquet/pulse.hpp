#pragma once

#include "floquet/model.hpp"
#include "floquet/oracle.hpp"
#include "floquet/sambe.hpp"

#include <string>
#include <vector>

namespace floquet {

/// Flat-top envelope with Gaussian flanks:
///   E(t) = exp(-(t - t0)^2 / 2 sigma^2)        0 <= t < t0
///        = 1                                  t0 <= t <= T - t0
///        = exp(-(t - T + t0)^2 / 2 sigma^2)   T - t0 < t <= T
/// E(0) = exp(-t0^2 / 2 sigma^2) is not exactly zero.
struct Envelope {
  double sigma = 4.0;
  double t0 = 18.0;
  double duration = 0.0;

  void validate() const;
  double operator()(double t) const;
  double plateau() const { return duration - 2.0 * t0; }
};

/// H_eff as a polynomial in the drive scale s (V_drive -> s V_drive, the
/// static part untouched): H(s) = sum_j coefficients[j] s^j, exact for the
/// cumulative expansion up to r_h (degree <= r_h).
struct AmplitudePolynomial {
  std::vector<CMatrix> coefficients;
  int r_h = 0;
  double omega_d = 0.0;
  std::vector<int> photon_numbers;

  CMatrix at(double s) const;
};

AmplitudePolynomial heff_of_amplitude(const DrivenSystem& system,
                                      const ResonantDecomposition& decomp, int r_h,
                                      const SambeOptions& options = {});

/// Bch: H_M = (T - 2t0)/T (H + i t0 [S0,H] + t0 [S1,H] - t0^2/2 [S0,[S0,H]]),
///   the truncated BCH series of e^{-S} e^{-i(T-2t0)H} e^{S}, e^S = exp(-i t0 S0 - t0 S1).
/// Toggling: the diagonal part of H(t) - H(t0) is integrated exactly (it
///   commutes with itself); the rise and fall propagators in that frame are
///   second-order Magnus exponentials and U = U_fall e^{-i(T-2t0)H} U_rise is
///   recombined exactly, H_M = i log(U) / T.
enum class MagnusScheme { Bch, Toggling };

std::string to_string(MagnusScheme s);
MagnusScheme magnus_scheme_from_string(const std::string& s);

struct MagnusDesign {
  Envelope envelope;
  MagnusScheme scheme = MagnusScheme::Bch;
  /// Plateau value H_eff(t0), also H_M^(0).
  CMatrix h;
  /// S0 = (1/t0) int_0^t0 H dt (Hermitian), S1 = (1/2t0) int int_{t2<t1} [H(t1),H(t2)]
  /// (anti-Hermitian).
  CMatrix s0, s1;
  /// BCH terms of the BCH scheme (zero for Toggling).
  CMatrix hm1, hm2;
  /// Assembled generator: U(T) ~ exp(-i T H_M), H_M = -delta_M/2 sz + Omega^x sx + Omega^y sy + c.
  CMatrix h_m;
  double delta_m = 0.0;
  double omega_x = 0.0;
  double omega_y = 0.0;
  double omega_m = 0.0;
  /// int_0^t0 of the Rabi rate 2|H_10(t)|.
  double convergence_integral = 0.0;
  bool converges = true;
  /// (2 pi / w_d) / t0.
  double adiabatic_ratio = 0.0;
  bool adiabatic_flag = false;
  /// Magnus terms per ramp (S0, S1).
  int magnus_order = 2;
  /// Nested commutators kept in the BCH recombination; -1 when exact.
  int nested_commutators = 0;
};

MagnusDesign magnus_design(const AmplitudePolynomial& poly, const Envelope& envelope,
                           MagnusScheme scheme = MagnusScheme::Toggling);

/// kConvergenceBound = log 2.
extern const double kConvergenceBound;

struct PulseOptions {
  int r_h = 7;
  int target = 1;
  /// n_target, required.
  int photon_number = 0;
  double sigma = 4.0;
  double t0 = 18.0;
  MagnusScheme scheme = MagnusScheme::Toggling;
  double tolerance = 1e-8;
  int max_iterations = 50;
  /// Record a failed convergence check in the design instead of throwing.
  bool check_only = false;
  SambeOptions sambe;
};

struct PulseDesign {
  double omega_d = 0.0;
  double epsilon = 0.0;  // detuning eps_target = n w_d - (E_target - E_0)
  double duration = 0.0;
  MagnusDesign magnus;
  int iterations = 0;
  double residual = 0.0;
  /// Square-pulse reference at the same amplitude: resonance and pi time.
  double square_omega_d = 0.0;
  double square_t_pi = 0.0;
};

/// Solves delta_M = 0 and Omega_M T = pi/2 (full population inversion) by
/// alternating 1D solves. Throws ConvergenceError when the convergence
/// integral reaches log 2.
PulseDesign solve_pulse(const SystemFamily& family, const PulseOptions& options);

struct PulseEvaluation {
  double fidelity = 0.0;
  double leakage = 0.0;
  int steps_per_period = 0;
};

/// Integrates H(t) = diag(E) + E(t) sum_p Vbar_p e^{-i p w t} exactly and
/// returns |<target|psi(T)>|^2 from |initial>.
PulseEvaluation evaluate_pulse(const DrivenSystem& system, const Envelope& envelope, int initial,
                               int target, const IntegratorConfig& config = {});

}  // namespace floquet
