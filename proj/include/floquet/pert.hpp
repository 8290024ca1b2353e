#pragma once

#include "floquet/model.hpp"
#include "floquet/opalg.hpp"
#include "floquet/sambe.hpp"

#include <optional>
#include <vector>

namespace floquet {

/// Per-order effective Hamiltonian on the degenerate set, in the order of
/// decomp.degenerate_set.
struct EffectiveHamiltonian {
  std::vector<int> basis;
  /// orders[r - 1] = H^(r).
  std::vector<CMatrix> orders;
  int p_max = 0;
  int sambe_dimension = 0;
  std::vector<NearResonance> near_resonances;

  int max_order() const { return static_cast<int>(orders.size()); }
  int dimension() const { return static_cast<int>(basis.size()); }
  /// Sum of the orders 1..upto (all orders for upto < 0).
  CMatrix cumulative(int upto = -1) const;
  /// Stark shift delta_k, k given as a position in `basis`.
  double delta(int k, int upto = -1) const;
  /// Coupling Omega_lk = <l|H|k>, positions in `basis`.
  cplx omega(int l, int k, int upto = -1) const;
};

EffectiveHamiltonian effective_hamiltonian(const DrivenSystem& system,
                                           const ResonantDecomposition& decomp, int r_h,
                                           const SambeOptions& options = {});

/// W_r columns in the Sambe space, r = 0..r_W; column j belongs to
/// decomp.degenerate_set[j].
struct WOperator {
  SambeSpace space;
  std::vector<Eigen::MatrixXcd> orders;

  int max_order() const { return static_cast<int>(orders.size()) - 1; }
  Eigen::MatrixXcd cumulative(int upto = -1) const;
};

WOperator w_operator(const DrivenSystem& system, const ResonantDecomposition& decomp, int r_w,
                     const SambeOptions& options = {});

/// Both expansions evaluated on one shared Sambe space.
struct Expansion {
  EffectiveHamiltonian heff;
  WOperator w;
};

Expansion expand(const DrivenSystem& system, const ResonantDecomposition& decomp, int r_h,
                 int r_w, const SambeOptions& options = {});

/// One diagram contributing to <l|H^(r)|k>. Index j = 1..r labels the steps;
/// vectors are stored in step order (j = 1 first).
struct ProcessTerm {
  int order = 0;
  std::vector<int> photons;         // p_1..p_r
  std::vector<int> levels;          // a_1..a_{r-1}
  std::vector<int> exponents;       // m_1..m_{r-1}
  std::vector<double> denominators; // E~_k + (p_1+..+p_j) w_d - E~_{a_j}
  std::vector<bool> resonant;       // step j lands on the P support
  opalg::Rational coefficient;
  cplx amplitude;
};

inline constexpr std::size_t kDefaultProcessCap = 10'000'000;

/// Diagram enumeration of <l|H^(r)|k>, l and k given as level indices in D.
std::vector<ProcessTerm> enumerate_processes(const DrivenSystem& system,
                                             const ResonantDecomposition& decomp, int l, int k,
                                             int r, std::size_t cap = kDefaultProcessCap);

/// Two-level observables of an effective Hamiltonian.
struct RabiData {
  double detuning = 0.0;  // delta_1 - delta_0
  cplx coupling;          // Omega_10
  double rabi = 0.0;      // sqrt(detuning^2 + 4 |Omega_10|^2)
  double t_pi = 0.0;      // pi / rabi
};

RabiData rabi_frequency(const EffectiveHamiltonian& heff, int upto = -1);
RabiData rabi_frequency(const CMatrix& h);

struct ResonanceOptions {
  int r_h = 2;
  /// Level brought into resonance with level 0; D = {0, target}.
  int target = 1;
  /// n_target; inferred from the bracket midpoint when 0.
  int photon_number = 0;
  std::optional<std::pair<double, double>> bracket;
  int scan_points = 41;
  SambeOptions sambe;
};

struct ResonanceResult {
  /// Every root found in the bracket, ascending.
  std::vector<double> roots;
  /// The root closest to the second-order estimate.
  double omega_d = 0.0;
  double initial_guess = 0.0;
  std::pair<double, double> bracket;
  bool multiple_roots = false;
  /// |Delta(omega_d)| at the selected root.
  double residual = 0.0;
};

/// Detuning Delta(w_d) = delta_target - delta_0 at cumulative order r_h.
double resonance_detuning(const SystemFamily& family, double omega_d, const ResonanceOptions& opt);

/// Root of Delta(w_d) in a bracket around (E_t - E_0)/n_t.
ResonanceResult resonance_frequency(const SystemFamily& family, const ResonanceOptions& opt);

/// Leading-order closed forms, summed directly from the system matrices.
struct LeadingOrder {
  int photon_number = 0;         // n_1
  cplx coupling;                 // Omega_10^(n_1)
  std::vector<double> stark_shifts;  // delta_k^(2), k in D
};

LeadingOrder closed_form_leading(const DrivenSystem& system, const ResonantDecomposition& decomp);

/// Three-photon fluxonium expansions restricted to levels 0..4, with
/// eps = 3 w_d - (E_1 - E_0).
struct FluxoniumLeading {
  double eps = 0.0;
  double omega10_3 = 0.0;
  double delta_1 = 0.0;
  double delta_2 = 0.0;
  double delta_3 = 0.0;
};

FluxoniumLeading fluxonium_closed_form(const DrivenSystem& system,
                                       const ResonantDecomposition& decomp);

/// Large odd n_1 estimate of the Rabi-model coupling.
double rabi_coupling_asymptotic(int n1, double omega_x, double omega01);
/// Exact leading-order Rabi-model coupling for odd n_1 = 2q + 1.
double rabi_coupling_leading(int n1, double omega_x, double omega_d);
/// delta_0^(2) of the Rabi model.
double rabi_stark_leading(int n1, double omega_x, double omega_d);

}  // namespace floquet
