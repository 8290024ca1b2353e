#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace floquet {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;

/// H(t) = sum_k E_k |k><k| + sum_p Vbar_p exp(-i p w_d t).
///
/// Energies are angular frequencies, sorted ascending, level 0 is the
/// reference. Harmonics are stored for both signs of p with
/// Vbar_{-p} = Vbar_p^dagger; identically zero harmonics are dropped.
class DrivenSystem {
public:
  DrivenSystem(std::vector<double> energies, std::map<int, CMatrix> harmonics,
               double drive_frequency);

  int dimension() const { return static_cast<int>(energies_.size()); }
  const std::vector<double>& energies() const { return energies_; }
  double energy(int k) const { return energies_[static_cast<std::size_t>(k)]; }
  const std::map<int, CMatrix>& harmonics() const { return harmonics_; }
  /// Vbar_p, or a zero matrix if the harmonic is absent.
  CMatrix harmonic(int p) const;
  bool has_harmonic(int p) const { return harmonics_.count(p) != 0; }
  double drive_frequency() const { return drive_frequency_; }
  /// Largest |p| among the stored harmonics (0 if there is no drive).
  int max_harmonic() const;
  bool monochromatic() const;

  /// Same bare spectrum, drive harmonics multiplied by `factor`.
  DrivenSystem with_drive_scaled(cplx factor) const;
  DrivenSystem with_drive_frequency(double omega_d) const;
  /// Shifts every bare energy by `shift`.
  DrivenSystem with_energy_offset(double shift) const;

  /// Free-form provenance notes (phase conventions, spectrum data, ...).
  std::map<std::string, std::string> notes;

private:
  std::vector<double> energies_;
  std::map<int, CMatrix> harmonics_;
  double drive_frequency_;
};

/// A model whose bare spectrum is fixed and whose drive frequency is swept.
using SystemFamily = std::function<DrivenSystem(double omega_d)>;

/// E_k - E_0 = n_k w_d + eps_k, eps_k in [-w_d/2, w_d/2) unless n_k is pinned.
struct ResonantDecomposition {
  double drive_frequency = 0.0;
  double reference_energy = 0.0;
  std::vector<int> photon_numbers;
  std::vector<double> detunings;
  /// Sorted level indices, always containing 0.
  std::vector<int> degenerate_set;
  std::vector<double> shifted_energies;
  /// V_0 = sum_{k in D} eps_k |k><k| + Vbar_0.
  CMatrix static_perturbation;

  int levels() const { return static_cast<int>(photon_numbers.size()); }
  int degenerate_dimension() const { return static_cast<int>(degenerate_set.size()); }
  bool in_degenerate_set(int k) const;
  /// Position of level k inside degenerate_set, -1 if absent.
  int index_in_degenerate_set(int k) const;
  int max_abs_photon_number() const;
};

inline constexpr double kDefaultMembershipThreshold = 1e-6;

/// Quasi-resonant decomposition. Without an explicit set, D collects every
/// level with |eps_k| <= threshold * w_d. `photons` pins n_k for chosen
/// levels, whose eps_k may then leave [-w_d/2, w_d/2).
ResonantDecomposition decompose(const DrivenSystem& system,
                                double threshold = kDefaultMembershipThreshold,
                                const std::optional<std::vector<int>>& explicit_set = std::nullopt,
                                const std::map<int, int>& photons = {});

/// Two-level system w01/2 sz + 2 Oz cos(w_d t) sz + 2 Ox cos(w_d t) sx, in
/// the energy eigenbasis with E = (0, w01).
DrivenSystem xz_model(double omega01, double omega_x, double omega_z, double omega_d);
/// XZ model with Oz = 0.
DrivenSystem rabi_model(double omega01, double omega_x, double omega_d);

// ---------------------------------------------------------------------------
// Superconducting circuits. Circuit parameters are given as E/h in GHz and
// converted to angular frequencies (rad/ns) on construction.

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct FluxoniumSpec {
  double ej_ghz = 1.69;
  double el_ghz = 1.07;
  double ec_ghz = 0.68;
  /// Dimensionless flux-modulation amplitude A.
  double amplitude = 0.0;
  int basis_size = 120;
  int level_cut = 5;

  void validate() const;
};

/// Diagonalized fluxonium H_q = 4 E_C n^2 + E_J cos(phi) + E_L phi^2 / 2 in
/// the harmonic-oscillator basis of frequency sqrt(8 E_L E_C).
///
/// Eigenvector signs are fixed so that <k|phi|k+1> > 0 for every k; the
/// odd-parity selection rule is enforced on the phase matrix.
class FluxoniumCircuit {
public:
  explicit FluxoniumCircuit(const FluxoniumSpec& spec);

  const FluxoniumSpec& spec() const { return spec_; }
  /// Retained eigenenergies (rad/ns), shifted so that E_0 = 0.
  const std::vector<double>& energies() const { return energies_; }
  /// <i|phi|k> between retained eigenstates.
  const RMatrix& phase_matrix() const { return phi_; }
  /// Drive coupling coefficient E_L <i|phi|k> / 2 in GHz per unit A, i.e.
  /// V_ik / h = coupling_coefficient(i,k) * A; multiply by 2*pi for the
  /// "per A/2pi" convention.
  double coupling_coefficient(int i, int k) const;

  /// Driven system with Vbar_{+-1} = -(A E_L / 2) phi.
  DrivenSystem system(double omega_d, double amplitude) const;
  DrivenSystem system(double omega_d) const { return system(omega_d, spec_.amplitude); }

private:
  FluxoniumSpec spec_;
  std::vector<double> energies_;
  RMatrix phi_;
};

DrivenSystem fluxonium(const FluxoniumSpec& spec, double omega_d);

struct TransmonSpec {
  /// Angular frequencies (rad/ns).
  double omega_q = kTwoPi * 3.96;
  double alpha = kTwoPi * -0.208;
  int basis_size = 60;
  int level_cut = 8;

  void validate() const;
};

/// (w_q - alpha) a^dag a + (alpha/12)(a + a^dag)^4 diagonalized in a Fock
/// basis; the drive A cos(w_d t)(a + a^dag) is expressed in the eigenbasis.
class TransmonCircuit {
public:
  explicit TransmonCircuit(const TransmonSpec& spec);

  const TransmonSpec& spec() const { return spec_; }
  const std::vector<double>& energies() const { return energies_; }
  const RMatrix& charge_matrix() const { return x_; }
  /// Dressed qubit frequency E_1 - E_0.
  double omega_q_dressed() const { return energies_[1] - energies_[0]; }
  /// Dressed anharmonicity (E_2 - E_1) - (E_1 - E_0).
  double alpha_dressed() const;

  DrivenSystem system(double omega_d, double amplitude) const;
  /// Largest change of a retained gap E_k - E_0 when the basis is doubled.
  double basis_sensitivity() const { return basis_sensitivity_; }

private:
  TransmonSpec spec_;
  std::vector<double> energies_;
  RMatrix x_;
  double basis_sensitivity_ = 0.0;
};

DrivenSystem transmon(double omega_q, double alpha, double amplitude, double omega_d,
                      int level_cut = 8);

struct RwaPrediction {
  /// 2 alpha (w_q - alpha)^2 A^2 / (w_d^2 - (w_q - alpha)^2)^2
  double detuning_shift = 0.0;
  /// alpha (w_q - alpha)^3 A^3 / (3 (w_d^2 - (w_q - alpha)^2)^3)
  double coupling = 0.0;
};

/// Frame-change + rotating-wave baseline for the three-photon transmon drive.
RwaPrediction transmon_rwa_reference(double omega_q, double alpha, double amplitude,
                                     double omega_d);

}  // namespace floquet
