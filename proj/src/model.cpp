#include "floquet/model.hpp"

#include "floquet/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace floquet {

DrivenSystem::DrivenSystem(std::vector<double> energies, std::map<int, CMatrix> harmonics,
                           double drive_frequency)
    : energies_(std::move(energies)), drive_frequency_(drive_frequency) {
  const auto n = static_cast<Eigen::Index>(energies_.size());
  if (n < 1) throw ValidationError("driven system needs at least one level");
  if (!(drive_frequency_ > 0.0) || !std::isfinite(drive_frequency_)) {
    throw ValidationError("drive frequency must be positive and finite");
  }
  for (std::size_t k = 0; k < energies_.size(); ++k) {
    if (!std::isfinite(energies_[k])) throw ValidationError("non-finite bare energy");
    if (k > 0 && energies_[k] < energies_[k - 1]) {
      throw ValidationError("bare energies must be sorted ascending");
    }
  }
  double scale = 0.0;
  for (const auto& [p, v] : harmonics) {
    if (v.rows() != n || v.cols() != n) {
      throw ValidationError("harmonic " + std::to_string(p) + " has wrong shape");
    }
    if (!v.allFinite()) throw ValidationError("non-finite harmonic entry");
    scale = std::max(scale, v.cwiseAbs().maxCoeff());
  }
  const double tol = 1e-12 * std::max(scale, 1e-300);
  for (const auto& [p, v] : harmonics) {
    if (v.cwiseAbs().maxCoeff() == 0.0) continue;
    auto partner = harmonics.find(-p);
    if (partner == harmonics.end()) {
      harmonics_[p] = v;
      harmonics_[-p] = v.adjoint();
      continue;
    }
    if ((partner->second - v.adjoint()).cwiseAbs().maxCoeff() > tol) {
      throw ValidationError("harmonics " + std::to_string(p) + " and " + std::to_string(-p) +
                            " violate Vbar_p = Vbar_{-p}^dagger");
    }
    harmonics_[p] = v;
  }
}

CMatrix DrivenSystem::harmonic(int p) const {
  auto it = harmonics_.find(p);
  if (it != harmonics_.end()) return it->second;
  return CMatrix::Zero(dimension(), dimension());
}

int DrivenSystem::max_harmonic() const {
  int m = 0;
  for (const auto& [p, v] : harmonics_) m = std::max(m, std::abs(p));
  return m;
}

bool DrivenSystem::monochromatic() const {
  for (const auto& [p, v] : harmonics_) {
    if (std::abs(p) != 1) return false;
  }
  return true;
}

DrivenSystem DrivenSystem::with_drive_scaled(cplx factor) const {
  std::map<int, CMatrix> h;
  for (const auto& [p, v] : harmonics_) {
    if (p == 0) {
      h[p] = v;
    } else if (p > 0) {
      h[p] = factor * v;
      h[-p] = std::conj(factor) * harmonics_.at(-p);
    }
  }
  DrivenSystem out(energies_, std::move(h), drive_frequency_);
  out.notes = notes;
  return out;
}

DrivenSystem DrivenSystem::with_drive_frequency(double omega_d) const {
  DrivenSystem out(energies_, harmonics_, omega_d);
  out.notes = notes;
  return out;
}

DrivenSystem DrivenSystem::with_energy_offset(double shift) const {
  std::vector<double> e(energies_);
  for (double& x : e) x += shift;
  DrivenSystem out(std::move(e), harmonics_, drive_frequency_);
  out.notes = notes;
  return out;
}

bool ResonantDecomposition::in_degenerate_set(int k) const {
  return std::binary_search(degenerate_set.begin(), degenerate_set.end(), k);
}

int ResonantDecomposition::index_in_degenerate_set(int k) const {
  auto it = std::lower_bound(degenerate_set.begin(), degenerate_set.end(), k);
  if (it == degenerate_set.end() || *it != k) return -1;
  return static_cast<int>(it - degenerate_set.begin());
}

int ResonantDecomposition::max_abs_photon_number() const {
  int m = 0;
  for (int n : photon_numbers) m = std::max(m, std::abs(n));
  return m;
}

ResonantDecomposition decompose(const DrivenSystem& system, double threshold,
                                const std::optional<std::vector<int>>& explicit_set,
                                const std::map<int, int>& photons) {
  const double w = system.drive_frequency();
  if (!(threshold >= 0.0)) throw ValidationError("membership threshold must be non-negative");
  const int n = system.dimension();
  ResonantDecomposition d;
  d.drive_frequency = w;
  d.reference_energy = system.energy(0);
  d.photon_numbers.resize(static_cast<std::size_t>(n));
  d.detunings.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double gap = system.energy(k) - d.reference_energy;
    const auto pinned = photons.find(k);
    const double nk = pinned != photons.end() ? pinned->second : std::floor(gap / w + 0.5);
    const double eps = gap - nk * w;
    if (pinned == photons.end() && std::abs(std::abs(eps) - 0.5 * w) <= 1e-12 * w) {
      std::ostringstream os;
      os << "boundary resonance: level " << k << " sits exactly half-way between "
         << "photon sectors (eps = " << eps << ", w_d = " << w << ")";
      throw ValidationError(os.str());
    }
    d.photon_numbers[static_cast<std::size_t>(k)] = static_cast<int>(nk);
    d.detunings[static_cast<std::size_t>(k)] = eps;
  }
  d.detunings[0] = 0.0;
  for (const auto& [k, nk] : photons) {
    if (k < 0 || k >= n) throw ValidationError("pinned photon number for a level beyond the truncation");
    if (k == 0 && nk != 0) throw ValidationError("the reference level carries no photons");
  }

  if (explicit_set) {
    d.degenerate_set = *explicit_set;
    std::sort(d.degenerate_set.begin(), d.degenerate_set.end());
    if (std::adjacent_find(d.degenerate_set.begin(), d.degenerate_set.end()) !=
        d.degenerate_set.end()) {
      throw ValidationError("degenerate set lists a level twice");
    }
    if (d.degenerate_set.empty() || d.degenerate_set.front() != 0) {
      throw ValidationError("degenerate set must contain level 0");
    }
    if (d.degenerate_set.back() >= n) {
      throw ValidationError("degenerate set references a level beyond the truncation");
    }
  } else {
    for (int k = 0; k < n; ++k) {
      if (std::abs(d.detunings[static_cast<std::size_t>(k)]) <= threshold * w) {
        d.degenerate_set.push_back(k);
      }
    }
  }

  const double escale = std::max(1.0, std::abs(system.energies().back() - d.reference_energy));
  for (std::size_t i = 0; i < d.degenerate_set.size(); ++i) {
    for (std::size_t j = i + 1; j < d.degenerate_set.size(); ++j) {
      const int a = d.degenerate_set[i], b = d.degenerate_set[j];
      if (d.photon_numbers[static_cast<std::size_t>(a)] !=
          d.photon_numbers[static_cast<std::size_t>(b)]) {
        continue;
      }
      if (std::abs(system.energy(a) - system.energy(b)) > 1e-12 * escale) {
        std::ostringstream os;
        os << "ambiguous degeneracy: levels " << a << " and " << b
           << " share photon number " << d.photon_numbers[static_cast<std::size_t>(a)]
           << " but have different bare energies";
        throw ValidationError(os.str());
      }
    }
  }

  d.shifted_energies.resize(static_cast<std::size_t>(n));
  d.static_perturbation = system.harmonic(0);
  for (int k = 0; k < n; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    if (d.in_degenerate_set(k)) {
      d.shifted_energies[ks] = d.reference_energy + d.photon_numbers[ks] * w;
      d.static_perturbation(k, k) += d.detunings[ks];
    } else {
      d.shifted_energies[ks] = system.energy(k);
    }
  }
  return d;
}

DrivenSystem xz_model(double omega01, double omega_x, double omega_z, double omega_d) {
  if (!(omega01 > 0.0)) throw ValidationError("xz model needs omega01 > 0");
  CMatrix v(2, 2);
  // basis (|0>, |1>) = (lower, upper): sigma_z = diag(-1, 1)
  v << cplx(-omega_z), cplx(omega_x), cplx(omega_x), cplx(omega_z);
  DrivenSystem s({0.0, omega01}, {{1, v}, {-1, v}}, omega_d);
  s.notes["basis"] = "energy eigenbasis (|0>,|1>), sigma_z = diag(-1, 1)";
  return s;
}

DrivenSystem rabi_model(double omega01, double omega_x, double omega_d) {
  return xz_model(omega01, omega_x, 0.0, omega_d);
}

}  // namespace floquet
