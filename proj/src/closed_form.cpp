#include "floquet/error.hpp"
#include "floquet/pert.hpp"

#include <cmath>

namespace floquet {

namespace {

// Sum over all chains 0 -> a_1 -> ... -> a_{n-1} -> target, each step
// absorbing one photon, of prod V / prod (E~_0 + j w_d - E~_{a_j}).
cplx absorption_chain(const CMatrix& v1, const ResonantDecomposition& d, int target, int steps) {
  const double w = d.drive_frequency;
  const int n = static_cast<int>(v1.rows());
  cplx total = 0.0;
  auto rec = [&](auto&& self, int level, int j, cplx acc) -> void {
    if (j == steps) {
      total += v1(target, level) * acc;
      return;
    }
    for (int a = 0; a < n; ++a) {
      const cplx x = v1(a, level);
      if (x == cplx(0.0)) continue;
      if (d.in_degenerate_set(a) && d.photon_numbers[static_cast<std::size_t>(a)] == j) {
        throw NumericalError("leading-order formula does not apply: resonant intermediate state");
      }
      const double den = d.reference_energy + j * w - d.shifted_energies[static_cast<std::size_t>(a)];
      self(self, a, j + 1, acc * x / den);
    }
  };
  rec(rec, 0, 1, 1.0);
  return total;
}

}  // namespace

LeadingOrder closed_form_leading(const DrivenSystem& system, const ResonantDecomposition& decomp) {
  if (system.max_harmonic() > 1) throw ValidationError("closed forms need a monochromatic drive");
  if (decomp.degenerate_dimension() != 2) {
    throw ValidationError("closed forms need a two-dimensional degenerate set");
  }
  const int target = decomp.degenerate_set[1];
  LeadingOrder lo;
  lo.photon_number = decomp.photon_numbers[static_cast<std::size_t>(target)];
  if (lo.photon_number < 1) throw ValidationError("closed-form coupling needs n_1 >= 1");
  const CMatrix v1 = system.harmonic(1);
  lo.coupling = absorption_chain(v1, decomp, target, lo.photon_number);

  const double w = decomp.drive_frequency;
  const std::map<int, CMatrix> v{{-1, system.harmonic(-1)}, {0, decomp.static_perturbation}, {1, v1}};
  for (int k : decomp.degenerate_set) {
    const int nk = decomp.photon_numbers[static_cast<std::size_t>(k)];
    const double ek = decomp.shifted_energies[static_cast<std::size_t>(k)];
    double shift = 0.0;
    for (const auto& [q, m] : v) {
      for (int l = 0; l < decomp.levels(); ++l) {
        const bool resonant = decomp.in_degenerate_set(l) &&
                              decomp.photon_numbers[static_cast<std::size_t>(l)] == nk + q;
        if (resonant) continue;
        shift += std::norm(m(l, k)) / (ek + q * w - decomp.shifted_energies[static_cast<std::size_t>(l)]);
      }
    }
    lo.stark_shifts.push_back(shift);
  }
  return lo;
}

FluxoniumLeading fluxonium_closed_form(const DrivenSystem& system,
                                       const ResonantDecomposition& decomp) {
  if (system.dimension() < 5 || decomp.degenerate_set != std::vector<int>{0, 1} ||
      decomp.photon_numbers[1] != 3 || system.max_harmonic() != 1) {
    throw ValidationError("fluxonium expansions need >= 5 levels, D = {0,1} and n_1 = 3");
  }
  const CMatrix vc = system.harmonic(1);
  const auto V = [&](int i, int k) { return vc(i, k).real(); };
  const double w = decomp.drive_frequency;
  const auto& e = decomp.shifted_energies;
  const double e0 = e[0], e2 = e[2], e3 = e[3], e4 = e[4];

  FluxoniumLeading f;
  f.eps = -decomp.detunings[1];
  f.omega10_3 = -V(1, 0) * V(0, 1) * V(1, 0) / (4 * w * w) +
                V(1, 0) * V(0, 3) * V(3, 0) / (2 * w * (e0 - e3 + w)) -
                V(1, 2) * V(2, 1) * V(1, 0) / (2 * w * (e0 - e2 + 2 * w)) +
                V(1, 2) * V(2, 3) * V(3, 0) / ((e0 - e2 + 2 * w) * (e0 - e3 + w)) -
                V(1, 4) * V(4, 1) * V(1, 0) / (2 * w * (e0 - e4 + 2 * w)) +
                V(1, 4) * V(4, 3) * V(3, 0) / ((e0 - e3 + w) * (e0 - e4 + 2 * w));

  const double v01 = V(0, 1) * V(0, 1), v03 = V(0, 3) * V(0, 3);
  const double v12 = V(1, 2) * V(1, 2), v14 = V(1, 4) * V(1, 4);
  f.delta_1 = -f.eps;
  f.delta_2 = 3 * v01 / (2 * w) - v03 / (w + e0 - e3) - v03 / (-w + e0 - e3) +
              v12 / (2 * w + e0 - e2) + v12 / (4 * w + e0 - e2) + v14 / (2 * w + e0 - e4) +
              v14 / (4 * w + e0 - e4);
  const auto sq = [](double x) { return x * x; };
  f.delta_3 = f.eps * (5 * v01 / (8 * w * w) + v12 / sq(4 * w + e0 - e2) +
                       v12 / sq(2 * w + e0 - e2) + v14 / sq(4 * w + e0 - e4) +
                       v14 / sq(2 * w + e0 - e4));
  return f;
}

double rabi_coupling_leading(int n1, double omega_x, double omega_d) {
  if (n1 < 1) throw ValidationError("photon number must be >= 1");
  if (n1 % 2 == 0) return 0.0;
  const int q = (n1 - 1) / 2;
  const double qf = std::tgamma(q + 1.0);
  const double sign = q % 2 == 0 ? 1.0 : -1.0;
  return sign * std::pow(omega_x, n1) / (std::pow(2.0, 2 * q) * qf * qf * std::pow(omega_d, 2 * q));
}

double rabi_stark_leading(int n1, double omega_x, double omega_d) {
  if (n1 < 2) throw ValidationError("Rabi Stark formula needs n_1 >= 2");
  return -omega_x * omega_x / ((n1 + 1) * omega_d) - omega_x * omega_x / ((n1 - 1) * omega_d);
}

double rabi_coupling_asymptotic(int n1, double omega_x, double omega01) {
  if (n1 < 3 || n1 % 2 == 0) throw ValidationError("asymptotic form needs odd n_1 >= 3");
  const double sign = ((n1 - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
  return sign / (M_PI * (n1 - 1)) * std::pow(std::exp(1.0) * omega_x / omega01, n1) * omega01;
}

}  // namespace floquet
