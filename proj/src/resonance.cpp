#include "floquet/error.hpp"
#include "floquet/pert.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <limits>
#include <map>

namespace floquet {

RabiData rabi_frequency(const CMatrix& h) {
  if (h.rows() != 2 || h.cols() != 2) {
    throw ValidationError("Rabi frequency needs a two-dimensional degenerate set");
  }
  RabiData d;
  d.detuning = h(1, 1).real() - h(0, 0).real();
  d.coupling = h(1, 0);
  d.rabi = std::sqrt(d.detuning * d.detuning + 4.0 * std::norm(d.coupling));
  d.t_pi = d.rabi > 0.0 ? M_PI / d.rabi : std::numeric_limits<double>::infinity();
  return d;
}

RabiData rabi_frequency(const EffectiveHamiltonian& heff, int upto) {
  return rabi_frequency(heff.cumulative(upto));
}

double resonance_detuning(const SystemFamily& family, double omega_d, const ResonanceOptions& opt) {
  const DrivenSystem s = family(omega_d);
  std::map<int, int> pin;
  if (opt.photon_number >= 1) pin[opt.target] = opt.photon_number;
  const auto d = decompose(s, kDefaultMembershipThreshold, std::vector<int>{0, opt.target}, pin);
  const auto h = effective_hamiltonian(s, d, opt.r_h, opt.sambe);
  return h.delta(1) - h.delta(0);
}

ResonanceResult resonance_frequency(const SystemFamily& family, const ResonanceOptions& opt) {
  if (opt.r_h < 1) throw ValidationError("resonance order must be >= 1");
  if (opt.target < 1) throw ValidationError("resonance target must be a level above 0");
  if (opt.scan_points < 2) throw ValidationError("resonance scan needs at least 2 points");

  ResonanceResult res;
  if (opt.bracket) {
    res.bracket = *opt.bracket;
    if (!(res.bracket.first > 0.0) || !(res.bracket.second > res.bracket.first)) {
      throw ValidationError("resonance bracket must satisfy 0 < lo < hi");
    }
  }
  // Second-order estimate at the bare resonance w0 = (E_t - E_0)/n_t.
  const double probe = opt.bracket ? 0.5 * (res.bracket.first + res.bracket.second) : 0.0;
  if (!opt.bracket && opt.photon_number < 1) {
    throw ValidationError("resonance search needs a bracket or a photon number");
  }
  const DrivenSystem s0 = family(opt.bracket ? probe : 1.0);
  if (opt.target >= s0.dimension()) throw ValidationError("resonance target beyond truncation");
  const double gap = s0.energy(opt.target) - s0.energy(0);
  const int n = opt.photon_number >= 1
                    ? opt.photon_number
                    : static_cast<int>(std::floor(gap / probe + 0.5));
  if (n < 1) throw ValidationError("resonance needs at least one photon");
  const double w0 = gap / n;
  ResonanceOptions pinned = opt;
  pinned.photon_number = n;
  ResonanceOptions second = pinned;
  second.r_h = 2;
  const double d2 = resonance_detuning(family, w0, second);
  res.initial_guess = w0 + d2 / n;
  if (!opt.bracket) {
    const double half = std::min(std::max(3.0 * std::abs(d2) / n, 1e-6 * w0), 0.9 * w0);
    res.bracket = {w0 - half, w0 + half};
  }

  const auto f = [&](double w) { return resonance_detuning(family, w, pinned); };
  // Scan points hitting an intermediate resonance are skipped.
  const auto f_scan = [&](double w) {
    try {
      return f(w);
    } catch (const NearResonanceError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  const int m = opt.scan_points;
  std::vector<double> xs(static_cast<std::size_t>(m)), fs(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    xs[static_cast<std::size_t>(i)] =
        res.bracket.first + (res.bracket.second - res.bracket.first) * i / (m - 1);
    fs[static_cast<std::size_t>(i)] = f_scan(xs[static_cast<std::size_t>(i)]);
  }
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    double a = xs[i], b = xs[i + 1], fa = fs[i], fb = fs[i + 1];
    if (fa == 0.0) {
      res.roots.push_back(a);
      continue;
    }
    if (std::isnan(fa) || std::isnan(fb) || fa * fb > 0.0 || fb == 0.0) continue;
    boost::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(
        f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(48), iters);
    res.roots.push_back(0.5 * (r.first + r.second));
  }
  if (fs.back() == 0.0) res.roots.push_back(xs.back());
  if (res.roots.empty()) {
    throw NumericalError("no sign change of delta_1 - delta_0 inside the resonance bracket");
  }
  res.multiple_roots = res.roots.size() > 1;
  res.omega_d = res.roots.front();
  for (double r : res.roots) {
    if (std::abs(r - res.initial_guess) < std::abs(res.omega_d - res.initial_guess)) res.omega_d = r;
  }
  res.residual = std::abs(f(res.omega_d));
  return res;
}

}  // namespace floquet
