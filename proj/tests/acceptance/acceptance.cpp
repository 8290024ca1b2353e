// Acceptance run: one PASS/FAIL line per criterion at the pinned tolerances.
// Usage: acceptance [criterion ...]   (default: all)

#include "reference_tables.hpp"

#include "floquet/figures.hpp"
#include "floquet/opalg.hpp"
#include "floquet/oracle.hpp"
#include "floquet/pert.hpp"
#include "floquet/pulse.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace floquet;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[violated] ";
    }
    detail << what << "; ";
  }
};

std::string num(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

opalg::Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return opalg::Rational(std::stoll(s));
  return opalg::Rational(std::stoll(s.substr(0, slash))) / std::stoll(s.substr(slash + 1));
}

ResonantDecomposition pinned(const DrivenSystem& s, int n1) {
  return decompose(s, kDefaultMembershipThreshold, std::vector<int>{0, 1}, {{1, n1}});
}

// ---------------------------------------------------------------------------

void coefficient_tables(Outcome& o) {
  for (const auto& t : reference::tables()) {
    const std::string kind = t.kind;
    const auto& table = kind == "heff" ? opalg::heff_table(t.order) : opalg::w_table(t.order);
    std::map<opalg::Exponents, opalg::Rational> expected;
    for (const auto& e : t.entries) expected[e.exponents] = parse_rational(e.value);
    std::size_t mismatches = 0;
    for (const auto& [e, c] : expected) mismatches += table.coefficient(e) == c ? 0 : 1;
    for (const auto& [e, c] : table.entries) mismatches += expected.count(e) ? 0 : 1;
    o.require(mismatches == 0, kind + " order " + std::to_string(t.order) + ": " +
                                   std::to_string(table.entries.size()) + " entries, " +
                                   std::to_string(mismatches) + " mismatches");
  }
}

void symbolic_identities(Outcome& o) {
  int bad = 0;
  for (int r = 1; r <= 8; ++r) {
    const opalg::StringSum h = opalg::build_heff(r);
    if (!(opalg::adjoint(h) == h)) ++bad;
  }
  o.require(bad == 0, "reversal symmetry r <= 8: " + std::to_string(bad) + " failures");
  bad = 0;
  for (int r = 0; r <= 6; ++r) {
    opalg::StringSum total;
    for (int k = 0; k <= r; ++k) total += opalg::compose(opalg::adjoint(opalg::build_W(k)), opalg::build_W(r - k));
    const bool ok = r == 0 ? total == opalg::StringSum::projector() : total.empty();
    if (!ok) ++bad;
  }
  o.require(bad == 0, "W isometry r <= 6: " + std::to_string(bad) + " failures");
}

void xz_closed_forms(Outcome& o) {
  const double ox = 0.01, oz = 0.02, w = 0.5;
  const DrivenSystem s = xz_model(1.0, ox, oz, w);
  const auto h = effective_hamiltonian(s, pinned(s, 2), 2);
  const double c = h.orders[1](1, 0).real(), c_ref = -2.0 * ox * oz / w;
  const double d = h.orders[1](0, 0).real(), d_ref = -4.0 * ox * ox / (3.0 * w);
  o.require(rel(c, c_ref) <= 1e-12 && std::abs(h.orders[1](1, 0).imag()) <= 1e-12 * std::abs(c_ref),
            "Omega10^(2) rel err " + num(rel(c, c_ref), 3));
  o.require(rel(d, d_ref) <= 1e-12, "delta0^(2) rel err " + num(rel(d, d_ref), 3));
  const auto family = [ox](double wd) { return xz_model(1.0, ox, 0.0, wd); };
  ResonanceOptions ro;
  ro.r_h = 2;
  ro.photon_number = 2;
  const double root = resonance_frequency(family, ro).omega_d;
  const double root_ref = 0.25 + std::sqrt(0.0625 + 4.0 / 3.0 * ox * ox);
  o.require(std::abs(root - root_ref) <= 1e-10, "r_H=2 root err " + num(std::abs(root - root_ref), 3));
}

void rabi_closed_forms(Outcome& o) {
  const double ox = 0.02;
  for (int n1 : {3, 5, 7}) {
    const int q = (n1 - 1) / 2;
    const double w = 1.0 / n1;
    const DrivenSystem s = rabi_model(1.0, ox, w);
    const auto h = effective_hamiltonian(s, pinned(s, n1), std::max(n1, 6));
    const double fact = std::tgamma(q + 1.0);
    const double ref = (q % 2 ? -1.0 : 1.0) * std::pow(ox, 2 * q + 1) /
                       (std::pow(2.0, 2 * q) * fact * fact * std::pow(w, 2 * q));
    const double got = h.orders[static_cast<std::size_t>(n1 - 1)](1, 0).real();
    o.require(rel(got, ref) <= 1e-12, "n1=" + std::to_string(n1) + " coupling rel err " + num(rel(got, ref), 3));
    double even = 0.0;
    for (int r = 2; r <= 6; r += 2) even = std::max(even, std::abs(h.orders[static_cast<std::size_t>(r - 1)](1, 0)));
    o.require(even <= 1e-15 * std::abs(ref) + 1e-300, "n1=" + std::to_string(n1) + " even orders max " + num(even, 3));
    const double stark = h.orders[1](0, 0).real();
    const double stark_ref = -ox * ox / ((n1 + 1) * w) - ox * ox / ((n1 - 1) * w);
    o.require(rel(stark, stark_ref) <= 1e-12, "n1=" + std::to_string(n1) + " delta0^(2) rel err " +
                                                  num(rel(stark, stark_ref), 3));
  }
}

void rabi_dynamics_check(Outcome& o) {
  {
    const RabiDynamics d = rabi_dynamics(0.05, {{3, 0}});
    const double e = rel(d.t_pi[0], d.t_op);
    o.require(e <= 0.01, "ratio 0.05: r_H=3 t_pi " + num(d.t_pi[0]) + " vs oracle t_op " + num(d.t_op) +
                             " (rel " + num(e, 3) + ", bound 0.01)");
  }
  {
    const RabiDynamics d = rabi_dynamics(0.25, {{3, 0}, {7, 4}});
    o.require(std::abs(d.peak_transfer[0] - 0.75) <= 0.05,
              "ratio 0.25: r_H=3 peak transfer " + num(d.peak_transfer[0], 4) + " (0.75 +- 0.05) at w_d " +
                  num(d.omega_d, 5));
    double sup = 0.0;
    const auto& p = d.predictions[1].second;
    for (std::size_t i = 0; i < p.size(); ++i) sup = std::max(sup, std::abs(p[i] - d.oracle[i]));
    o.require(sup <= 1e-2, "(7,4) population sup-norm error " + num(sup, 3) + " (bound 1e-2)");
  }
}

void fluxonium_spectrum(Outcome& o) {
  const FluxoniumCircuit c(FluxoniumSpec{});
  const auto& e = c.energies();
  const double g01 = (e[1] - e[0]) / kTwoPi, g12 = (e[2] - e[1]) / kTwoPi;
  const double v01 = kTwoPi * c.coupling_coefficient(0, 1), v12 = kTwoPi * c.coupling_coefficient(1, 2);
  o.require(rel(g01, 1.33) <= 0.01, "E1-E0 " + num(g01, 5) + " GHz");
  o.require(rel(g12, 2.15) <= 0.01, "E2-E1 " + num(g12, 5) + " GHz");
  o.require(rel(std::abs(v01), 4.72) <= 0.02, "V01 " + num(v01, 5) + " GHz");
  o.require(rel(std::abs(v12), 5.28) <= 0.02, "V12 " + num(v12, 5) + " GHz");
}

std::vector<FluxoniumPoint> fluxonium_points(const std::vector<double>& amps) {
  static std::map<double, FluxoniumPoint> cache;
  std::vector<double> missing;
  for (double a : amps) {
    if (!cache.count(a)) missing.push_back(a);
  }
  if (!missing.empty()) {
    FluxoniumOptions fo;
    fo.orders = {3, 5, 7};
    for (auto& p : fluxonium_sweep(missing, fo)) cache[p.amplitude] = p;
  }
  std::vector<FluxoniumPoint> out;
  for (double a : amps) out.push_back(cache.at(a));
  return out;
}

void fluxonium_convergence(Outcome& o) {
  for (const FluxoniumPoint& p : fluxonium_points({0.02, 0.05, 0.08, 0.10})) {
    std::vector<double> e_eps, e_rabi;
    for (const auto& fo : p.orders) {
      e_eps.push_back(rel(fo.prediction.epsilon, p.oracle.epsilon));
      e_rabi.push_back(rel(fo.prediction.rabi, p.oracle.rabi));
    }
    const bool mono = e_eps[0] > e_eps[1] && e_eps[1] > e_eps[2] && e_rabi[0] > e_rabi[1] && e_rabi[1] > e_rabi[2];
    o.require(mono, "A/2pi " + num(p.amplitude, 3) + ": eps rel err " + num(e_eps[0], 3) + " > " +
                        num(e_eps[1], 3) + " > " + num(e_eps[2], 3) + ", Omega_R rel err " + num(e_rabi[0], 3) +
                        " > " + num(e_rabi[1], 3) + " > " + num(e_rabi[2], 3));
    if (p.amplitude == 0.05) {
      o.require(e_rabi[2] <= 0.02, "A/2pi 0.05: r_H=7 Omega_R rel err " + num(e_rabi[2], 3) + " (bound 0.02)");
    }
  }
  // not gated: the same orders against the Floquet-mode resonance, which has
  // no fast-oscillation ripple in t_op
  const FluxoniumCircuit circuit(FluxoniumSpec{});
  const double gap = circuit.energies()[1] - circuit.energies()[0];
  for (double a : {0.02, 0.05}) {
    const SystemFamily family = [&circuit, a](double w) { return circuit.system(w, kTwoPi * a); };
    std::vector<OrderPrediction> pred;
    for (int r : {3, 5, 7}) pred.push_back(predict_resonance(family, 1, 3, r));
    const double half = 0.5 * pred.back().rabi / 3.0;
    const FloquetResonance fr = floquet_resonance(family, 1, {pred.back().omega_d - half, pred.back().omega_d + half});
    const double eps = 3.0 * fr.omega_d - gap;
    std::string line = "Floquet-mode reference A/2pi " + num(a, 3) + ":";
    for (const auto& q : pred) {
      line += " r_H=" + std::to_string(q.r_h) + " eps " + num(rel(q.epsilon, eps), 3) + " Omega_R " +
              num(rel(q.rabi, fr.rabi), 3);
    }
    o.detail << line << "; ";
  }
}

void fluxonium_fidelity(Outcome& o) {
  for (const FluxoniumPoint& p : fluxonium_points({0.01, 0.02, 0.03, 0.04, 0.05})) {
    const FluxoniumOrder& r7 = p.orders.back();
    o.require(r7.f_square >= 0.995, "A/2pi " + num(p.amplitude, 3) + ": r_H=7 square-pulse F " + num(r7.f_square, 5) + " (bound 0.995)");
    const double inf_timed = 1.0 - r7.f_timed, inf_opt = 1.0 - p.oracle.fidelity;
    o.require(inf_timed <= 2.0 * inf_opt, "A/2pi " + num(p.amplitude, 3) + ": (7,4)-timed 1-F " + num(inf_timed, 3) +
                                              " vs optimal " + num(inf_opt, 3) + " (bound 2x)");
  }
}

void pulse_shaping(Outcome& o) {
  PulseSweepOptions po;
  po.orders = {7};
  for (const PulsePoint& p : pulse_sweep({0.005, 0.01, 0.015, 0.02, 0.025}, po)) {
    const double inf = 1.0 - p.f_designed;
    o.require(p.solved && inf <= 1e-3 && p.f_designed > p.f_square,
              "A/2pi " + num(p.amplitude, 3) + ": designed 1-F " + num(inf, 3) + " (1e-5 reported value " +
                  (inf < 1e-5 ? "met" : "not met") + "), square 1-F " + num(1.0 - p.f_square, 3) +
                  (p.solved ? "" : ", design failed: " + p.failure));
  }
  // the convergence integral covers the ramp only, so it is evaluated at the
  // square-pulse resonance with any plateau
  const FluxoniumCircuit circuit(FluxoniumSpec{});
  for (double a : {0.055, 0.06, 0.08, 0.10}) {
    const SystemFamily family = [&circuit, a](double w) { return circuit.system(w, kTwoPi * a); };
    const OrderPrediction sq = predict_resonance(family, 1, 3, 7);
    const DrivenSystem s = family(sq.omega_d);
    const Envelope env{4.0, 18.0, 36.0 + sq.t_pi};
    const MagnusDesign m = magnus_design(heff_of_amplitude(s, pinned(s, 3), 7), env);
    o.require(!m.converges, "A/2pi " + num(a, 3) + ": convergence integral " + num(m.convergence_integral, 4) +
                                (m.converges ? " < log 2" : " >= log 2"));
  }
}

void transmon_comparison(Outcome& o) {
  for (const TransmonPoint& p : transmon_sweep({0.2, 0.5, 1.0, 2.0})) {
    const double de = std::abs(p.eps_dpt - p.eps_num), re = std::abs(p.eps_rwa - p.eps_num);
    const double dc = std::abs(p.coupling_dpt - p.coupling_num), rc = std::abs(p.coupling_rwa - p.coupling_num);
    o.require(de < re && dc < rc, "A/2pi " + num(p.amplitude_ghz, 2) + " GHz: eps err dpt " + num(de, 3) + " rwa " +
                                      num(re, 3) + ", coupling err dpt " + num(dc, 3) + " rwa " + num(rc, 3));
  }
}

DrivenSystem random_system(std::mt19937& rng, double scale) {
  const int n1 = 3;
  const double w = 0.6;
  std::uniform_real_distribution<double> u(-1.0, 1.0), frac(0.25, 0.75);
  std::uniform_int_distribution<int> k(0, 3);
  std::vector<double> e{0.0, n1 * w};
  for (int i = 0; i < 2; ++i) e.push_back((n1 + k(rng) + frac(rng)) * w);
  std::sort(e.begin() + 2, e.end());
  CMatrix v(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) v(i, j) = cplx(u(rng), u(rng));
  }
  v *= scale * w;
  return DrivenSystem(e, {{1, v}, {-1, v.adjoint()}}, w);
}

void oracle_equivalence(Outcome& o) {
  std::mt19937 rng(2024);
  double worst = 0.0, worst_q = 0.0;
  int ambiguous = 0;
  int redrawn = 0;
  for (int trial = 0; trial < 50; ++trial) {
    DrivenSystem s = random_system(rng, 0.02);
    EffectiveHamiltonian h = effective_hamiltonian(s, pinned(s, 3), 5);
    double vmax = 0.0;
    for (const auto& [p, m] : s.harmonics()) vmax = std::max(vmax, m.cwiseAbs().maxCoeff());
    // when delta_1^(2) - delta_0^(2) is accidentally small the Floquet splitting is
    // set by the third-order coupling instead; such systems are redrawn
    while (std::abs((h.orders[1](1, 1) - h.orders[1](0, 0)).real()) < 0.1 * vmax * vmax / s.drive_frequency()) {
      ++redrawn;
      s = random_system(rng, 0.02);
      h = effective_hamiltonian(s, pinned(s, 3), 5);
      vmax = 0.0;
      for (const auto& [p, m] : s.harmonics()) vmax = std::max(vmax, m.cwiseAbs().maxCoeff());
    }
    const auto d = pinned(s, 3);
    for (int r = 1; r <= 5; ++r) {
      // structurally zero entries are compared against the natural size of order r
      const double floor = 1e-4 * std::pow(vmax, r) / std::pow(s.drive_frequency(), r - 1);
      for (int l : {0, 1}) {
        for (int k : {0, 1}) {
          cplx sum = 0.0;
          for (const auto& t : enumerate_processes(s, d, l, k, r)) sum += t.amplitude;
          const cplx m = h.orders[static_cast<std::size_t>(r - 1)](l, k);
          worst = std::max(worst, std::abs(sum - m) / std::max(std::abs(m), floor));
        }
      }
    }
    // splitting of the Floquet modes of |0> and |1> against delta_1^(2) - delta_0^(2),
    // extrapolated in A^2 from drive scales 1/16 and 1/8
    const double w = s.drive_frequency();
    const double delta2 = (h.orders[1](1, 1) - h.orders[1](0, 0)).real();
    auto split = [&](double scale) {
      IntegratorConfig ic;
      ic.period_tolerance = 1e-13;
      const QuasiEnergies q = quasi_energies(s.with_drive_scaled(scale), ic);
      if (q.ambiguous) ++ambiguous;
      const double q0 = q.values[static_cast<std::size_t>(q.labels[0])];
      const double q1 = q.values[static_cast<std::size_t>(q.labels[1])];
      return fold_quasi_energy(q1 - q0, w) / (scale * scale);
    };
    const double richardson = (4.0 * split(0.0625) - split(0.125)) / 3.0;
    worst_q = std::max(worst_q, rel(richardson, delta2));
  }
  o.require(worst <= 1e-10, "diagram sum vs matrix worst rel err " + num(worst, 3) + " (bound 1e-10)");
  o.require(worst_q <= 1e-6 && ambiguous == 0, "Richardson quasi-energy splitting worst rel err " + num(worst_q, 3) +
                                                   " (bound 1e-6), ambiguous labels " + std::to_string(ambiguous) +
                                                   ", redrawn systems " + std::to_string(redrawn));
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "coefficient tables", coefficient_tables},
      {2, "symbolic identities", symbolic_identities},
      {3, "XZ closed forms", xz_closed_forms},
      {4, "Rabi closed forms", rabi_closed_forms},
      {5, "Rabi dynamics", rabi_dynamics_check},
      {6, "fluxonium spectrum", fluxonium_spectrum},
      {7, "fluxonium convergence", fluxonium_convergence},
      {8, "fluxonium fidelity", fluxonium_fidelity},
      {9, "pulse shaping", pulse_shaping},
      {10, "transmon comparison", transmon_comparison},
      {11, "oracle equivalence", oracle_equivalence},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int passed = 0, run = 0;
  for (const Criterion& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    ++run;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what() << "; ";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    passed += o.pass ? 1 : 0;
    std::printf("%s criterion %d (%s): %s(%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.str().c_str(),
                secs);
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", passed, run);
  return 0;
}
