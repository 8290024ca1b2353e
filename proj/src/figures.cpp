#include "floquet/figures.hpp"

#include "floquet/error.hpp"
#include "floquet/evolve.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace floquet {

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex m;
  auto run = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(m);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

OraclePoint oracle_optimum(const SystemFamily& family, int target, int photon_number,
                           double omega_center, double rabi_estimate,
                           const TransferOptions& options, double half_width, double t_factor) {
  if (!(rabi_estimate > 0.0)) throw ValidationError("oracle search needs a positive Rabi estimate");
  const double half =
      half_width > 0.0 ? half_width : std::max(1.5 * rabi_estimate / photon_number, 1e-7 * omega_center);
  TransferOptions o = options;
  o.target = target;
  const TransferOptimum opt =
      optimize_transfer(family, {omega_center - half, omega_center + half}, t_factor * M_PI / rabi_estimate, o);
  const DrivenSystem s = family(opt.omega_d);
  OraclePoint p;
  p.omega_d = opt.omega_d;
  p.epsilon = photon_number * opt.omega_d - (s.energy(target) - s.energy(0));
  p.t_op = opt.t_op;
  p.rabi = M_PI / opt.t_op;
  p.fidelity = opt.fidelity;
  p.flagged = opt.flagged;
  return p;
}

OrderPrediction predict_resonance(const SystemFamily& family, int target, int photon_number,
                                  int r_h, const SambeOptions& sambe) {
  ResonanceOptions ro;
  ro.r_h = r_h;
  ro.target = target;
  ro.photon_number = photon_number;
  ro.sambe = sambe;
  const ResonanceResult res = resonance_frequency(family, ro);
  const DrivenSystem s = family(res.omega_d);
  const auto d = decompose(s, kDefaultMembershipThreshold, std::vector<int>{0, target},
                           {{target, photon_number}});
  const RabiData rd = rabi_frequency(effective_hamiltonian(s, d, r_h, sambe));
  OrderPrediction p;
  p.r_h = r_h;
  p.omega_d = res.omega_d;
  p.epsilon = photon_number * res.omega_d - (s.energy(target) - s.energy(0));
  p.rabi = rd.rabi;
  p.t_pi = rd.t_pi;
  return p;
}

double square_pulse_fidelity(const DrivenSystem& system, int initial, int target, double t,
                             const IntegratorConfig& config) {
  const EvolutionResult r = integrate(system, basis_state(system.dimension(), initial), {0.0, t}, config);
  return std::norm(r.amplitudes(1, target));
}

TransferPeak predicted_transfer(const DrivenSystem& system, int target, int photon_number, int r_h,
                                int r_w, double t_max, int samples_per_period) {
  const auto d = decompose(system, kDefaultMembershipThreshold, std::vector<int>{0, target},
                           {{target, photon_number}});
  const Expansion e = expand(system, d, r_h, r_w);
  const auto times = time_grid(t_max, system.drive_frequency(), samples_per_period);
  const EvolutionResult r =
      amplitudes(d, e.heff.cumulative(), e.w, basis_state(system.dimension(), 0), times);
  return max_transfer(r, target);
}

RabiDynamics rabi_dynamics(double ratio, const std::vector<std::pair<int, int>>& orders,
                           int samples_per_period) {
  if (!(ratio > 0.0)) throw ValidationError("Rabi drive ratio must be positive");
  const SystemFamily family = [ratio](double w) { return rabi_model(1.0, ratio, w); };
  const OrderPrediction guess = predict_resonance(family, 1, 3, 7);
  const OraclePoint op = oracle_optimum(family, 1, 3, guess.omega_d, guess.rabi);

  RabiDynamics out;
  out.ratio = ratio;
  out.omega_d = op.omega_d;
  out.t_op = op.t_op;
  out.oracle_peak = op.fidelity;
  const DrivenSystem s = family(op.omega_d);
  out.times = time_grid(2.0 * op.t_op, op.omega_d, samples_per_period);
  const EvolutionResult ex = integrate(s, basis_state(2, 0), out.times);
  for (std::size_t i = 0; i < out.times.size(); ++i) {
    out.oracle.push_back(std::norm(ex.amplitudes(static_cast<Eigen::Index>(i), 1)));
  }
  const auto d = decompose(s, kDefaultMembershipThreshold, std::vector<int>{0, 1}, {{1, 3}});
  for (const auto& [rh, rw] : orders) {
    const Expansion e = expand(s, d, rh, rw);
    const CMatrix h = e.heff.cumulative();
    const EvolutionResult pr = amplitudes(d, h, e.w, basis_state(2, 0), out.times);
    std::vector<double> p1;
    for (std::size_t i = 0; i < out.times.size(); ++i) {
      p1.push_back(std::norm(pr.amplitudes(static_cast<Eigen::Index>(i), 1)));
    }
    out.predictions.push_back({{rh, rw}, std::move(p1)});
    const RabiData rd = rabi_frequency(h);
    out.t_pi.push_back(rd.t_pi);
    out.peak_transfer.push_back(4.0 * std::norm(rd.coupling) / (rd.rabi * rd.rabi));
  }
  return out;
}

std::vector<FluxoniumPoint> fluxonium_sweep(const std::vector<double>& amplitudes,
                                            const FluxoniumOptions& options) {
  if (options.orders.empty()) throw ValidationError("fluxonium sweep needs at least one order");
  const FluxoniumCircuit circuit(options.spec);
  std::vector<FluxoniumPoint> out(amplitudes.size());
  const int r_ref = *std::max_element(options.orders.begin(), options.orders.end());
  parallel_for(static_cast<int>(amplitudes.size()), options.threads, [&](int i) {
    const double a = amplitudes[static_cast<std::size_t>(i)];
    const SystemFamily family = [&circuit, a](double w) { return circuit.system(w, kTwoPi * a); };
    FluxoniumPoint p;
    p.amplitude = a;
    for (int r : options.orders) {
      FluxoniumOrder fo;
      fo.prediction = predict_resonance(family, 1, 3, r);
      p.orders.push_back(fo);
    }
    const auto ref = std::find_if(p.orders.begin(), p.orders.end(),
                                  [&](const FluxoniumOrder& o) { return o.prediction.r_h == r_ref; });
    p.oracle = oracle_optimum(family, 1, 3, ref->prediction.omega_d, ref->prediction.rabi);
    if (options.fidelities) {
      const DrivenSystem at_num = family(p.oracle.omega_d);
      for (auto& fo : p.orders) {
        fo.f_square = square_pulse_fidelity(family(fo.prediction.omega_d), 0, 1, fo.prediction.t_pi);
        const TransferPeak pk =
            predicted_transfer(at_num, 1, 3, fo.prediction.r_h, options.r_w, 1.3 * fo.prediction.t_pi);
        fo.t_timed = pk.t_op;
        fo.f_timed = square_pulse_fidelity(at_num, 0, 1, pk.t_op);
      }
    }
    out[static_cast<std::size_t>(i)] = std::move(p);
  });
  return out;
}

std::vector<PulsePoint> pulse_sweep(const std::vector<double>& amplitudes,
                                    const PulseSweepOptions& options) {
  const FluxoniumCircuit circuit(options.spec);
  std::vector<std::pair<double, int>> jobs;
  for (double a : amplitudes) {
    for (int r : options.orders) jobs.emplace_back(a, r);
  }
  std::vector<PulsePoint> out(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), options.threads, [&](int i) {
    const auto [a, r] = jobs[static_cast<std::size_t>(i)];
    const double amp = kTwoPi * a;
    const SystemFamily family = [&circuit, amp](double w) { return circuit.system(w, amp); };
    PulsePoint p;
    p.amplitude = a;
    p.r_h = r;
    PulseOptions po;
    po.r_h = r;
    po.target = 1;
    po.photon_number = 3;
    po.sigma = options.sigma;
    po.t0 = options.t0;
    po.scheme = options.scheme;
    po.check_only = true;
    try {
      p.design = solve_pulse(family, po);
      p.solved = true;
      const Envelope env{options.sigma, options.t0, p.design.duration};
      p.f_designed = evaluate_pulse(family(p.design.omega_d), env, 0, 1).fidelity;
    } catch (const NumericalError& e) {
      p.failure = e.what();
      const OrderPrediction sq = predict_resonance(family, 1, 3, r);
      p.design.square_omega_d = sq.omega_d;
      p.design.square_t_pi = sq.t_pi;
    }
    p.f_square = square_pulse_fidelity(family(p.design.square_omega_d), 0, 1, p.design.square_t_pi);
    out[static_cast<std::size_t>(i)] = std::move(p);
  });
  return out;
}

std::vector<TransmonPoint> transmon_sweep(const std::vector<double>& amplitudes_ghz,
                                          const TransmonOptions& options) {
  const TransmonCircuit circuit(options.spec);
  const double wq = options.spec.omega_q, alpha = options.spec.alpha;
  const double gap = circuit.energies()[1] - circuit.energies()[0];
  std::vector<TransmonPoint> out(amplitudes_ghz.size());
  parallel_for(static_cast<int>(amplitudes_ghz.size()), options.threads, [&](int i) {
    const double a = amplitudes_ghz[static_cast<std::size_t>(i)];
    const double amp = kTwoPi * a;
    const SystemFamily family = [&circuit, amp](double w) { return circuit.system(w, amp); };
    TransmonPoint p;
    p.amplitude_ghz = a;

    const OrderPrediction dpt = predict_resonance(family, 1, 3, options.r_h);
    p.eps_dpt = dpt.epsilon;
    p.coupling_dpt = 0.5 * dpt.rabi;

    // RWA resonance 3 w = E_1 - E_0 + 2 alpha eta(w)^2, by fixed point; the
    // shift is measured from the undriven gap like the other two columns.
    double w = gap / 3.0;
    for (int it = 0; it < 200; ++it) {
      const double next = (gap + transmon_rwa_reference(wq, alpha, amp, w).detuning_shift) / 3.0;
      if (std::abs(next - w) <= 1e-15 * w) {
        w = next;
        break;
      }
      w = next;
    }
    const RwaPrediction rwa = transmon_rwa_reference(wq, alpha, amp, w);
    p.eps_rwa = 3.0 * w - gap;
    p.coupling_rwa = std::abs(rwa.coupling);

    // Time-domain reference: the Floquet-mode selection breaks down once the
    // |1, 3> sector hybridizes with higher levels at strong drive.
    const double half = std::max(1.5 * dpt.rabi, 0.5 * std::abs(dpt.epsilon)) / 3.0;
    const OraclePoint op = oracle_optimum(family, 1, 3, dpt.omega_d, dpt.rabi, {}, half, 2.5);
    p.eps_num = 3.0 * op.omega_d - gap;
    p.coupling_num = 0.5 * op.rabi;
    p.fidelity = op.fidelity;
    p.flagged = op.flagged;
    out[static_cast<std::size_t>(i)] = p;
  });
  return out;
}

}  // namespace floquet
