#include "floquet/oracle.hpp"

#include "floquet/error.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace floquet {

namespace {

const double kSqrt3 = std::sqrt(3.0);
const double kC1 = 0.5 - kSqrt3 / 6.0;
const double kC2 = 0.5 + kSqrt3 / 6.0;
const double kA1 = 0.25 - kSqrt3 / 6.0;
const double kA2 = 0.25 + kSqrt3 / 6.0;

// exp(-i h A) for Hermitian A.
CMatrix expmh(const CMatrix& a, double h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
  const Eigen::VectorXd& l = es.eigenvalues();
  Eigen::VectorXcd ph(l.size());
  for (Eigen::Index i = 0; i < l.size(); ++i) ph(i) = std::exp(cplx(0.0, -h * l(i)));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

class Stepper {
public:
  explicit Stepper(const HamiltonianFn& h) : h_(h) {}

  // U(t + dt, t)
  CMatrix step(double t, double dt) {
    h_(t + kC1 * dt, h1_);
    h_(t + kC2 * dt, h2_);
    const CMatrix first = expmh(kA2 * h1_ + kA1 * h2_, dt);
    const CMatrix last = expmh(kA1 * h1_ + kA2 * h2_, dt);
    return last * first;
  }

private:
  const HamiltonianFn& h_;
  CMatrix h1_, h2_;
};

// Propagators U(s_i, 0) at sorted offsets in [0, T) and U(T, 0), with
// steps no longer than T / steps_per_period.
struct PeriodSweep {
  CMatrix period;
  std::vector<CMatrix> at_offset;
};

PeriodSweep sweep(const HamiltonianFn& h, int dim, double period, const std::vector<double>& offsets,
                  int steps_per_period) {
  Stepper st(h);
  const double hmax = period / steps_per_period;
  PeriodSweep out;
  CMatrix u = CMatrix::Identity(dim, dim);
  double t = 0.0;
  auto advance = [&](double to) {
    const double span = to - t;
    if (span <= 0.0) return;
    const int n = std::max(1, static_cast<int>(std::ceil(span / hmax - 1e-9)));
    const double dt = span / n;
    for (int i = 0; i < n; ++i) u = st.step(t + i * dt, dt) * u;
    t = to;
  };
  for (double s : offsets) {
    advance(s);
    out.at_offset.push_back(u);
  }
  advance(period);
  // Nearest unitary (polar factor) so that roundoff does not compound over
  // many repeated periods.
  const Eigen::JacobiSVD<CMatrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.period = svd.matrixU() * svd.matrixV().adjoint();
  return out;
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

CMatrix cf4_propagator(const HamiltonianFn& h, double t0, double t1, int steps) {
  if (steps < 1) throw ValidationError("integrator needs at least one step");
  CMatrix probe;
  h(t0, probe);
  Stepper st(h);
  CMatrix u = CMatrix::Identity(probe.rows(), probe.cols());
  const double dt = (t1 - t0) / steps;
  for (int i = 0; i < steps; ++i) u = st.step(t0 + i * dt, dt) * u;
  return u;
}

HamiltonianFn periodic_hamiltonian(const DrivenSystem& system, double drive_scale) {
  const int n = system.dimension();
  Eigen::VectorXd e(n);
  for (int k = 0; k < n; ++k) e(k) = system.energy(k);
  std::vector<std::pair<int, CMatrix>> harmonics(system.harmonics().begin(),
                                                 system.harmonics().end());
  const double w = system.drive_frequency();
  return [e, harmonics, w, drive_scale, n](double t, CMatrix& out) {
    out = CMatrix::Zero(n, n);
    out.diagonal() = e.cast<cplx>();
    for (const auto& [p, v] : harmonics) {
      const cplx f = p == 0 ? cplx(1.0) : drive_scale * std::exp(cplx(0.0, -p * w * t));
      out += f * v;
    }
  };
}

EvolutionResult integrate_fixed(const DrivenSystem& system, const CVector& psi0,
                                const std::vector<double>& times, int steps_per_period) {
  const int dim = system.dimension();
  if (psi0.size() != dim) throw ValidationError("initial state has the wrong dimension");
  const double period = 2.0 * M_PI / system.drive_frequency();
  std::vector<long long> cycles(times.size());
  std::vector<double> offs(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0)) throw ValidationError("integration times must be non-negative");
    long long n = static_cast<long long>(std::floor(times[i] / period));
    double s = times[i] - n * period;
    if (s < 0.0) s = 0.0;
    if (s >= period) {
      ++n;
      s -= period;
    }
    cycles[i] = n;
    offs[i] = s;
  }
  std::vector<double> offsets(offs);
  std::sort(offsets.begin(), offsets.end());
  offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
  const HamiltonianFn h = periodic_hamiltonian(system);
  const PeriodSweep sw = sweep(h, dim, period, offsets, steps_per_period);

  std::vector<std::size_t> order(times.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cycles[a] < cycles[b]; });

  EvolutionResult res;
  res.times = times;
  res.omega_d = system.drive_frequency();
  res.source = "oracle";
  res.amplitudes.resize(static_cast<Eigen::Index>(times.size()), dim);
  CVector psi = psi0;
  long long at = 0;
  const double norm0 = psi0.norm();
  for (std::size_t idx : order) {
    while (at < cycles[idx]) {
      psi = sw.period * psi;
      ++at;
      if (std::abs(psi.norm() - norm0) > 1e-8) {
        throw NumericalError("norm drift beyond 1e-8 during exact integration");
      }
    }
    const auto pos = std::lower_bound(offsets.begin(), offsets.end(), offs[idx]) - offsets.begin();
    res.amplitudes.row(static_cast<Eigen::Index>(idx)) =
        (sw.at_offset[static_cast<std::size_t>(pos)] * psi).transpose();
  }
  return res;
}

EvolutionResult integrate(const DrivenSystem& system, const CVector& psi0,
                          const std::vector<double>& times, const IntegratorConfig& config) {
  int m = config.steps_per_period;
  EvolutionResult coarse = integrate_fixed(system, psi0, times, m);
  for (int halving = 0; halving < config.max_halvings; ++halving) {
    m *= 2;
    EvolutionResult fine = integrate_fixed(system, psi0, times, m);
    const double diff =
        times.empty() ? 0.0 : (fine.populations() - coarse.populations()).cwiseAbs().maxCoeff();
    if (diff <= config.population_tolerance) return fine;
    coarse = std::move(fine);
  }
  std::ostringstream os;
  os << "exact integration did not converge after " << config.max_halvings
     << " step halvings (" << m << " steps per period)";
  throw ConvergenceError(os.str());
}

CMatrix period_propagator(const DrivenSystem& system, const IntegratorConfig& config,
                          int* steps_used) {
  const double period = 2.0 * M_PI / system.drive_frequency();
  const HamiltonianFn h = periodic_hamiltonian(system);
  int m = config.steps_per_period;
  CMatrix coarse = sweep(h, system.dimension(), period, {}, m).period;
  for (int halving = 0; halving < config.max_halvings; ++halving) {
    m *= 2;
    CMatrix fine = sweep(h, system.dimension(), period, {}, m).period;
    if (max_abs(fine - coarse) <= config.period_tolerance) {
      if (steps_used) *steps_used = m;
      return fine;
    }
    coarse = std::move(fine);
  }
  throw ConvergenceError("one-period propagator did not converge under step halving");
}

double fold_quasi_energy(double q, double omega_d, double center) {
  double x = std::fmod(q - center, omega_d);
  if (x > 0.5 * omega_d) x -= omega_d;
  if (x <= -0.5 * omega_d) x += omega_d;
  return x + center;
}

namespace {

struct FloquetBasis {
  std::vector<double> phases;  // -arg(lambda) / T, unfolded
  CMatrix vectors;
};

FloquetBasis diagonalize_period(const CMatrix& u, double period) {
  Eigen::ComplexSchur<CMatrix> schur(u);
  FloquetBasis fb;
  fb.vectors = schur.matrixU();
  const CMatrix& t = schur.matrixT();
  for (Eigen::Index i = 0; i < t.rows(); ++i) fb.phases.push_back(-std::arg(t(i, i)) / period);
  return fb;
}

void label_by_overlap(const CMatrix& reference, const CMatrix& vectors, QuasiEnergies& q) {
  const auto n = reference.cols();
  q.labels.assign(static_cast<std::size_t>(n), -1);
  q.overlaps.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<bool> taken(static_cast<std::size_t>(vectors.cols()), false);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::RowVectorXd ov = (reference.col(k).adjoint() * vectors).cwiseAbs2();
    Eigen::Index j = 0;
    const double best = ov.maxCoeff(&j);
    q.labels[static_cast<std::size_t>(k)] = static_cast<int>(j);
    q.overlaps[static_cast<std::size_t>(k)] = best;
    if (best < 0.5 || taken[static_cast<std::size_t>(j)]) q.ambiguous = true;
    taken[static_cast<std::size_t>(j)] = true;
  }
}

}  // namespace

QuasiEnergies quasi_energies(const DrivenSystem& system, const IntegratorConfig& config,
                             int continuation_steps) {
  const double w = system.drive_frequency();
  const double period = 2.0 * M_PI / w;
  const int n = system.dimension();
  QuasiEnergies q;
  CMatrix reference = CMatrix::Identity(n, n);
  FloquetBasis fb;
  if (continuation_steps > 0) {
    for (int s = 1; s <= continuation_steps; ++s) {
      const DrivenSystem scaled =
          system.with_drive_scaled(static_cast<double>(s) / continuation_steps);
      fb = diagonalize_period(period_propagator(scaled, config), period);
      QuasiEnergies step;
      label_by_overlap(reference, fb.vectors, step);
      CMatrix next(n, n);
      for (int k = 0; k < n; ++k) next.col(k) = fb.vectors.col(step.labels[static_cast<std::size_t>(k)]);
      reference = next;
      q.ambiguous = q.ambiguous || step.ambiguous;
    }
    const bool amb = q.ambiguous;
    label_by_overlap(reference, fb.vectors, q);
    q.ambiguous = q.ambiguous || amb;
  } else {
    fb = diagonalize_period(period_propagator(system, config), period);
    label_by_overlap(reference, fb.vectors, q);
  }
  q.vectors = fb.vectors;
  for (double ph : fb.phases) q.values.push_back(fold_quasi_energy(ph, w));
  return q;
}

FloquetEffective floquet_effective_hamiltonian(const DrivenSystem& system,
                                               const ResonantDecomposition& decomp,
                                               const IntegratorConfig& config) {
  const int dim = system.dimension();
  const double w = system.drive_frequency();
  const double period = 2.0 * M_PI / w;
  int m = 0;
  const CMatrix ut = period_propagator(system, config, &m);
  const FloquetBasis fb = diagonalize_period(ut, period);

  // U(t_j, 0) on the uniform grid t_j = j T / m.
  std::vector<double> grid(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) grid[static_cast<std::size_t>(j)] = j * period / m;
  const PeriodSweep sw = sweep(periodic_hamiltonian(system), dim, period, grid, m);

  const auto& D = decomp.degenerate_set;
  const int d = static_cast<int>(D.size());
  const double e0 = decomp.reference_energy;
  struct Mode {
    double q;
    Eigen::VectorXcd proj;
    double weight;
  };
  std::vector<Mode> modes;
  for (int s = 0; s < dim; ++s) {
    const double q = fold_quasi_energy(fb.phases[static_cast<std::size_t>(s)], w, e0);
    Eigen::VectorXcd proj = Eigen::VectorXcd::Zero(d);
    for (int j = 0; j < m; ++j) {
      const double t = grid[static_cast<std::size_t>(j)];
      const CVector psi = sw.at_offset[static_cast<std::size_t>(j)] * fb.vectors.col(s);
      for (int a = 0; a < d; ++a) {
        const int k = D[static_cast<std::size_t>(a)];
        const int nk = decomp.photon_numbers[static_cast<std::size_t>(k)];
        proj(a) += std::exp(cplx(0.0, (q + nk * w) * t)) * psi(k);
      }
    }
    proj /= static_cast<double>(m);
    modes.push_back({q, proj, proj.squaredNorm()});
  }
  std::stable_sort(modes.begin(), modes.end(),
                   [](const Mode& a, const Mode& b) { return a.weight > b.weight; });

  FloquetEffective fe;
  CMatrix b(d, d);
  Eigen::VectorXd q(d);
  for (int s = 0; s < d; ++s) {
    b.col(s) = modes[static_cast<std::size_t>(s)].proj;
    q(s) = modes[static_cast<std::size_t>(s)].q - e0;
    fe.weights.push_back(modes[static_cast<std::size_t>(s)].weight);
    if (modes[static_cast<std::size_t>(s)].weight < 0.5) fe.ambiguous = true;
  }
  // B (B^dagger B)^{-1/2}
  Eigen::SelfAdjointEigenSolver<CMatrix> es(b.adjoint() * b);
  const Eigen::VectorXd ev = es.eigenvalues().cwiseSqrt().cwiseInverse();
  const CMatrix bt = b * (es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint());
  fe.h = bt * q.cast<cplx>().asDiagonal() * bt.adjoint();
  return fe;
}

FloquetResonance floquet_resonance(const SystemFamily& family, int target,
                                   std::pair<double, double> bracket,
                                   const IntegratorConfig& config) {
  const std::vector<int> dset{0, target};
  auto eval = [&](double w) {
    const DrivenSystem s = family(w);
    return floquet_effective_hamiltonian(s, decompose(s, kDefaultMembershipThreshold, dset), config);
  };
  auto f = [&](double w) {
    const CMatrix h = eval(w).h;
    return h(1, 1).real() - h(0, 0).real();
  };
  double a = bracket.first, b = bracket.second;
  const double fa = f(a), fb = f(b);
  if (fa * fb > 0.0) throw NumericalError("exact detuning does not change sign in the bracket");
  boost::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(
      f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(44), iters);
  FloquetResonance res;
  res.omega_d = 0.5 * (r.first + r.second);
  const FloquetEffective fe = eval(res.omega_d);
  res.h = fe.h;
  res.ambiguous = fe.ambiguous;
  res.coupling = std::abs(fe.h(1, 0));
  const double delta = fe.h(1, 1).real() - fe.h(0, 0).real();
  res.rabi = std::sqrt(delta * delta + 4.0 * res.coupling * res.coupling);
  return res;
}

TransferPeak transfer_at(const SystemFamily& family, double omega_d, double t_max,
                         const TransferOptions& options) {
  const DrivenSystem s = family(omega_d);
  const auto times = time_grid(t_max, omega_d, options.samples_per_period);
  const CVector psi0 = basis_state(s.dimension(), options.initial);
  const EvolutionResult r = integrate(s, psi0, times, options.integrator);
  TransferPeak pk = max_transfer(r, options.target);
  if (pk.boundary) return pk;
  // The parabolic vertex is only a time estimate; its population is
  // recomputed, falling back to the best sample.
  const EvolutionResult at = integrate(s, psi0, {pk.t_op}, options.integrator);
  const double exact = std::norm(at.amplitudes(0, options.target));
  const double sampled = std::norm(r.amplitudes(static_cast<Eigen::Index>(pk.sample), options.target));
  if (exact >= sampled) {
    pk.population = exact;
  } else {
    pk.t_op = r.times[pk.sample];
    pk.population = sampled;
  }
  return pk;
}

TransferOptimum optimize_transfer(const SystemFamily& family, std::pair<double, double> window,
                                  double t_max, const TransferOptions& options) {
  if (!(window.first > 0.0) || !(window.second > window.first)) {
    throw ValidationError("transfer window must satisfy 0 < lo < hi");
  }
  if (options.grid_points < 3) throw ValidationError("transfer grid needs at least 3 points");
  TransferOptimum out;
  const int n = options.grid_points;
  std::size_t best = 0;
  for (int i = 0; i < n; ++i) {
    const double w = window.first + (window.second - window.first) * i / (n - 1);
    const double f = transfer_at(family, w, t_max, options).population;
    out.grid.emplace_back(w, f);
    if (f > out.grid[best].second) best = static_cast<std::size_t>(i);
  }
  const double lo = out.grid[best == 0 ? 0 : best - 1].first;
  const double hi = out.grid[std::min(best + 1, out.grid.size() - 1)].first;
  const double rel = std::max(options.omega_tolerance, 1e-15);
  const int bits = std::max(8, static_cast<int>(std::ceil(-std::log2(rel))));
  boost::uintmax_t iters = 200;
  const auto m = boost::math::tools::brent_find_minima(
      [&](double w) { return -transfer_at(family, w, t_max, options).population; }, lo, hi, bits,
      iters);
  double w = m.first;
  if (-m.second < out.grid[best].second) w = out.grid[best].first;
  const TransferPeak pk = transfer_at(family, w, t_max, options);
  out.omega_d = w;
  out.t_op = pk.t_op;
  out.fidelity = pk.population;
  out.flagged = pk.population < 0.5 || best == 0 || best + 1 == out.grid.size() || pk.boundary;
  return out;
}

}  // namespace floquet
