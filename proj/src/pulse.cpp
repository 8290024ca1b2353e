#include "floquet/pulse.hpp"

#include "floquet/error.hpp"
#include "floquet/pert.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace floquet {

const double kConvergenceBound = std::log(2.0);

void Envelope::validate() const {
  if (!(sigma > 0.0)) throw ValidationError("envelope width sigma must be positive");
  if (!(t0 >= 0.0)) throw ValidationError("envelope rise time t0 must be non-negative");
  if (!(duration > 2.0 * t0)) throw ValidationError("pulse duration must exceed 2 t0");
}

double Envelope::operator()(double t) const {
  if (t < t0) return std::exp(-(t - t0) * (t - t0) / (2.0 * sigma * sigma));
  const double fall = duration - t0;
  if (t <= fall) return 1.0;
  return std::exp(-(t - fall) * (t - fall) / (2.0 * sigma * sigma));
}

CMatrix AmplitudePolynomial::at(double s) const {
  CMatrix h = CMatrix::Zero(coefficients.front().rows(), coefficients.front().cols());
  double p = 1.0;
  for (const auto& c : coefficients) {
    h += p * c;
    p *= s;
  }
  return h;
}

AmplitudePolynomial heff_of_amplitude(const DrivenSystem& system,
                                      const ResonantDecomposition& decomp, int r_h,
                                      const SambeOptions& options) {
  if (r_h < 1) throw ValidationError("amplitude polynomial needs r_h >= 1");
  const SambeSpace space = build_space(decomp, system.max_harmonic(), r_h, options.extra_margin);
  SambeOperators ops = build_operators(system, decomp, space, options);
  const int d = decomp.degenerate_dimension();
  // H(s) has degree <= r_h in s; sampling on r_h + 1 roots of unity gives
  // the coefficients by a discrete Fourier transform.
  const int k = r_h + 1;
  std::vector<CMatrix> samples;
  std::vector<cplx> nodes;
  for (int m = 0; m < k; ++m) {
    const cplx s = std::polar(1.0, 2.0 * M_PI * m / k);
    nodes.push_back(s);
    ops.v = ops.v_static + s * ops.v_drive;
    CMatrix h = CMatrix::Zero(d, d);
    for (int r = 1; r <= r_h; ++r) h += evaluate_string(opalg::heff_table(r), ops);
    samples.push_back(h);
  }
  AmplitudePolynomial poly;
  poly.r_h = r_h;
  poly.omega_d = decomp.drive_frequency;
  for (int k2 : decomp.degenerate_set) {
    poly.photon_numbers.push_back(decomp.photon_numbers[static_cast<std::size_t>(k2)]);
  }
  for (int j = 0; j < k; ++j) {
    CMatrix c = CMatrix::Zero(d, d);
    for (int m = 0; m < k; ++m) c += samples[static_cast<std::size_t>(m)] * std::pow(std::conj(nodes[static_cast<std::size_t>(m)]), j);
    c /= static_cast<double>(k);
    poly.coefficients.push_back(0.5 * (c + c.adjoint()));
  }
  return poly;
}

namespace {

CMatrix comm(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

// int_0^t exp(-j (tau - t0)^2 / 2 sigma^2) dtau
double ramp_integral(int j, double t, double t0, double sigma) {
  if (j == 0) return t;
  const double c = std::sqrt(0.5 * j) / sigma;
  return std::sqrt(M_PI) / (2.0 * c) * (std::erf(c * (t - t0)) + std::erf(c * t0));
}

double rise(double t, double t0, double sigma) {
  return std::exp(-(t - t0) * (t - t0) / (2.0 * sigma * sigma));
}

template <class F>
double quad(F f, double a, double b) {
  if (b <= a) return 0.0;
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, 1e-13, &err);
  if (err > 1e-9 * std::max(1.0, std::abs(v))) {
    throw ConvergenceError("ramp quadrature did not reach the requested accuracy");
  }
  return v;
}

struct Segment {
  CMatrix a;  // int H
  CMatrix b;  // int_{t2 < t1} [H(t1), H(t2)]
};

// Composite 8-point Gauss-Legendre with panel doubling until A and B change
// by less than 1e-12 of their scale.
template <class F>
Segment magnus_segment(F h, double len) {
  using GL = boost::math::quadrature::gauss<double, 8>;
  // Full node set on [-1, 1].
  std::vector<double> x, wts;
  const auto& ab = GL::abscissa();
  const auto& wt = GL::weights();
  for (std::size_t i = 0; i < ab.size(); ++i) {
    if (ab[i] == 0.0) {
      x.push_back(0.0);
      wts.push_back(wt[i]);
      continue;
    }
    x.push_back(-ab[i]);
    wts.push_back(wt[i]);
    x.push_back(ab[i]);
    wts.push_back(wt[i]);
  }
  auto integrate = [&](double lo, double hi) {
    CMatrix s = CMatrix::Zero(2, 2);
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < x.size(); ++i) s += wts[i] * half * h(mid + half * x[i]);
    return s;
  };
  auto run = [&](int panels) {
    Segment seg{CMatrix::Zero(2, 2), CMatrix::Zero(2, 2)};
    const double dp = len / panels;
    CMatrix acc = CMatrix::Zero(2, 2);
    for (int p = 0; p < panels; ++p) {
      const double lo = p * dp, half = 0.5 * dp, mid = lo + half;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double t1 = mid + half * x[i];
        const CMatrix g = acc + integrate(lo, t1);
        seg.b += wts[i] * half * comm(h(t1), g);
      }
      acc += integrate(lo, lo + dp);
    }
    seg.a = acc;
    return seg;
  };
  int panels = 8;
  Segment coarse = run(panels);
  for (; panels <= 4096; panels *= 2) {
    Segment fine = run(2 * panels);
    const double scale = std::max({1e-300, fine.a.cwiseAbs().maxCoeff(), fine.b.cwiseAbs().maxCoeff()});
    const double diff = std::max((fine.a - coarse.a).cwiseAbs().maxCoeff(),
                                 (fine.b - coarse.b).cwiseAbs().maxCoeff());
    if (diff <= 1e-12 * scale) return fine;
    coarse = std::move(fine);
  }
  throw ConvergenceError("ramp Magnus quadrature did not converge under panel doubling");
}

CMatrix expm_antihermitian(const CMatrix& x) {
  // exp(x) for anti-Hermitian x via the Hermitian i x.
  Eigen::SelfAdjointEigenSolver<CMatrix> es(cplx(0.0, 1.0) * x);
  Eigen::VectorXcd ph(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < ph.size(); ++i) ph(i) = std::exp(cplx(0.0, -es.eigenvalues()(i)));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

// Hermitian G with U = exp(-i G) for a 2x2 unitary with det U = exp(-i phase).
// The SU(2) part V = U e^{i phase/2} = cos(phi) - i sin(phi) n.sigma is
// taken with phi in [0, pi], so the branch follows the known phase.
CMatrix log_unitary(const CMatrix& u, double phase) {
  const CMatrix v = u * std::exp(cplx(0.0, 0.5 * phase));
  const double c = 0.5 * (v(0, 0) + v(1, 1)).real();
  const cplx nxy = cplx(0.0, 1.0) * 0.5 * (v(1, 0) - std::conj(v(0, 1)));  // sin(phi) (nx + i ny)
  const double nz = -0.5 * (v(0, 0) - v(1, 1)).imag();                       // sin(phi) nz
  const double s = std::sqrt(std::norm(nxy) + nz * nz);
  const double phi = std::atan2(s, c);
  const double k = s > 1e-300 ? phi / s : 1.0;
  CMatrix g = CMatrix::Identity(2, 2) * (0.5 * phase);
  g(0, 0) += k * nz;
  g(1, 1) -= k * nz;
  g(1, 0) = k * nxy;
  g(0, 1) = std::conj(k * nxy);
  return g;
}

// T-independent pieces of a design.
struct RampPieces {
  MagnusDesign base;
  // Toggling frame: plateau generator and ramp propagators.
  CMatrix h_plateau, u_rise, u_fall;
  // tr of the ramp generators: det(u_fall u_rise) = exp(-i ramp_phase).
  double ramp_phase = 0.0;
};

RampPieces ramp_pieces(const AmplitudePolynomial& poly, double t0, double sigma, MagnusScheme scheme) {
  const int k = static_cast<int>(poly.coefficients.size());
  RampPieces rp;
  MagnusDesign& m = rp.base;
  m.scheme = scheme;
  m.h = poly.at(1.0);
  m.s0 = CMatrix::Zero(2, 2);
  m.s1 = CMatrix::Zero(2, 2);
  m.hm1 = CMatrix::Zero(2, 2);
  m.hm2 = CMatrix::Zero(2, 2);
  if (t0 > 0.0) {
    for (int j = 0; j < k; ++j) {
      m.s0 += poly.coefficients[static_cast<std::size_t>(j)] * ramp_integral(j, t0, t0, sigma);
    }
    m.s0 /= t0;
    // int_0^t0 dt1 E^a(t1) int_0^t1 E^b(t2): only a != b survive the commutator.
    for (int a = 0; a < k; ++a) {
      for (int b = a + 1; b < k; ++b) {
        const CMatrix c = comm(poly.coefficients[static_cast<std::size_t>(a)],
                               poly.coefficients[static_cast<std::size_t>(b)]);
        if (c.cwiseAbs().maxCoeff() == 0.0) continue;
        auto inner = [&](int p, int q) {
          return quad([&](double t) { return std::pow(rise(t, t0, sigma), p) * ramp_integral(q, t, t0, sigma); },
                      0.0, t0);
        };
        m.s1 += c * (inner(a, b) - inner(b, a));
      }
    }
    m.s1 /= 2.0 * t0;
  }

  if (scheme == MagnusScheme::Bch) {
    const cplx i(0.0, 1.0);
    m.hm1 = i * t0 * comm(m.s0, m.h);
    m.hm2 = t0 * comm(m.s1, m.h) - 0.5 * t0 * t0 * comm(m.s0, comm(m.s0, m.h));
    m.nested_commutators = 2;
  } else {
    m.nested_commutators = -1;
    // theta(t) = int_0^t (delta(s) - delta_p) ds on the rise.
    std::vector<double> dj(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
      const CMatrix& c = poly.coefficients[static_cast<std::size_t>(j)];
      dj[static_cast<std::size_t>(j)] = c(1, 1).real() - c(0, 0).real();
    }
    const double dp = m.h(1, 1).real() - m.h(0, 0).real();
    auto theta = [&](double t) {
      double th = -dp * t;
      for (int j = 0; j < k; ++j) th += dj[static_cast<std::size_t>(j)] * ramp_integral(j, t, t0, sigma);
      return th;
    };
    const double theta_r = theta(t0);
    CMatrix diag_p = CMatrix::Zero(2, 2);
    diag_p.diagonal() = m.h.diagonal();
    auto frame = [&](double e, double th) {
      const cplx c = poly.at(e)(1, 0) * std::exp(cplx(0.0, th));
      CMatrix out = diag_p;
      out(1, 0) = c;
      out(0, 1) = std::conj(c);
      return out;
    };
    rp.h_plateau = frame(1.0, theta_r);
    if (t0 > 0.0) {
      const Segment r = magnus_segment([&](double t) { return frame(rise(t, t0, sigma), theta(t)); }, t0);
      const Segment f = magnus_segment(
          [&](double tau) { return frame(rise(t0 - tau, t0, sigma), 2.0 * theta_r - theta(t0 - tau)); }, t0);
      rp.u_rise = expm_antihermitian(cplx(0.0, -1.0) * r.a - 0.5 * r.b);
      rp.u_fall = expm_antihermitian(cplx(0.0, -1.0) * f.a - 0.5 * f.b);
      rp.ramp_phase = (r.a.trace() + f.a.trace()).real();
    } else {
      rp.u_rise = CMatrix::Identity(2, 2);
      rp.u_fall = CMatrix::Identity(2, 2);
    }
  }

  m.convergence_integral =
      t0 > 0.0 ? quad([&](double t) { return 2.0 * std::abs(poly.at(rise(t, t0, sigma))(1, 0)); }, 0.0, t0)
               : 0.0;
  m.converges = m.convergence_integral < kConvergenceBound;
  m.adiabatic_ratio = t0 > 0.0 ? 2.0 * M_PI / poly.omega_d / t0 : INFINITY;
  m.adiabatic_flag = m.adiabatic_ratio > 0.2;
  return rp;
}

MagnusDesign assemble(const RampPieces& rp, const Envelope& envelope) {
  MagnusDesign m = rp.base;
  m.envelope = envelope;
  const double total = envelope.duration, plateau = envelope.plateau();
  if (m.scheme == MagnusScheme::Bch) {
    m.h_m = plateau / total * (m.h + m.hm1 + m.hm2);
  } else {
    const CMatrix up = expm_antihermitian(cplx(0.0, -plateau) * rp.h_plateau);
    m.h_m = log_unitary(rp.u_fall * up * rp.u_rise, rp.ramp_phase + plateau * rp.h_plateau.trace().real()) / total;
  }
  m.h_m = 0.5 * (m.h_m + m.h_m.adjoint());
  m.delta_m = m.h_m(1, 1).real() - m.h_m(0, 0).real();
  m.omega_x = m.h_m(1, 0).real();
  m.omega_y = m.h_m(1, 0).imag();
  m.omega_m = std::abs(m.h_m(1, 0));
  return m;
}

}  // namespace

std::string to_string(MagnusScheme s) { return s == MagnusScheme::Bch ? "bch" : "toggling"; }

MagnusScheme magnus_scheme_from_string(const std::string& s) {
  if (s == "bch") return MagnusScheme::Bch;
  if (s == "toggling") return MagnusScheme::Toggling;
  throw ValidationError("unknown Magnus scheme '" + s + "' (expected bch|toggling)");
}

MagnusDesign magnus_design(const AmplitudePolynomial& poly, const Envelope& envelope,
                           MagnusScheme scheme) {
  envelope.validate();
  if (poly.coefficients.empty() || poly.coefficients.front().rows() != 2) {
    throw ValidationError("pulse design needs a two-level effective Hamiltonian");
  }
  return assemble(ramp_pieces(poly, envelope.t0, envelope.sigma, scheme), envelope);
}

namespace {

struct Designer {
  const SystemFamily& family;
  const PulseOptions& opt;
  mutable double cached_w = -1.0;
  mutable RampPieces cached{};

  ResonantDecomposition decomposition(const DrivenSystem& s) const {
    return decompose(s, kDefaultMembershipThreshold, std::vector<int>{0, opt.target},
                     {{opt.target, opt.photon_number}});
  }

  const RampPieces& pieces(double w) const {
    if (w != cached_w) {
      const DrivenSystem s = family(w);
      cached = ramp_pieces(heff_of_amplitude(s, decomposition(s), opt.r_h, opt.sambe), opt.t0,
                           opt.sigma, opt.scheme);
      cached_w = w;
    }
    return cached;
  }

  MagnusDesign design(double w, double plateau) const {
    return assemble(pieces(w), Envelope{opt.sigma, opt.t0, plateau + 2.0 * opt.t0});
  }
};

template <class F>
double bracketed_root(F f, double x0, double rel_step, double max_rel, double floor, const char* what) {
  double lo = x0, hi = x0, flo = f(x0), fhi = flo;
  if (flo == 0.0) return x0;
  double step = rel_step * x0;
  while (flo * fhi > 0.0) {
    step *= 2.0;
    if (step > max_rel * x0) throw NumericalError(std::string("pulse design: no root for ") + what);
    lo = std::max(floor, x0 - step);
    hi = x0 + step;
    flo = f(lo);
    fhi = f(hi);
  }
  boost::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                   boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace

PulseDesign solve_pulse(const SystemFamily& family, const PulseOptions& options) {
  if (options.max_iterations < 1) throw ValidationError("pulse solver needs at least one iteration");
  if (options.photon_number < 1) throw ValidationError("pulse design needs the photon number n_target >= 1");
  Envelope{options.sigma, options.t0, 2.0 * options.t0 + 1.0}.validate();
  ResonanceOptions ro;
  ro.r_h = options.r_h;
  ro.target = options.target;
  ro.photon_number = options.photon_number;
  ro.sambe = options.sambe;
  const ResonanceResult sq = resonance_frequency(family, ro);
  const Designer dz{family, options};

  PulseDesign out;
  out.square_omega_d = sq.omega_d;
  {
    const DrivenSystem s = family(sq.omega_d);
    out.square_t_pi =
        rabi_frequency(heff_of_amplitude(s, dz.decomposition(s), options.r_h, options.sambe).at(1.0)).t_pi;
  }

  double w = sq.omega_d;
  double plateau = out.square_t_pi;
  auto check = [&](const MagnusDesign& m) {
    if (!m.converges && !options.check_only) {
      std::ostringstream os;
      os << "The Magnus expansion converges whenever int_0^t0 Omega(t) dt < log 2; the ramp gives "
         << m.convergence_integral;
      throw ConvergenceError(os.str());
    }
  };
  check(dz.design(w, plateau));

  for (int it = 1; it <= options.max_iterations; ++it) {
    out.iterations = it;
    const double w_new = bracketed_root(
        [&](double x) { return dz.design(x, plateau).delta_m; }, w, 1e-7, 0.05, 0.0, "delta_M = 0");
    const double plateau_new = bracketed_root(
        [&](double tp) {
          const MagnusDesign m = dz.design(w_new, tp);
          return m.omega_m * m.envelope.duration - 0.5 * M_PI;
        },
        plateau, 1e-4, 64.0, 0.0, "the pi condition");
    const double dw = std::abs(w_new - w) / w;
    const double dt = std::abs(plateau_new - plateau) / (plateau + 2.0 * options.t0);
    w = w_new;
    plateau = plateau_new;
    if (dw <= options.tolerance && dt <= options.tolerance) break;
    if (it == options.max_iterations) {
      throw ConvergenceError("pulse design: alternating solves did not converge in the iteration cap");
    }
  }
  const MagnusDesign m = dz.design(w, plateau);
  check(m);
  const double total = m.envelope.duration;
  out.residual = std::max(std::abs(m.delta_m) * total, std::abs(2.0 * m.omega_m * total - M_PI));
  out.omega_d = w;
  const ResonantDecomposition d = dz.decomposition(family(w));
  out.epsilon = d.detunings[static_cast<std::size_t>(options.target)];
  out.duration = total;
  out.magnus = m;
  return out;
}

PulseEvaluation evaluate_pulse(const DrivenSystem& system, const Envelope& envelope, int initial,
                               int target, const IntegratorConfig& config) {
  envelope.validate();
  const int n = system.dimension();
  if (initial < 0 || initial >= n || target < 0 || target >= n) {
    throw ValidationError("pulse evaluation levels out of range");
  }
  const double w = system.drive_frequency();
  const double period = 2.0 * M_PI / w;
  Eigen::VectorXd e(n);
  for (int k = 0; k < n; ++k) e(k) = system.energy(k);
  const CMatrix stat = system.harmonic(0);
  std::vector<std::pair<int, CMatrix>> drive;
  for (const auto& [p, v] : system.harmonics()) {
    if (p != 0) drive.emplace_back(p, v);
  }
  const HamiltonianFn h = [&](double t, CMatrix& out) {
    out = stat;
    out.diagonal() += e.cast<cplx>();
    const double a = envelope(t);
    for (const auto& [p, v] : drive) out += a * std::exp(cplx(0.0, -p * w * t)) * v;
  };

  const double t0 = envelope.t0, total = envelope.duration;
  const double fall = total - t0;
  auto run = [&](int m) {
    const double hmax = period / m;
    auto steps = [&](double span) { return std::max(1, static_cast<int>(std::ceil(span / hmax - 1e-9))); };
    CMatrix u = CMatrix::Identity(n, n);
    if (t0 > 0.0) u = cf4_propagator(h, 0.0, t0, steps(t0));
    // Plateau: U(t0 + c T + s, t0) = U(t0 + s, t0) U(t0 + T, t0)^c.
    const double span = fall - t0;
    const auto cycles = static_cast<long long>(std::floor(span / period));
    const double rest = span - cycles * period;
    if (cycles > 0) {
      const CMatrix ut = cf4_propagator(h, t0, t0 + period, m);
      CMatrix pw = CMatrix::Identity(n, n), base = ut;
      for (long long c = cycles; c > 0; c >>= 1) {
        if (c & 1) pw = base * pw;
        base = base * base;
      }
      u = pw * u;
    }
    if (rest > 0.0) u = cf4_propagator(h, t0, t0 + rest, steps(rest)) * u;
    if (t0 > 0.0) u = cf4_propagator(h, fall, total, steps(t0)) * u;
    return CVector(u.col(initial));
  };

  int m = config.steps_per_period;
  CVector coarse = run(m);
  for (int halving = 0; halving < config.max_halvings; ++halving) {
    m *= 2;
    CVector fine = run(m);
    if ((fine.cwiseAbs2() - coarse.cwiseAbs2()).cwiseAbs().maxCoeff() <= config.population_tolerance) {
      if (std::abs(fine.norm() - 1.0) > config.norm_drift) {
        throw NumericalError("norm drift beyond tolerance during pulse integration");
      }
      PulseEvaluation ev;
      ev.fidelity = std::norm(fine(target));
      ev.leakage = 1.0 - std::norm(fine(initial)) - ev.fidelity;
      ev.steps_per_period = m;
      return ev;
    }
    coarse = std::move(fine);
  }
  throw ConvergenceError("pulse integration did not converge under step halving");
}

}  // namespace floquet
