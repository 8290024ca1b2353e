#include "floquet/evolve.hpp"

#include "floquet/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace floquet {

std::vector<double> EvolutionResult::leakage() const {
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    double inside = 0.0;
    for (int k : degenerate_set) inside += std::norm(amplitudes(static_cast<Eigen::Index>(i), k));
    out[i] = 1.0 - inside;
  }
  return out;
}

std::vector<double> time_grid(double t_end, double omega_d, int samples_per_period) {
  if (!(t_end >= 0.0) || !(omega_d > 0.0) || samples_per_period < 1) {
    throw ValidationError("time grid needs t_end >= 0, w_d > 0 and a positive density");
  }
  const double dt = 2.0 * M_PI / omega_d / samples_per_period;
  const auto n = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  std::vector<double> t(n + 1);
  for (std::size_t i = 0; i <= n; ++i) t[i] = std::min(t_end, static_cast<double>(i) * dt);
  return t;
}

CVector basis_state(int levels, int k) {
  CVector v = CVector::Zero(levels);
  v(k) = 1.0;
  return v;
}

namespace {

class EffPropagator {
public:
  explicit EffPropagator(const CMatrix& h) {
    const CMatrix sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
    vals_ = es.eigenvalues();
    vecs_ = es.eigenvectors();
  }
  CMatrix at(double t) const {
    Eigen::VectorXcd ph(vals_.size());
    for (Eigen::Index i = 0; i < vals_.size(); ++i) ph(i) = std::exp(cplx(0.0, -vals_(i) * t));
    return vecs_ * ph.asDiagonal() * vecs_.adjoint();
  }

private:
  Eigen::VectorXd vals_;
  CMatrix vecs_;
};

void check_initial(const ResonantDecomposition& d, const CVector& initial, double tol) {
  if (initial.size() != d.levels()) {
    throw ValidationError("initial state must list one amplitude per level");
  }
  double outside = 0.0;
  for (int k = 0; k < d.levels(); ++k) {
    if (!d.in_degenerate_set(k)) outside += std::norm(initial(k));
  }
  if (std::sqrt(outside) > tol) {
    throw ValidationError(
        "initial state has weight outside the degenerate set; the perturbative evolution is "
        "restricted to initial states with P_D|psi(0)> = |psi(0)>");
  }
  if (std::abs(initial.norm() - 1.0) > 1e-9) throw ValidationError("initial state must be normalized");
}

void normalize_rows(Eigen::MatrixXcd& c) {
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    const double n = c.row(i).norm();
    if (n > 0.0) c.row(i) /= n;
  }
}

}  // namespace

CMatrix u_eff(const CMatrix& h, double t) { return EffPropagator(h).at(t); }

EvolutionResult amplitudes(const ResonantDecomposition& decomp, const CMatrix& heff,
                           const WOperator& w, const CVector& initial,
                           const std::vector<double>& times, const EvolveOptions& options) {
  check_initial(decomp, initial, options.initial_tolerance);
  const int d = decomp.degenerate_dimension();
  if (heff.rows() != d || w.orders.empty() || w.orders.front().cols() != d) {
    throw ValidationError("effective Hamiltonian and W were built on a different degenerate set");
  }
  const SambeSpace& sp = w.space;
  const int rw = w.max_order();

  // S^dagger(0)|psi(0)>: the bare amplitude repeated in every sector.
  Eigen::VectorXcd s0(sp.dimension());
  for (int p = -sp.p_max; p <= sp.p_max; ++p) {
    for (int k = 0; k < sp.levels; ++k) s0(sp.index(k, p)) = initial(k);
  }
  std::vector<Eigen::VectorXcd> y;
  for (const auto& wr : w.orders) y.push_back(wr.adjoint() * s0);

  // Right factors: for the truncated product, column i holds
  // sum_{j <= r_W - i} W_j^dagger s0; the full product uses all j for every i.
  std::vector<Eigen::VectorXcd> right(static_cast<std::size_t>(rw + 1),
                                      Eigen::VectorXcd::Zero(d));
  for (int i = 0; i <= rw; ++i) {
    const int jmax = options.product == WProduct::Truncated ? rw - i : rw;
    for (int j = 0; j <= jmax; ++j) right[static_cast<std::size_t>(i)] += y[static_cast<std::size_t>(j)];
  }

  const EffPropagator prop(heff);
  const double e0 = decomp.reference_energy;
  const double wd = decomp.drive_frequency;
  EvolutionResult res;
  res.times = times;
  res.degenerate_set = decomp.degenerate_set;
  res.r_w = rw;
  res.omega_d = wd;
  res.normalized = options.normalize;
  res.source = "perturbative";
  res.amplitudes = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(times.size()), sp.levels);

  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const double t = times[ti];
    const CMatrix u = prop.at(t);
    Eigen::VectorXcd state = Eigen::VectorXcd::Zero(sp.dimension());
    for (int i = 0; i <= rw; ++i) {
      state += w.orders[static_cast<std::size_t>(i)] * (u * right[static_cast<std::size_t>(i)]);
    }
    for (int p = -sp.p_max; p <= sp.p_max; ++p) {
      const cplx phase = std::exp(cplx(0.0, -(e0 + p * wd) * t));
      for (int l = 0; l < sp.levels; ++l) {
        res.amplitudes(static_cast<Eigen::Index>(ti), l) += phase * state(sp.index(l, p));
      }
    }
  }
  if (options.normalize) normalize_rows(res.amplitudes);

  // Reconstruction of the initial state at t = 0.
  Eigen::VectorXcd c0 = Eigen::VectorXcd::Zero(sp.levels);
  {
    Eigen::VectorXcd state = Eigen::VectorXcd::Zero(sp.dimension());
    for (int i = 0; i <= rw; ++i) state += w.orders[static_cast<std::size_t>(i)] * right[static_cast<std::size_t>(i)];
    for (int p = -sp.p_max; p <= sp.p_max; ++p) {
      for (int l = 0; l < sp.levels; ++l) c0(l) += state(sp.index(l, p));
    }
    if (options.normalize && c0.norm() > 0.0) c0 /= c0.norm();
  }
  res.initial_mismatch = (c0 - initial).norm();
  return res;
}

EvolutionResult first_order_amplitudes(const DrivenSystem& system,
                                       const ResonantDecomposition& decomp, const CMatrix& heff,
                                       const CVector& initial, const std::vector<double>& times,
                                       bool normalize) {
  check_initial(decomp, initial, 1e-6);
  const auto& D = decomp.degenerate_set;
  const int n = decomp.levels();
  const double wd = decomp.drive_frequency;
  const double e0 = decomp.reference_energy;
  const auto& et = decomp.shifted_energies;
  const auto& np = decomp.photon_numbers;
  std::map<int, CMatrix> v = system.harmonics();
  v[0] = decomp.static_perturbation;
  const EffPropagator prop(heff);

  EvolutionResult res;
  res.times = times;
  res.degenerate_set = D;
  res.r_w = 1;
  res.omega_d = wd;
  res.normalized = normalize;
  res.source = "first-order closed form";
  res.amplitudes = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(times.size()), n);

  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const double t = times[ti];
    const CMatrix u = prop.at(t);
    // b_{k'} = sum_k U_{k'k} c_k(0);  g_{k'} = sum_k sum_p V_{p,k'k} c_k(0) / (E~_k' - p w - E~_k)
    Eigen::VectorXcd b(static_cast<Eigen::Index>(D.size())), g(static_cast<Eigen::Index>(D.size()));
    for (std::size_t a = 0; a < D.size(); ++a) {
      b(static_cast<Eigen::Index>(a)) = 0.0;
      g(static_cast<Eigen::Index>(a)) = 0.0;
      for (std::size_t c = 0; c < D.size(); ++c) {
        b(static_cast<Eigen::Index>(a)) += u(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) * initial(D[c]);
      }
      const int kp = D[a];
      for (int k : D) {
        for (const auto& [p, m] : v) {
          if (p == np[static_cast<std::size_t>(kp)] - np[static_cast<std::size_t>(k)]) continue;
          g(static_cast<Eigen::Index>(a)) +=
              m(kp, k) * initial(k) / (et[static_cast<std::size_t>(kp)] - p * wd - et[static_cast<std::size_t>(k)]);
        }
      }
    }
    const Eigen::VectorXcd ug = u * g;
    for (int l = 0; l < n; ++l) {
      cplx c = 0.0;
      const int il = decomp.index_in_degenerate_set(l);
      if (il >= 0) {
        const cplx ph = std::exp(cplx(0.0, -(e0 + np[static_cast<std::size_t>(l)] * wd) * t));
        c += ph * (b(il) + ug(il));
      }
      for (std::size_t a = 0; a < D.size(); ++a) {
        const int kp = D[a];
        for (const auto& [p, m] : v) {
          if (il >= 0 && p == np[static_cast<std::size_t>(l)] - np[static_cast<std::size_t>(kp)]) continue;
          const cplx x = m(l, kp);
          if (x == cplx(0.0)) continue;
          const cplx ph = std::exp(cplx(0.0, -(e0 + (p + np[static_cast<std::size_t>(kp)]) * wd) * t));
          c += ph * x * b(static_cast<Eigen::Index>(a)) /
               (et[static_cast<std::size_t>(kp)] + p * wd - et[static_cast<std::size_t>(l)]);
        }
      }
      res.amplitudes(static_cast<Eigen::Index>(ti), l) = c;
    }
  }
  if (normalize) normalize_rows(res.amplitudes);
  return res;
}

TransferPeak max_transfer(const EvolutionResult& result, int target) {
  if (result.times.empty()) throw ValidationError("empty evolution");
  if (target < 0 || target >= result.levels()) throw ValidationError("transfer target out of range");
  TransferPeak pk;
  const auto n = result.times.size();
  std::size_t best = 0;
  double bestv = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::norm(result.amplitudes(static_cast<Eigen::Index>(i), target));
    if (v > bestv) {
      bestv = v;
      best = i;
    }
  }
  pk.sample = best;
  pk.t_op = result.times[best];
  pk.population = bestv;
  pk.boundary = best == 0 || best + 1 == n;
  if (pk.boundary) return pk;
  const double t0 = result.times[best - 1], t1 = result.times[best], t2 = result.times[best + 1];
  const double y0 = std::norm(result.amplitudes(static_cast<Eigen::Index>(best - 1), target));
  const double y2 = std::norm(result.amplitudes(static_cast<Eigen::Index>(best + 1), target));
  const double h1 = t1 - t0, h2 = t2 - t1;
  // Vertex of the parabola through the three samples.
  const double d1 = (bestv - y0) / h1, d2 = (y2 - bestv) / h2;
  const double curv = (d2 - d1) / (0.5 * (h1 + h2));
  if (curv < 0.0) {
    const double slope_mid = d1 + curv * 0.5 * h1;  // derivative at t1
    const double dt = -slope_mid / curv;
    if (std::abs(dt) <= std::max(h1, h2)) {
      pk.t_op = t1 + dt;
      pk.population = bestv + slope_mid * dt + 0.5 * curv * dt * dt;
    }
  }
  return pk;
}

}  // namespace floquet
