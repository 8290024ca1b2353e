#include "floquet/error.hpp"
#include "floquet/model.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>
#include <vector>

namespace floquet {

namespace {

struct Diagonalized {
  Eigen::VectorXd energies;  // all retained, unshifted
  RMatrix op;                // drive operator in the retained eigenbasis
};

// Fixes eigenvector signs so that <k|op|k+1> > 0, then zeros the entries
// with |i - k| even, which must vanish by parity.
void fix_phases(RMatrix& op, const std::string& what) {
  const auto n = op.rows();
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (op(k, k + 1) < 0.0) {
      op.row(k + 1) *= -1.0;
      op.col(k + 1) *= -1.0;
    }
  }
  const double scale = op.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if ((i - k) % 2 != 0) continue;
      if (std::abs(op(i, k)) > 1e-8 * scale) {
        std::ostringstream os;
        os << what << ": parity selection rule violated at (" << i << "," << k
           << "), |element| = " << std::abs(op(i, k));
        throw NumericalError(os.str());
      }
      op(i, k) = 0.0;
    }
  }
}

// With `by_fock_overlap`, level n is the eigenvector with the largest weight
// on basis state |n>; otherwise the lowest eigenvalues are kept. The former
// is needed when the truncated Hamiltonian is unbounded below (negative
// quartic), where spurious high-Fock states sink beneath the physical ones.
Diagonalized diagonalize(const RMatrix& h, const RMatrix& op, int keep, const std::string& what,
                         bool by_fock_overlap = false) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(h);
  if (es.info() != Eigen::Success) throw NumericalError(what + ": eigensolver failed");
  RMatrix v(h.rows(), keep);
  Diagonalized d;
  d.energies.resize(keep);
  std::vector<bool> used(static_cast<std::size_t>(h.rows()), false);
  for (int n = 0; n < keep; ++n) {
    Eigen::Index j = n;
    if (by_fock_overlap) {
      es.eigenvectors().row(n).cwiseAbs().maxCoeff(&j);
      if (used[static_cast<std::size_t>(j)] || es.eigenvectors().col(j).cwiseAbs()(n) < 0.5) {
        throw NumericalError(what + ": cannot identify level " + std::to_string(n) +
                             " by Fock-state overlap");
      }
    }
    used[static_cast<std::size_t>(j)] = true;
    v.col(n) = es.eigenvectors().col(j);
    d.energies(n) = es.eigenvalues()(j);
    if (n > 0 && d.energies(n) <= d.energies(n - 1)) {
      throw NumericalError(what + ": retained levels are not ordered in energy");
    }
  }
  d.op = v.transpose() * op * v;
  d.op = 0.5 * (d.op + d.op.transpose()).eval();
  fix_phases(d.op, what);
  return d;
}

void check_convergence(const Diagonalized& a, const Diagonalized& b, double scale, int basis,
                       const std::string& what, double tolerance) {
  for (Eigen::Index k = 0; k < a.energies.size(); ++k) {
    const double rel =
        std::abs(a.energies(k) - b.energies(k)) / std::max(std::abs(b.energies(k)), scale);
    if (rel > tolerance) {
      std::ostringstream os;
      os << what << ": level " << k << " not converged at basis size " << basis
         << " (relative change " << rel << " under doubling); increase the basis size";
      throw ConvergenceError(os.str());
    }
  }
}

// <m|D(beta)|n> for the displacement operator, built column by column from
// D_{m,0} = e^{-|beta|^2/2} beta^m / sqrt(m!) and
// sqrt(n+1) D_{m,n+1} = sqrt(m) D_{m-1,n} - conj(beta) D_{m,n}.
Eigen::MatrixXcd displacement(int n, cplx beta) {
  Eigen::MatrixXcd d(n, n);
  d(0, 0) = std::exp(-0.5 * std::norm(beta));
  for (int m = 1; m < n; ++m) d(m, 0) = beta * d(m - 1, 0) / std::sqrt(double(m));
  for (int c = 0; c + 1 < n; ++c) {
    const double norm = std::sqrt(double(c + 1));
    for (int m = 0; m < n; ++m) {
      cplx v = -std::conj(beta) * d(m, c);
      if (m > 0) v += std::sqrt(double(m)) * d(m - 1, c);
      d(m, c + 1) = v / norm;
    }
  }
  return d;
}

RMatrix position(int n) {
  RMatrix x = RMatrix::Zero(n, n);
  for (int m = 0; m + 1 < n; ++m) x(m, m + 1) = x(m + 1, m) = std::sqrt(double(m + 1));
  return x;
}

// Fluxonium in GHz (E/h): returns the lowest `keep` levels and phi.
Diagonalized fluxonium_levels(const FluxoniumSpec& s, int basis) {
  const double osc = std::sqrt(8.0 * s.el_ghz * s.ec_ghz);
  const double phi0 = std::pow(8.0 * s.ec_ghz / s.el_ghz, 0.25) / std::sqrt(2.0);
  const RMatrix phi = phi0 * position(basis);
  const Eigen::MatrixXcd d = displacement(basis, cplx(0.0, phi0));
  const RMatrix cos_phi = 0.5 * (d + d.adjoint()).real();
  RMatrix h = s.ej_ghz * cos_phi;
  for (int m = 0; m < basis; ++m) h(m, m) += osc * (m + 0.5);
  return diagonalize(h, phi, s.level_cut, "fluxonium");
}

// Transmon in rad/ns; x = a + a^dag. x^4 is formed in a padded basis so the
// truncated block is exact.
Diagonalized transmon_levels(const TransmonSpec& s, int basis) {
  const RMatrix xp = position(basis + 4);
  const RMatrix x2 = xp * xp;
  const RMatrix x4 = (x2 * x2).topLeftCorner(basis, basis);
  RMatrix h = (s.alpha / 12.0) * x4;
  for (int m = 0; m < basis; ++m) h(m, m) += (s.omega_q - s.alpha) * m;
  return diagonalize(h, position(basis), s.level_cut, "transmon", true);
}

std::vector<double> shifted(const Eigen::VectorXd& e) {
  std::vector<double> out(static_cast<std::size_t>(e.size()));
  for (Eigen::Index k = 0; k < e.size(); ++k) out[static_cast<std::size_t>(k)] = e(k) - e(0);
  return out;
}

}  // namespace

void FluxoniumSpec::validate() const {
  if (!(ec_ghz > 0.0) || !(el_ghz > 0.0)) throw ValidationError("fluxonium needs E_C, E_L > 0");
  if (!std::isfinite(ej_ghz) || !std::isfinite(amplitude)) {
    throw ValidationError("fluxonium parameters must be finite");
  }
  if (level_cut < 2) throw ValidationError("fluxonium level cut must be >= 2");
  if (basis_size < 4 * level_cut) throw ValidationError("fluxonium needs basis_size >= 4*level_cut");
}

FluxoniumCircuit::FluxoniumCircuit(const FluxoniumSpec& spec) : spec_(spec) {
  spec_.validate();
  const Diagonalized a = fluxonium_levels(spec_, spec_.basis_size);
  const Diagonalized b = fluxonium_levels(spec_, 2 * spec_.basis_size);
  check_convergence(a, b, std::sqrt(8.0 * spec_.el_ghz * spec_.ec_ghz), spec_.basis_size,
                    "fluxonium", 1e-10);
  energies_ = shifted(kTwoPi * a.energies);
  phi_ = a.op;
}

double FluxoniumCircuit::coupling_coefficient(int i, int k) const {
  return 0.5 * spec_.el_ghz * phi_(i, k);
}

DrivenSystem FluxoniumCircuit::system(double omega_d, double amplitude) const {
  const CMatrix v = (-0.5 * amplitude * kTwoPi * spec_.el_ghz * phi_).cast<cplx>();
  DrivenSystem s(energies_, {{1, v}, {-1, v}}, omega_d);
  s.notes["units"] = "rad/ns";
  s.notes["phase_convention"] = "eigenvector signs chosen so that <k|phi|k+1> > 0";
  return s;
}

DrivenSystem fluxonium(const FluxoniumSpec& spec, double omega_d) {
  return FluxoniumCircuit(spec).system(omega_d);
}

void TransmonSpec::validate() const {
  if (!(omega_q > 0.0) || !std::isfinite(alpha)) {
    throw ValidationError("transmon needs omega_q > 0 and finite alpha");
  }
  if (level_cut < 4) throw ValidationError("transmon level cut must be >= 4");
  if (basis_size < 4 * level_cut) throw ValidationError("transmon needs basis_size >= 4*level_cut");
}

TransmonCircuit::TransmonCircuit(const TransmonSpec& spec) : spec_(spec) {
  spec_.validate();
  const Diagonalized a = transmon_levels(spec_, spec_.basis_size);
  const Diagonalized b = transmon_levels(spec_, 2 * spec_.basis_size);
  // alpha/12 (a + a^dag)^4 with alpha < 0 is unbounded below, so the
  // spectrum has no basis limit; the basis is a model parameter and the
  // doubling change is reported instead of enforced.
  double change = 0.0;
  for (Eigen::Index k = 0; k < a.energies.size(); ++k) {
    change = std::max(change, std::abs((a.energies(k) - a.energies(0)) - (b.energies(k) - b.energies(0))));
  }
  basis_sensitivity_ = change;
  energies_ = shifted(a.energies);
  x_ = a.op;
}

double TransmonCircuit::alpha_dressed() const {
  return (energies_[2] - energies_[1]) - (energies_[1] - energies_[0]);
}

DrivenSystem TransmonCircuit::system(double omega_d, double amplitude) const {
  const CMatrix v = (0.5 * amplitude * x_).cast<cplx>();
  DrivenSystem s(energies_, {{1, v}, {-1, v}}, omega_d);
  s.notes["units"] = "rad/ns";
  s.notes["phase_convention"] = "eigenvector signs chosen so that <k|a+a^dag|k+1> > 0";
  s.notes["basis_sensitivity"] = std::to_string(basis_sensitivity_);
  return s;
}

DrivenSystem transmon(double omega_q, double alpha, double amplitude, double omega_d,
                      int level_cut) {
  TransmonSpec spec;
  spec.omega_q = omega_q;
  spec.alpha = alpha;
  spec.level_cut = level_cut;
  spec.basis_size = std::max(60, 8 * level_cut);
  return TransmonCircuit(spec).system(omega_d, amplitude);
}

RwaPrediction transmon_rwa_reference(double omega_q, double alpha, double amplitude,
                                     double omega_d) {
  const double w = omega_q - alpha;
  const double den = omega_d * omega_d - w * w;
  if (std::abs(den) <= 1e-12 * w * w) {
    throw NumericalError("RWA reference diverges: omega_d^2 = (omega_q - alpha)^2");
  }
  const double eta = w * amplitude / den;
  return {2.0 * alpha * eta * eta, alpha * eta * eta * eta / 3.0};
}

}  // namespace floquet
