#include "floquet/oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace floquet;

TEST_CASE("CF4 integrator is unitary and fourth order") {
  const DrivenSystem s = xz_model(1.0, 0.3, 0.2, 0.7);
  const auto h = periodic_hamiltonian(s);
  const double t1 = 2.0 * M_PI / 0.7;
  const CMatrix ref = cf4_propagator(h, 0.0, t1, 4096);
  const CMatrix u1 = cf4_propagator(h, 0.0, t1, 32);
  const CMatrix u2 = cf4_propagator(h, 0.0, t1, 64);
  CHECK((u1.adjoint() * u1 - CMatrix::Identity(2, 2)).norm() < 1e-13);
  const double ratio = (u1 - ref).norm() / (u2 - ref).norm();
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("static Hamiltonian is integrated exactly") {
  const DrivenSystem s({0.0, 1.3, 2.1}, {}, 0.9);
  const CVector psi0 = CVector::Constant(3, 1.0 / std::sqrt(3.0));
  const EvolutionResult r = integrate_fixed(s, psi0, {0.0, 3.3, 17.0}, 8);
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(r.amplitudes(2, k) - psi0(k) * std::exp(cplx(0.0, -s.energy(k) * 17.0))) < 1e-13);
  }
}

TEST_CASE("exact evolution follows the effective model at weak drive") {
  const double ox = 0.02, oz = 0.04;
  const auto family = [=](double w) { return xz_model(1.0, ox, oz, w); };
  const auto error = [&](int r_h, int r_w) {
    ResonanceOptions o;
    o.r_h = r_h;
    o.photon_number = 2;
    const DrivenSystem s = family(resonance_frequency(family, o).omega_d);
    const auto d = decompose(s, kDefaultMembershipThreshold, std::vector<int>{0, 1}, {{1, 2}});
    const Expansion ex = expand(s, d, r_h, r_w);
    const auto times = time_grid(600.0, s.drive_frequency(), 32);
    const EvolutionResult dpt = amplitudes(d, ex.heff.cumulative(), ex.w, basis_state(2, 0), times);
    const EvolutionResult num = integrate(s, basis_state(2, 0), times);
    for (Eigen::Index i = 0; i < num.amplitudes.rows(); ++i) {
      CHECK(num.amplitudes.row(i).norm() == doctest::Approx(1.0).epsilon(1e-9));
    }
    return (dpt.populations() - num.populations()).cwiseAbs().maxCoeff();
  };
  const double e2 = error(2, 1), e4 = error(4, 2), e6 = error(6, 4);
  MESSAGE("population error (2,1) " << e2 << "  (4,2) " << e4 << "  (6,4) " << e6);
  CHECK(e4 < e2);
  CHECK(e6 < e4);
  CHECK(e6 < 1e-4);
}

TEST_CASE("quasi-energy Stark shift extrapolates to the second-order value") {
  // sx drive only: no two-photon coupling, so level 0 carries delta_0 alone
  const double w = 0.5;
  const auto shift = [w](double ox) {
    const QuasiEnergies q = quasi_energies(xz_model(1.0, ox, 0.0, w));
    REQUIRE_FALSE(q.ambiguous);
    return fold_quasi_energy(q.values[static_cast<std::size_t>(q.labels[0])], w) / (ox * ox);
  };
  const double h = 0.004;
  const double richardson = (4.0 * shift(h) - shift(2.0 * h)) / 3.0;
  CHECK(richardson == doctest::Approx(-4.0 / (3.0 * w)).epsilon(1e-6));
}

TEST_CASE("fold_quasi_energy") {
  CHECK(fold_quasi_energy(0.7, 1.0) == doctest::Approx(-0.3));
  CHECK(fold_quasi_energy(-0.2, 1.0) == doctest::Approx(-0.2));
  CHECK(fold_quasi_energy(2.4, 1.0, 2.0) == doctest::Approx(2.4));
}

TEST_CASE("transfer optimum of a two-photon resonance") {
  const double ox = 0.02, oz = 0.04;
  const auto family = [=](double w) { return xz_model(1.0, ox, oz, w); };
  ResonanceOptions o;
  o.r_h = 4;
  o.photon_number = 2;
  const double w_dpt = resonance_frequency(family, o).omega_d;
  const DrivenSystem s = family(w_dpt);
  const auto d = decompose(s, kDefaultMembershipThreshold, std::vector<int>{0, 1}, {{1, 2}});
  const RabiData rd = rabi_frequency(effective_hamiltonian(s, d, 4));
  TransferOptions t;
  t.grid_points = 9;
  t.samples_per_period = 16;
  const double half = 2.0 * rd.rabi;
  const TransferOptimum opt = optimize_transfer(family, {w_dpt - half, w_dpt + half}, 2.0 * rd.t_pi, t);
  CHECK_FALSE(opt.flagged);
  CHECK(opt.fidelity > 0.999);
  CHECK(opt.fidelity <= 1.0);
  CHECK(std::abs(opt.omega_d - w_dpt) < 0.05 * rd.rabi);
  CHECK(opt.t_op == doctest::Approx(rd.t_pi).epsilon(0.02));
}
