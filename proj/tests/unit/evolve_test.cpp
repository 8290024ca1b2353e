#include "floquet/error.hpp"
#include "floquet/evolve.hpp"

#include <doctest.h>

#include <cmath>

using namespace floquet;

namespace {

struct Setup {
  DrivenSystem system;
  ResonantDecomposition decomp;
};

Setup rabi_at_resonance(double ox) {
  const auto family = [ox](double w) { return rabi_model(1.0, ox, w); };
  ResonanceOptions o;
  o.r_h = 3;
  o.photon_number = 3;
  const double w = resonance_frequency(family, o).omega_d;
  const DrivenSystem s = family(w);
  return {s, decompose(s, kDefaultMembershipThreshold, std::vector<int>{0, 1}, {{1, 3}})};
}

}  // namespace

TEST_CASE("u_eff is unitary and solves the Schroedinger equation") {
  CMatrix h(2, 2);
  h << 0.3, cplx(0.1, -0.2), cplx(0.1, 0.2), -0.4;
  const CMatrix u = u_eff(h, 2.7);
  CHECK((u.adjoint() * u - CMatrix::Identity(2, 2)).norm() < 1e-14);
  const double dt = 1e-6;
  const CMatrix du = (u_eff(h, 2.7 + dt) - u_eff(h, 2.7 - dt)) / (2.0 * dt);
  CHECK((du - cplx(0.0, -1.0) * h * u).norm() < 1e-8);
}

TEST_CASE("zeroth-order W keeps the state inside D") {
  const Setup st = rabi_at_resonance(0.05);
  const Expansion ex = expand(st.system, st.decomp, 3, 0);
  const auto times = time_grid(400.0, st.system.drive_frequency(), 16);
  const EvolutionResult r = amplitudes(st.decomp, ex.heff.cumulative(), ex.w, basis_state(2, 0), times);
  for (double l : r.leakage()) CHECK(std::abs(l) < 1e-14);
  CHECK(r.initial_mismatch < 1e-14);
}

TEST_CASE("first-order closed form matches the Sambe evaluation") {
  const Setup st = rabi_at_resonance(0.05);
  const Expansion ex = expand(st.system, st.decomp, 3, 1);
  const CMatrix h = ex.heff.cumulative();
  const auto times = time_grid(300.0, st.system.drive_frequency(), 16);
  for (bool normalize : {false, true}) {
    EvolveOptions o;
    o.normalize = normalize;
    o.product = WProduct::Truncated;
    const EvolutionResult a = amplitudes(st.decomp, h, ex.w, basis_state(2, 0), times, o);
    const EvolutionResult b = first_order_amplitudes(st.system, st.decomp, h, basis_state(2, 0), times, normalize);
    CHECK((a.amplitudes - b.amplitudes).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("normalized amplitudes have unit norm") {
  const Setup st = rabi_at_resonance(0.08);
  const Expansion ex = expand(st.system, st.decomp, 5, 3);
  const auto times = time_grid(200.0, st.system.drive_frequency(), 16);
  const EvolutionResult r = amplitudes(st.decomp, ex.heff.cumulative(), ex.w, basis_state(2, 0), times);
  CHECK(r.normalized);
  for (Eigen::Index i = 0; i < r.amplitudes.rows(); ++i) CHECK(r.amplitudes.row(i).norm() == doctest::Approx(1.0));
}

TEST_CASE("initial state outside D is rejected") {
  const DrivenSystem s({0.0, 1.0, 2.3}, {{1, CMatrix::Constant(3, 3, 0.01)}, {-1, CMatrix::Constant(3, 3, 0.01)}}, 0.5);
  const auto d = decompose(s, kDefaultMembershipThreshold, std::vector<int>{0, 1}, {{1, 2}});
  const Expansion ex = expand(s, d, 2, 1);
  CHECK_THROWS_AS(amplitudes(d, ex.heff.cumulative(), ex.w, basis_state(3, 2), {0.0, 1.0}), ValidationError);
}

TEST_CASE("max_transfer refines the first maximum") {
  EvolutionResult r;
  const int n = 100;
  r.amplitudes.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    const double t = 0.037 * i;
    r.times.push_back(t);
    r.amplitudes(i, 0) = std::cos(t);
    r.amplitudes(i, 1) = std::sin(t);
  }
  const TransferPeak p = max_transfer(r, 1);
  CHECK(p.t_op == doctest::Approx(M_PI / 2).epsilon(1e-5));
  CHECK(p.population == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_FALSE(p.boundary);
  const TransferPeak q = max_transfer(r, 0);
  CHECK(q.boundary);
}
