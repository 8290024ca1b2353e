#include "floquet/error.hpp"
#include "floquet/pulse.hpp"

#include <doctest.h>

#include <cmath>

using namespace floquet;

namespace {

SystemFamily fluxonium_family(double a_over_2pi) {
  const FluxoniumCircuit c(FluxoniumSpec{});
  return [c, a = kTwoPi * a_over_2pi](double w) { return c.system(w, a); };
}

}  // namespace

TEST_CASE("envelope shape") {
  Envelope e;
  e.sigma = 4.0;
  e.t0 = 18.0;
  e.duration = 100.0;
  CHECK(e(0.0) == doctest::Approx(std::exp(-18.0 * 18.0 / 32.0)));
  CHECK(e(18.0) == 1.0);
  CHECK(e(50.0) == 1.0);
  CHECK(e(82.0) == 1.0);
  CHECK(e(10.0) == doctest::Approx(e(90.0)));
  CHECK(e(100.0) == doctest::Approx(e(0.0)));
  CHECK(e.plateau() == doctest::Approx(64.0));
  e.duration = 30.0;
  CHECK_THROWS_AS(e.validate(), ValidationError);
}

TEST_CASE("H_eff is a polynomial in the drive scale") {
  const double w = 0.4433 * kTwoPi;
  const DrivenSystem s = fluxonium_family(0.02)(w);
  const auto d = decompose(s, kDefaultMembershipThreshold, std::vector<int>{0, 1}, {{1, 3}});
  const AmplitudePolynomial poly = heff_of_amplitude(s, d, 5);
  CHECK(poly.coefficients.size() <= 6);
  for (double x : {0.0, 0.4, 1.0, 1.7}) {
    const CMatrix direct = effective_hamiltonian(s.with_drive_scaled(x), d, 5).cumulative();
    CHECK((poly.at(x) - direct).norm() <= 1e-12 * std::max(direct.norm(), 1.0));
  }
}

TEST_CASE("scheme names") {
  CHECK(magnus_scheme_from_string(to_string(MagnusScheme::Bch)) == MagnusScheme::Bch);
  CHECK(magnus_scheme_from_string(to_string(MagnusScheme::Toggling)) == MagnusScheme::Toggling);
  CHECK_THROWS_AS(magnus_scheme_from_string("bch4"), ValidationError);
}

TEST_CASE("toggling-frame pulse inverts the population") {
  PulseOptions o;
  o.photon_number = 3;
  o.r_h = 5;
  const auto family = fluxonium_family(0.015);
  const PulseDesign p = solve_pulse(family, o);
  CHECK(p.residual < 1e-6);
  CHECK(std::abs(p.magnus.delta_m) < 1e-8);
  CHECK(p.magnus.omega_m * p.duration == doctest::Approx(M_PI / 2).epsilon(1e-6));
  CHECK(p.magnus.converges);
  CHECK(p.magnus.convergence_integral < kConvergenceBound);
  CHECK(p.magnus.nested_commutators == -1);
  const PulseEvaluation ev = evaluate_pulse(family(p.omega_d), p.magnus.envelope, 0, 1);
  CHECK(ev.fidelity > 0.99);
  CHECK(ev.leakage < 1e-2);
}

TEST_CASE("BCH scheme keeps the BCH terms") {
  const double w = 0.4433 * kTwoPi;
  const DrivenSystem s = fluxonium_family(0.01)(w);
  const auto d = decompose(s, kDefaultMembershipThreshold, std::vector<int>{0, 1}, {{1, 3}});
  Envelope e;
  e.duration = 400.0;
  const MagnusDesign m = magnus_design(heff_of_amplitude(s, d, 3), e, MagnusScheme::Bch);
  CHECK(m.scheme == MagnusScheme::Bch);
  CHECK(m.hm1.norm() > 0.0);
  CHECK(m.nested_commutators == 2);
  CHECK((m.h_m - m.h_m.adjoint()).norm() < 1e-12 * m.h_m.norm());
  CHECK((m.s1 + m.s1.adjoint()).norm() < 1e-14 + 1e-12 * m.s1.norm());
}

TEST_CASE("strong drive breaks the ramp convergence bound") {
  PulseOptions o;
  o.photon_number = 3;
  o.r_h = 5;
  const auto family = fluxonium_family(0.1);
  CHECK_THROWS_AS(solve_pulse(family, o), ConvergenceError);
  const DrivenSystem s = family(0.4433 * kTwoPi);
  const auto d = decompose(s, kDefaultMembershipThreshold, std::vector<int>{0, 1}, {{1, 3}});
  Envelope e;
  e.duration = 200.0;
  const MagnusDesign m = magnus_design(heff_of_amplitude(s, d, 5), e);
  CHECK_FALSE(m.converges);
  CHECK(m.convergence_integral >= kConvergenceBound);
}
