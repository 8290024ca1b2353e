#include "floquet/error.hpp"
#include "floquet/model.hpp"
#include "floquet/model_io.hpp"

#include <doctest.h>

#include <cmath>

using namespace floquet;

TEST_CASE("harmonics come in Hermitian pairs") {
  const DrivenSystem s = xz_model(1.0, 0.1, 0.05, 0.45);
  REQUIRE(s.has_harmonic(1));
  REQUIRE(s.has_harmonic(-1));
  CHECK((s.harmonic(-1) - s.harmonic(1).adjoint()).norm() == doctest::Approx(0.0));
  CHECK(s.max_harmonic() == 1);
  CHECK(s.monochromatic());
  CHECK(s.harmonic(3).norm() == 0.0);
  // Vbar_1 = Oz sz + Ox sx in the energy basis (E_0 = 0 is the sz = -1 state)
  CHECK(s.harmonic(1)(0, 1).real() == doctest::Approx(0.1));
  CHECK(std::abs(s.harmonic(1)(0, 0).real()) == doctest::Approx(0.05));
}

TEST_CASE("decomposition of subharmonic drives") {
  SUBCASE("XZ at half frequency is a two-photon resonance") {
    const auto d = decompose(xz_model(1.0, 0.01, 0.0, 0.5));
    CHECK(d.photon_numbers == std::vector<int>{0, 2});
    CHECK(d.degenerate_set == std::vector<int>{0, 1});
  }
  SUBCASE("slightly detuned Rabi model keeps eps_1 = w01 - 3 w_d") {
    const double w = 0.3335;
    const auto d = decompose(rabi_model(1.0, 0.01, w), 1e-6, std::vector<int>{0, 1});
    CHECK(d.photon_numbers[1] == 3);
    CHECK(d.detunings[1] == doctest::Approx(1.0 - 3.0 * w).epsilon(1e-14));
    CHECK(d.static_perturbation(1, 1).real() == doctest::Approx(1.0 - 3.0 * w));
  }
  SUBCASE("pinned photon numbers let eps leave the fundamental interval") {
    const auto d = decompose(rabi_model(1.0, 0.01, 0.2), 1e-6, std::vector<int>{0, 1}, {{1, 3}});
    CHECK(d.photon_numbers[1] == 3);
    CHECK(d.detunings[1] == doctest::Approx(0.4));
  }
  SUBCASE("automatic D collects exact resonances only") {
    const auto d = decompose(rabi_model(1.0, 0.01, 0.31));
    CHECK(d.degenerate_set == std::vector<int>{0});
  }
}

TEST_CASE("scaled and shifted copies") {
  const DrivenSystem s = rabi_model(1.0, 0.1, 0.3);
  CHECK(s.with_drive_scaled(2.0).harmonic(1)(0, 1).real() == doctest::Approx(0.2));
  CHECK(s.with_drive_frequency(0.4).drive_frequency() == 0.4);
  CHECK(s.with_energy_offset(0.5).energy(1) == doctest::Approx(1.5));
}

TEST_CASE("fluxonium spectrum and drive matrix elements") {
  const FluxoniumCircuit c(FluxoniumSpec{});
  const auto& e = c.energies();
  CHECK((e[1] - e[0]) / kTwoPi == doctest::Approx(1.33).epsilon(0.01));
  CHECK((e[2] - e[1]) / kTwoPi == doctest::Approx(2.15).epsilon(0.01));
  CHECK(kTwoPi * c.coupling_coefficient(0, 1) == doctest::Approx(4.72).epsilon(0.02));
  CHECK(kTwoPi * c.coupling_coefficient(1, 2) == doctest::Approx(5.28).epsilon(0.02));
  // odd parity: phi couples only levels of opposite parity
  CHECK(std::abs(c.phase_matrix()(0, 2)) < 1e-10);
  CHECK(c.phase_matrix()(0, 1) > 0.0);
}

TEST_CASE("fluxonium basis convergence") {
  FluxoniumSpec big;
  big.basis_size = 200;
  const FluxoniumCircuit a(FluxoniumSpec{}), b(big);
  for (int k = 0; k < 5; ++k) CHECK(a.energies()[k] == doctest::Approx(b.energies()[k]).epsilon(1e-10));
}

TEST_CASE("transmon low levels are stable under basis doubling") {
  TransmonSpec s60, s120;
  s120.basis_size = 120;
  const TransmonCircuit a(s60), b(s120);
  CHECK(a.omega_q_dressed() == doctest::Approx(b.omega_q_dressed()).epsilon(1e-5));
  CHECK(a.alpha_dressed() < 0.0);
  CHECK(a.basis_sensitivity() >= 0.0);
  // the quartic term lowers the gap below w_q
  CHECK(a.omega_q_dressed() < s60.omega_q);
}

TEST_CASE("transmon RWA closed forms") {
  const double wq = kTwoPi * 3.96, alpha = kTwoPi * -0.208, a = kTwoPi * 1.0, w = 8.1;
  const RwaPrediction p = transmon_rwa_reference(wq, alpha, a, w);
  const double w0 = wq - alpha, den = w * w - w0 * w0;
  CHECK(p.detuning_shift == doctest::Approx(2.0 * alpha * w0 * w0 * a * a / (den * den)));
  CHECK(p.coupling == doctest::Approx(alpha * w0 * w0 * w0 * a * a * a / (3.0 * den * den * den)));
}

TEST_CASE("model files") {
  using nlohmann::json;
  const ModelFile m = parse_model(json{{"type", "xz"},
                                       {"parameters", {{"omega01", 1.0}, {"omega_x", 0.01}, {"omega_z", 0.02}}},
                                       {"drive_frequency", 0.5},
                                       {"degenerate_set", {0, 1}}});
  CHECK(m.system().dimension() == 2);
  CHECK(m.amplitude() == doctest::Approx(0.01));
  CHECK(m.degenerate_set->size() == 2);

  const ModelFile g = parse_model(json{{"type", "rabi"},
                                       {"units", "GHz"},
                                       {"parameters", {{"omega01", 1.0}, {"omega_x", 0.1}}},
                                       {"drive_frequency", 0.3}});
  CHECK(g.system().energy(1) == doctest::Approx(kTwoPi));
  CHECK(g.amplitude() == doctest::Approx(kTwoPi * 0.1));
  CHECK(g.amplitude_scale() == doctest::Approx(kTwoPi));

  CHECK_THROWS_AS(parse_model(json{{"type", "xz"}, {"parameters", {{"omega01", 1.0}, {"omega_y", 1.0}}}}),
                  ValidationError);
  CHECK_THROWS_AS(parse_model(json{{"type", "xz"}, {"extra", 1}}), ValidationError);
  CHECK_THROWS_AS(parse_model(json{{"type", "qutrit"}}), ValidationError);
  CHECK_THROWS_AS(parse_model(json{{"type", "fluxonium"}, {"parameters", {{"basis_size", -3}}}}),
                  ValidationError);

  const ModelFile c = parse_model(json::parse(R"({
    "type": "custom",
    "parameters": {
      "energies": [0.0, 1.0, 2.5],
      "harmonics": [{"p": 1, "re": [[0, 0.1, 0], [0.1, 0, 0.2], [0, 0.2, 0]]}]
    },
    "drive_frequency": 0.5
  })"));
  const DrivenSystem cs = c.system();
  CHECK(cs.dimension() == 3);
  CHECK(cs.harmonic(-1)(1, 0).real() == doctest::Approx(0.1));
  CHECK(c.canonical == parse_model(json::parse(c.canonical)).canonical);
}
