#include "floquet/error.hpp"
#include "floquet/sambe.hpp"

#include <doctest.h>

using namespace floquet;

TEST_CASE("index layout is p-major") {
  SambeSpace s{3, 2, 0.0};
  CHECK(s.dimension() == 15);
  for (int p = -2; p <= 2; ++p) {
    for (int k = 0; k < 3; ++k) {
      const int i = s.index(k, p);
      CHECK(s.level_of(i) == k);
      CHECK(s.sector_of(i) == p);
    }
  }
  CHECK(s.index(0, -2) == 0);
  CHECK(s.index(0, -1) == 3);
}

TEST_CASE("truncation bound") {
  const DrivenSystem s = rabi_model(1.0, 0.05, 0.334);
  const auto d = decompose(s, 1e-6, std::vector<int>{0, 1}, {{1, 3}});
  const SambeSpace sp = build_space(d, 1, 7);
  CHECK(sp.p_max >= 10);
  CHECK(sp.p_max == 7 + 3 + 1);
  CHECK(build_space(d, 1, 7, 2).p_max == sp.p_max + 2);
}

TEST_CASE("operators on the Rabi model") {
  const double w = 0.334;
  const DrivenSystem s = rabi_model(1.0, 0.05, w);
  const auto d = decompose(s, 1e-6, std::vector<int>{0, 1}, {{1, 3}});
  const SambeOperators ops = build_operators(s, d, build_space(d, 1, 3));
  const SambeSpace& sp = ops.space;
  CHECK(ops.p_support == std::vector<int>{sp.index(0, 0), sp.index(1, 3)});
  // R on |0, p>> is 1 / (p w_d), on |1, p>> it is 1 / ((p - 3) w_d)
  CHECK(ops.resolvent(sp.index(0, 1)).real() == doctest::Approx(1.0 / w));
  CHECK(ops.resolvent(sp.index(0, -1)).real() == doctest::Approx(-1.0 / w));
  CHECK(ops.resolvent(sp.index(1, 1)).real() == doctest::Approx(1.0 / (-2.0 * w)));
  CHECK(ops.resolvent(sp.index(1, 3)) == cplx(0.0));
  // H0 is diagonal with E~_k - p w_d, and V is Hermitian
  CHECK((ops.v - SparseMatrix(ops.v.adjoint())).norm() == doctest::Approx(0.0));
  CHECK(ops.v_drive.nonZeros() > 0);
  CHECK(ops.projector_columns().cols() == 2);
  CHECK(SparseMatrix(ops.resolvent_power(0)).nonZeros() == 2);
}

TEST_CASE("near resonances are reported or rejected") {
  // level 1 sits exactly two photons above level 0 while D = {0, 2}
  const DrivenSystem s({0.0, 1.0, 1.5}, {{1, CMatrix::Constant(3, 3, 0.1)}, {-1, CMatrix::Constant(3, 3, 0.1)}},
                       0.5);
  const auto d = decompose(s, 1e-6, std::vector<int>{0, 2});
  CHECK_THROWS_AS(build_operators(s, d, build_space(d, 1, 2)), NearResonanceError);
  SambeOptions o;
  o.allow_near_resonance = true;
  const SambeOperators ops = build_operators(s, d, build_space(d, 1, 2), o);
  REQUIRE(ops.near_resonances.size() == 1);
  CHECK(ops.near_resonances[0].level == 1);
  CHECK(ops.near_resonances[0].sector == 2);
  CHECK_FALSE(describe(ops.near_resonances[0]).empty());
}
