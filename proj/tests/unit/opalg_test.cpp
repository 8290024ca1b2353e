#include "floquet/opalg.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>

using namespace floquet::opalg;

namespace {

Rational q(int n, int d = 1) { return Rational(n) / d; }

StringSum from(std::initializer_list<std::pair<Exponents, Rational>> terms) {
  StringSum s;
  for (const auto& [e, c] : terms) s.add(e, c);
  return s;
}

}  // namespace

TEST_CASE("wave operator recurrence") {
  CHECK(build_L(0) == StringSum::projector());
  CHECK(build_L(1) == from({{{1, 0}, q(1)}}));
  // L_2 = R V R V P - R^2 V P V P
  CHECK(build_L(2) == from({{{1, 1, 0}, q(1)}, {{2, 0, 0}, q(-1)}}));
}

TEST_CASE("normalization powers") {
  const NPowers n1 = build_N_powers(1);
  CHECK(n1.n.empty());
  CHECK(n1.sqrt.empty());
  CHECK(n1.inv_sqrt.empty());
  const NPowers n2 = build_N_powers(2);
  CHECK(n2.n == from({{{0, 2, 0}, q(1)}}));
  CHECK(n2.sqrt == from({{{0, 2, 0}, q(1, 2)}}));
  CHECK(n2.inv_sqrt == from({{{0, 2, 0}, q(-1, 2)}}));
}

TEST_CASE("composition merges boundary exponents") {
  // (P V R) o (R V P) = P V R^2 V P
  const StringSum a = from({{{0, 1}, q(1)}});
  const StringSum b = from({{{1, 0}, q(1)}});
  CHECK(compose(a, b) == from({{{0, 2, 0}, q(1)}}));
  // P R = 0
  CHECK(compose(StringSum::projector(), StringSum::resolvent()).empty());
  CHECK(adjoint(from({{{2, 1, 0}, q(3)}})) == from({{{0, 1, 2}, q(3)}}));
}

TEST_CASE("effective Hamiltonian tables") {
  CHECK(heff_table(1).entries.size() == 1);
  CHECK(heff_table(2).entries == std::map<Exponents, Rational>{{{1}, q(1)}});
  CHECK(heff_table(3).entries ==
        std::map<Exponents, Rational>{{{0, 2}, q(-1, 2)}, {{1, 1}, q(1)}, {{2, 0}, q(-1, 2)}});
  const CoefficientTable& t5 = heff_table(5);
  CHECK(t5.entries.size() == 28);
  CHECK(t5.coefficient({2, 0, 0, 2}) == q(1, 4));
  CHECK(t5.coefficient({0, 2, 0, 2}) == q(3, 8));
  CHECK(t5.coefficient({0, 0, 0, 0}) == 0);
}

TEST_CASE("transformation tables") {
  CHECK(w_table(1).entries == std::map<Exponents, Rational>{{{1}, q(1)}});
  CHECK(w_table(2).entries ==
        std::map<Exponents, Rational>{{{0, 2}, q(-1, 2)}, {{1, 1}, q(1)}, {{2, 0}, q(-1)}});
  CHECK(w_table(4).coefficient({4, 0, 0, 0}) == q(-1));
  CHECK(w_table(4).entries.size() == 35);
}

TEST_CASE("property: tuple shape") {
  for (int r = 2; r <= 7; ++r) {
    for (const auto& [e, c] : heff_table(r).entries) {
      CHECK(static_cast<int>(e.size()) == r - 1);
      int sum = 0;
      for (int m : e) sum += m;
      CHECK(sum == r - 1);
      CHECK(c != 0);
    }
  }
  for (int r = 1; r <= 5; ++r) {
    for (const auto& [e, c] : w_table(r).entries) {
      CHECK(static_cast<int>(e.size()) == r);
      int sum = 0;
      for (int m : e) sum += m;
      CHECK(sum == r);
    }
  }
}

TEST_CASE("property: Hermiticity of H_eff is tuple reversal") {
  for (int r = 1; r <= 8; ++r) CHECK(adjoint(build_heff(r)) == build_heff(r));
}

TEST_CASE("property: W is an isometry order by order") {
  for (int r = 0; r <= 6; ++r) {
    StringSum total;
    for (int k = 0; k <= r; ++k) total += compose(adjoint(build_W(k)), build_W(r - k));
    if (r == 0) {
      CHECK(total == StringSum::projector());
    } else {
      CHECK(total.empty());
    }
  }
}

TEST_CASE("serialization round trip") {
  for (int r = 1; r <= 5; ++r) {
    const CoefficientTable& t = heff_table(r);
    const CoefficientTable back = deserialize(serialize(t));
    CHECK(back.kind == t.kind);
    CHECK(back.order == t.order);
    CHECK(back.entries == t.entries);
  }
  CHECK_THROWS(deserialize("garbage"));
  CHECK(table_kind_from_string(to_string(TableKind::W)) == TableKind::W);
  CHECK_THROWS(table_kind_from_string("x"));
}

TEST_CASE("disk cache agrees with a fresh computation") {
  const auto dir = std::filesystem::temp_directory_path() / "floquet_dpt_cache_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  setenv("FLOQUET_DPT_CACHE_DIR", dir.c_str(), 1);
  CHECK(cache_directory() == dir.string());
  CHECK(compute_w_table(3).entries == w_table(3).entries);
  unsetenv("FLOQUET_DPT_CACHE_DIR");
  std::filesystem::remove_all(dir);
}
