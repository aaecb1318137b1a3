#include <catch2/catch_amalgamated.hpp>

#include "fockdl/fock.hpp"
#include "oracles.hpp"

using namespace fockdl;

TEST_CASE("basis states map occupation sets to masks and strings") {
  const BasisState s = basis_state({0, 2}, 3);
  CHECK(s.occupied(0));
  CHECK_FALSE(s.occupied(1));
  CHECK(s.occupied(2));
  CHECK(s.particle_count() == 2);
  CHECK(s.to_string() == "101");  // mode 0 is the leftmost character
  CHECK(BasisState::from_string("101") == s);

  CHECK(BasisState::vacuum(3).to_string() == "000");
  CHECK(BasisState::vacuum(3).particle_count() == 0);
  CHECK(basis_state({1}, 4).to_string() == "0100");
}

TEST_CASE("basis state string round trip over every 3-mode mask") {
  for (OccMask m = 0; m < 8; ++m) {
    const BasisState s(m, 3);
    CHECK(BasisState::from_string(s.to_string()) == s);
  }
}

TEST_CASE("mode bounds are enforced") {
  CHECK_THROWS_AS(basis_state({3}, 3), std::out_of_range);
  CHECK_THROWS_AS(BasisState::vacuum(13), std::invalid_argument);
  CHECK_THROWS_AS(StateVector(2, {{OccMask{4}, Complex{1.0, 0.0}}}), std::out_of_range);
  CHECK_NOTHROW(BasisState::vacuum(12));
}

TEST_CASE("state vectors form a complex vector space") {
  const StateVector u(2, {{0b01, {1.0, 0.0}}, {0b10, {0.0, 1.0}}});
  const StateVector v(2, {{0b01, {0.5, 0.0}}});

  const StateVector sum = u + v;
  CHECK(sum.amplitude(0b01) == Complex{1.5, 0.0});
  CHECK(sum.amplitude(0b10) == Complex{0.0, 1.0});

  const StateVector scaled = Complex{0.0, 2.0} * v;
  CHECK(scaled.amplitude(0b01) == Complex{0.0, 1.0});

  const StateVector diff = u - u;
  CHECK(diff.is_zero());
  CHECK(diff.amplitudes().empty());
}

TEST_CASE("inner product is conjugate linear in its first argument") {
  const StateVector u(1, {{0b1, {0.0, 1.0}}});
  const StateVector v(1, {{0b1, {2.0, 0.0}}});
  CHECK(inner_product(u, v) == Complex{0.0, -2.0});
  CHECK(inner_product(v, u) == Complex{0.0, 2.0});
  CHECK_THROWS_AS(inner_product(u, StateVector::zero(2)), std::invalid_argument);
}

TEST_CASE("norm and normalize behave on generic vectors") {
  const StateVector u(2, {{0b00, {3.0, 0.0}}, {0b11, {0.0, 4.0}}});
  CHECK(norm(u) == Catch::Approx(5.0).margin(1e-15));

  const StateVector n = normalize(u);
  CHECK(norm(n) == Catch::Approx(1.0).margin(1e-15));
  CHECK(std::abs(n.amplitude(0b00) - Complex{0.6, 0.0}) < 1e-15);
  CHECK(std::abs(n.amplitude(0b11) - Complex{0.0, 0.8}) < 1e-15);
}

TEST_CASE("normalize is exactly idempotent and kills near-zero vectors") {
  const StateVector basis(3, {{0b010, {1.0, 0.0}}});
  const StateVector once = normalize(basis);
  CHECK(once == basis);  // unit input is returned bit-for-bit

  const StateVector tiny(3, {{0b001, {1e-13, 0.0}}});
  CHECK(normalize(tiny).is_zero());
  CHECK(normalize(StateVector::zero(3)).is_zero());
}

TEST_CASE("normalize prunes numerically dead components") {
  const StateVector u(2, {{0b01, {1.0, 0.0}}, {0b10, {1e-16, 0.0}}});
  const StateVector n = normalize(u);
  CHECK(n.amplitudes().size() == 1);
  CHECK(n.amplitude(0b10) == Complex{});
}

TEST_CASE("ray equality ignores global phase and separates rays") {
  auto rng = oracles::fixed_rng(71);
  const StateVector u = normalize(StateVector(3, {{0b001, {1.0, 0.0}}, {0b100, {0.0, 1.0}}}));
  for (int k = 0; k < 25; ++k) {
    const Complex phase = oracles::random_unit_modulus(rng);
    CHECK(ray_equal(u, phase * u));
  }
  const StateVector w = normalize(StateVector(3, {{0b001, {1.0, 0.0}}, {0b100, {0.0, -1.0}}}));
  CHECK_FALSE(ray_equal(u, w));

  CHECK(ray_equal(StateVector::zero(3), StateVector::zero(3)));
  CHECK_FALSE(ray_equal(u, StateVector::zero(3)));
  CHECK_FALSE(ray_equal(StateVector::zero(3), u));
}

TEST_CASE("is_basis_like detects single-component rays") {
  const StateVector b(2, {{0b10, {0.0, -1.0}}});
  CHECK(b.is_basis_like());
  const StateVector mixed = normalize(StateVector(2, {{0b10, {1.0, 0.0}}, {0b01, {1.0, 0.0}}}));
  CHECK_FALSE(mixed.is_basis_like());
  CHECK_FALSE(StateVector::zero(2).is_basis_like());
}
