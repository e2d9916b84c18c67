#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sysfree/arith_surfaces.hpp"
#include "sysfree/errors.hpp"

using namespace sysfree;
using namespace sysfree::arith;

namespace {

oracle::Quad quad(const GroupElement& e) { return e.tuple(); }

// Random group elements as words in a few unit-norm generators of Gamma(-1, 3).
GroupElement random_word(std::mt19937_64& rng, int max_len) {
  static const std::vector<oracle::Quad> gens{{2, 1, 0, 0}, {2, 0, 0, 1}, {0, 1, 2, 0},
                                              {0, 0, 1, 0}, {2, -1, 0, 0}, {0, 0, 2, 1}};
  std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
  std::uniform_int_distribution<int> len(1, max_len);
  GroupElement g = GroupElement::identity(3);
  for (int k = len(rng); k > 0; --k) {
    const auto& q = gens[pick(rng)];
    g = multiply(g, GroupElement(q[0], q[1], q[2], q[3], 3));
  }
  return g;
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(FuchsianParams(3));
  CHECK_NOTHROW(FuchsianParams(7));
  CHECK_NOTHROW(FuchsianParams(11));
  CHECK_THROWS_AS(FuchsianParams(4), ParameterError);
  CHECK_THROWS_AS(FuchsianParams(5), ParameterError);
  CHECK_THROWS_AS(FuchsianParams(15), ParameterError);
  CHECK_THROWS_AS(FuchsianParams(-1), ParameterError);
  CHECK_THROWS_AS(CongruenceLevel(1), ParameterError);
  CHECK(CongruenceLevel(2).N() == 2);
  CHECK(is_prime(2));
  CHECK(is_prime(97));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(91));
}

TEST_CASE("elements must have unit norm and are stored canonically") {
  CHECK_THROWS_AS(GroupElement(2, 0, 0, 0, 3), ParameterError);
  CHECK_THROWS_AS(GroupElement(3, 2, 2, 1, 3), ParameterError);
  CHECK(quad(GroupElement(-3, -2, -2, 0, 3)) == oracle::Quad{3, 2, 2, 0});
  CHECK(quad(GroupElement(0, 0, -1, 0, 3)) == oracle::Quad{0, 0, 1, 0});
  CHECK(quad(GroupElement(0, -1, -2, 0, 3)) == oracle::Quad{0, 1, 2, 0});
  CHECK(GroupElement(-1, 0, 0, 0, 3).is_identity());
  CHECK(GroupElement(3, 2, 2, 0, 3).abs_trace() == 6);
  CHECK(reduced_norm(3, 2, 2, 0, 3) == 1);
}

TEST_CASE("multiplication agrees with the 2x2 matrix product over Z[sqrt p]") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const GroupElement x = random_word(rng, 5);
    const GroupElement y = random_word(rng, 5);
    const auto m = oracle::matmul(oracle::to_matrix(quad(x)), oracle::to_matrix(quad(y)), 3);
    REQUIRE(oracle::matrix_has_group_shape(m));
    const auto det = oracle::matrix_det(m, 3);
    CHECK(det.x == 1);
    CHECK(det.y == 0);
    CHECK(oracle::same_mod_sign(quad(multiply(x, y)), oracle::from_matrix(m)));
  }
}

TEST_CASE("group laws") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const GroupElement x = random_word(rng, 4);
    const GroupElement y = random_word(rng, 4);
    const GroupElement z = random_word(rng, 4);
    CHECK(multiply(multiply(x, y), z) == multiply(x, multiply(y, z)));
    CHECK(multiply(x, inverse(x)).is_identity());
    CHECK(multiply(inverse(x), x).is_identity());
    CHECK(multiply(x, GroupElement::identity(3)) == x);
    const auto t = x.tuple();
    CHECK(oracle::same_mod_sign(quad(inverse(x)), {t[0], -t[1], -t[2], -t[3]}));
    CHECK(reduced_norm(t[0], t[1], t[2], t[3], 3) == 1);
  }
}

TEST_CASE("multiplication refuses to overflow") {
  GroupElement g(2, 1, 0, 0, 3);
  bool threw = false;
  try {
    for (int k = 0; k < 200; ++k) g = multiply(g, g);
  } catch (const ArithmeticOverflowError&) {
    threw = true;
  }
  CHECK(threw);
}

TEST_CASE("translation length") {
  const GroupElement w(3, 2, 2, 0, 3);
  CHECK(translation_length(w) == doctest::Approx(2.0 * std::acosh(3.0)).epsilon(1e-15));
  CHECK(translation_length(w) == doctest::Approx(3.525494348078172).epsilon(1e-14));
  CHECK(length_from_trace(6) == translation_length(w));
  CHECK_THROWS_AS(translation_length(GroupElement::identity(3)), NonHyperbolicError);
  CHECK_THROWS_AS(translation_length(GroupElement(0, 0, 1, 0, 3)), NonHyperbolicError);
  // (3,2,2,0)^2 = (17,12,12,0), twice the length
  const GroupElement sq = multiply(w, w);
  CHECK(quad(sq) == oracle::Quad{17, 12, 12, 0});
  CHECK(translation_length(sq) == doctest::Approx(2.0 * translation_length(w)).epsilon(1e-13));
}

TEST_CASE("level membership") {
  CHECK(is_in_level(GroupElement(3, 2, 2, 0, 3), CongruenceLevel(2)));
  CHECK_FALSE(is_in_level(GroupElement(2, 1, 0, 0, 3), CongruenceLevel(2)));
  CHECK(is_in_level(GroupElement(2, 0, 3, 2, 3), CongruenceLevel(3)) ==
        oracle::congruent_to_pm_identity({2, 0, 3, 2}, 3));
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const GroupElement g = random_word(rng, 6);
    for (std::int64_t n : {2, 3, 4, 5, 6}) {
      CHECK(is_in_level(g, CongruenceLevel(n)) == oracle::congruent_to_pm_identity(quad(g), n));
    }
  }
}

TEST_CASE("spectrum matches a quadruple-loop search") {
  struct Case {
    std::int64_t n, trace, box;
  };
  for (const auto c : {Case{2, 20, 50}, Case{3, 40, 20}, Case{4, 30, 16}, Case{5, 60, 12}}) {
    CAPTURE(c.n);
    const auto spectrum = enumerate_level_elements(FuchsianParams(3), CongruenceLevel(c.n), c.trace, c.box);
    const auto brute = oracle::brute_spectrum(3, c.n, c.trace, c.box);
    REQUIRE(spectrum.entries.size() == brute.size());
    auto it = brute.begin();
    for (const auto& entry : spectrum.entries) {
      CHECK(entry.abs_trace == it->first);
      std::set<oracle::Quad> got;
      for (const auto& w : entry.witnesses) got.insert(w.tuple());
      CHECK(got.size() == entry.witnesses.size());
      CHECK(got == it->second);
      ++it;
    }
  }
}

TEST_CASE("spectrum properties") {
  const auto s = enumerate_level_elements(FuchsianParams(3), CongruenceLevel(2), 60, 30);
  CHECK(s.p == 3);
  CHECK(s.N == 2);
  std::int64_t prev = 0;
  for (const auto& e : s.entries) {
    CHECK(e.abs_trace > prev);
    CHECK(e.abs_trace > 2);
    prev = e.abs_trace;
    CHECK(e.length == doctest::Approx(2.0 * std::acosh(e.abs_trace / 2.0)).epsilon(1e-14));
    for (std::size_t k = 0; k < e.witnesses.size(); ++k) {
      const auto& w = e.witnesses[k];
      CHECK(w.abs_trace() == e.abs_trace);
      CHECK(is_in_level(w, CongruenceLevel(2)));
      CHECK(std::abs(w.b()) <= 30);
      CHECK(std::abs(w.d()) <= 30);
      if (k > 0) {
        const auto& v = e.witnesses[k - 1];
        const auto l1 = [](const GroupElement& x) { return std::abs(x.b()) + std::abs(x.c()) + std::abs(x.d()); };
        CHECK((l1(v) < l1(w) || (l1(v) == l1(w) && v.tuple() > w.tuple())));
      }
    }
  }
  // Results do not depend on the thread count.
  CHECK(enumerate_level_elements(FuchsianParams(3), CongruenceLevel(2), 60, 30, 1) == s);
  CHECK(enumerate_level_elements(FuchsianParams(3), CongruenceLevel(2), 60, 30, 3) == s);
}

TEST_CASE("spectrum parameter errors") {
  CHECK_THROWS_AS(enumerate_level_elements(FuchsianParams(3), CongruenceLevel(2), 2, 10), ParameterError);
  CHECK_THROWS_AS(enumerate_level_elements(FuchsianParams(3), CongruenceLevel(2), 20, 0), ParameterError);
  const auto empty = enumerate_level_elements(FuchsianParams(3), CongruenceLevel(2), 4, 50);
  CHECK(empty.entries.empty());
  CHECK_THROWS_AS(certificate_from_spectrum(empty), NoCertificateError);
  CHECK_THROWS_AS(systole_certificate(FuchsianParams(3), CongruenceLevel(2), 4, 50), NoCertificateError);
}

TEST_CASE("systole certificate at level 2") {
  const auto cert = systole_certificate(FuchsianParams(3), CongruenceLevel(2), 20, 50);
  CHECK(cert.abs_trace == 6);
  CHECK(cert.witness.tuple() == oracle::Quad{3, 2, 2, 0});
  CHECK(cert.length == doctest::Approx(3.525494348078172).epsilon(1e-14));
  const auto stable = certify_systole(FuchsianParams(3), CongruenceLevel(2), 20, 50);
  CHECK(stable.stable);
  CHECK(stable.doubled.abs_trace == 6);
}

TEST_CASE("systole certificate at level 3") {
  const auto cert = certify_systole(FuchsianParams(3), CongruenceLevel(3), 400, 100);
  CHECK(cert.certificate.abs_trace == 20);
  CHECK(cert.certificate.length == doctest::Approx(5.986445692252762).epsilon(1e-13));
  CHECK(cert.stable);
}

TEST_CASE("residue group order matches exhaustive enumeration") {
  for (std::int64_t p : {3, 7, 11}) {
    for (std::int64_t n = 2; n <= 9; ++n) {
      CAPTURE(p);
      CAPTURE(n);
      CHECK(residue_group_order(FuchsianParams(p), CongruenceLevel(n)) == oracle::brute_residue_order(p, n));
    }
  }
  CHECK(residue_group_order(FuchsianParams(3), CongruenceLevel(2)) == 8);
  CHECK(residue_group_order(FuchsianParams(3), CongruenceLevel(3)) == 18);
  CHECK(residue_group_order(FuchsianParams(3), CongruenceLevel(11)) == 660);
}

TEST_CASE("genus estimate") {
  CHECK(genus_estimate(8, kDefaultChi0) == 2.0);
  CHECK(genus_estimate(18, kDefaultChi0) == 3.25);
  CHECK(genus_estimate(4, {-1, 1}) == 3.0);
  CHECK_THROWS_AS(genus_estimate(0, kDefaultChi0), ParameterError);
  CHECK_THROWS_AS(genus_estimate(8, {1, 4}), ParameterError);
}

TEST_CASE("diameter upper bound") {
  const double g = 10;
  CHECK(diameter_upper_bound(10, 1.0, 1.0) == doctest::Approx(std::log(4.0 * std::numbers::pi * (g - 1.0))));
  CHECK(diameter_upper_bound(10, 2.5, 3.0) == doctest::Approx(2.5 * std::log(4.0 * std::numbers::pi * 9.0 / 3.0)));
  CHECK(diameter_upper_bound(1000, 1.0, 1.0) > diameter_upper_bound(100, 1.0, 1.0));
  CHECK_THROWS_AS(diameter_upper_bound(2, 1.0, 100.0), DegenerateInputError);
  CHECK_THROWS_AS(diameter_upper_bound(1, 1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(diameter_upper_bound(10, 0.0, 1.0), ParameterError);
}
