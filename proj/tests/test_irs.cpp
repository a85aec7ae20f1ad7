#include "cantor/catalog.hpp"
#include "cantor/error.hpp"
#include "cantor/irs.hpp"

#include <doctest.h>

#include <map>

using namespace cantor;

TEST_CASE("sampled points follow the counting measure") {
  SUBCASE("empty prefix at depth zero") {
    CounterStream rng(1, 0);
    CHECK(sample_point(SphericalIndex::constant(2), 0, rng).digits.empty());
  }
  SUBCASE("binary level-3 cylinders") {
    std::map<Word, int> hits;
    for (std::size_t i = 0; i < 10000; ++i) {
      CounterStream rng(5, i);
      auto x = sample_point(SphericalIndex::constant(2), 10, rng);
      ++hits[Word(x.digits.begin(), x.digits.begin() + 3)];
    }
    CHECK(hits.size() == 8);
    for (const auto& [w, c] : hits)
      CHECK(std::abs(c / 10000.0 - 0.125) < 0.02);
  }
  SUBCASE("geometric index depth 2") {
    const auto idx = SphericalIndex::geometric({3}, 3);
    std::map<Word, int> hits;
    for (std::size_t i = 0; i < 100000; ++i) {
      CounterStream rng(9, i);
      auto x = sample_point(idx, 2, rng);
      CHECK(x.digits[0] < 3);
      CHECK(x.digits[1] < 9);
      ++hits[x.digits];
    }
    CHECK(hits.size() == 27);
    for (const auto& [w, c] : hits)
      CHECK(std::abs(c / 100000.0 - 1.0 / 27) < 0.02);
  }
  SUBCASE("reproducible") {
    CounterStream a(42, 3), b(42, 3);
    CHECK(sample_point(SphericalIndex::constant(3), 20, a).digits ==
          sample_point(SphericalIndex::constant(3), 20, b).digits);
  }
}

TEST_CASE("empirical stabilizer distribution") {
  SUBCASE("identity-only action has one all-loops class") {
    const auto idx = SphericalIndex::constant(2);
    GeneratedAction act(idx, {"t"}, {TreeAutomorphism::identity(idx)});
    const auto rep = irs_empirical(act, 50, 16, 3, 0);
    REQUIRE(rep.classes.size() == 1);
    CHECK(rep.max_frequency == 1);
    CHECK(rep.classes[0].representative.vertices.size() == 1);
  }
  SUBCASE("odometer balls are paths") {
    const auto rep = irs_empirical(build_example("odometer", {.d = 2}).action(), 1000, 64, 4, 0);
    REQUIRE(rep.classes.size() == 1);
    CHECK(rep.max_frequency == 1);
    CHECK(rep.classes[0].representative.vertices.size() == 9);
  }
  SUBCASE("dihedral balls are the free orbit ball") {
    const auto rep = irs_empirical(build_example("dihedral").action(), 1000, 64, 4, 0);
    REQUIRE(rep.classes.size() == 1);
    CHECK(rep.max_frequency >= Rational(999, 1000));
    // elements of the infinite dihedral group within distance 4: a^k (|k| <= 4), a^k b (|k| <= 3)
    CHECK(rep.classes[0].representative.vertices.size() == 16);
  }
  SUBCASE("Grigorchuk has many classes") {
    const auto act = build_example("grigorchuk").action();
    std::size_t prev = 0;
    for (std::size_t r = 2; r <= 5; ++r) {
      const auto rep = irs_empirical(act, 500, 32, r, 7);
      CHECK(rep.classes.size() >= prev);
      prev = rep.classes.size();
      if (r == 4) {
        CHECK(rep.classes.size() >= 2);
        CHECK(rep.max_frequency < Rational(9, 10));
      }
    }
  }
  SUBCASE("reports are reproducible and frequencies sum to one") {
    const auto act = build_example("grigorchuk").action();
    const auto a = irs_empirical(act, 200, 24, 4, 11);
    const auto b = irs_empirical(act, 200, 24, 4, 11);
    CHECK(a.to_json().dump() == b.to_json().dump());
    Rational sum = 0;
    for (const auto& c : a.classes)
      sum += c.frequency;
    CHECK(sum == 1);
  }
}

TEST_CASE("Schreier metric") {
  const auto odo = build_example("odometer", {.d = 2}).action();
  SUBCASE("a graph against itself") {
    const auto g = schreier_level_graph(odo, 6);
    CHECK(schreier_metric(g, g, 4).indistinguishable());
  }
  SUBCASE("loop vertex against a line") {
    SchreierGraph loop{{"a"}, {Word{}}, {{0}}, std::nullopt};
    const auto line = stabilizer_schreier_ball(odo, BoundaryPrefix{Word(20, 0)}, 3);
    const auto d = schreier_metric(loop, line, 3);
    REQUIRE_FALSE(d.indistinguishable());
    CHECK(*d.agree_radius == 0);
    CHECK(d.value() == 1);
    CHECK_THROWS_AS(schreier_metric(loop, schreier_level_graph(build_example("dihedral").action(), 3), 2),
                    CantorError);
  }
  SUBCASE("rotating the odometer cycle") {
    const auto g = schreier_level_graph(odo, 8);
    const auto h = move_basepoint(g, 37);
    CHECK(schreier_metric(g, h, 3).indistinguishable());
  }
  SUBCASE("ultrametric on sampled Grigorchuk balls") {
    const auto act = build_example("grigorchuk").action();
    std::vector<SchreierGraph> balls;
    for (std::size_t i = 0; i < 40; ++i) {
      CounterStream rng(3, i);
      balls.push_back(stabilizer_schreier_ball(act, sample_point(act.index(), 32, rng), 6));
    }
    CounterStream pick(4, 0);
    int resolved = 0;
    for (int t = 0; t < 500; ++t) {
      const auto& x = balls[pick.uniform(balls.size())];
      const auto& y = balls[pick.uniform(balls.size())];
      const auto& z = balls[pick.uniform(balls.size())];
      const auto xy = schreier_metric(x, y, 6), yx = schreier_metric(y, x, 6);
      const auto yz = schreier_metric(y, z, 6), xz = schreier_metric(x, z, 6);
      CHECK(xy.value() == yx.value());
      CHECK(xz.value() <= std::max(xy.value(), yz.value()));
      resolved += !xz.indistinguishable();
    }
    CHECK(resolved > 100);
  }
}

TEST_CASE("moving the basepoint along a generator") {
  for (const char* name : {"grigorchuk", "dihedral", "ex45_c"}) {
    const auto e = build_example(name, {.d = 2});
    const auto act = e.action();
    for (std::size_t i = 0; i < 20; ++i) {
      CounterStream rng(8, i);
      const auto x = sample_point(act.index(), 24, rng);
      const auto big = stabilizer_schreier_ball(act, x, 4);
      for (Letter l = 0; l < act.letter_count(); ++l) {
        const auto gx = act.act_letter(l, x.digits);
        const auto pos = std::find(big.vertices.begin(), big.vertices.end(), gx) - big.vertices.begin();
        const auto moved = ball_of(move_basepoint(big, static_cast<std::size_t>(pos)), 3);
        const auto direct = stabilizer_schreier_ball(act, BoundaryPrefix{gx}, 3);
        CHECK(canonical_hash(moved) == canonical_hash(direct));
      }
    }
  }
}

TEST_CASE("atomicity summaries") {
  auto runs = [](const GeneratedAction& act, std::uint64_t seed) {
    std::vector<IrsSampleReport> out;
    for (std::size_t r = 2; r <= 5; ++r)
      out.push_back(irs_empirical(act, 300, 32, r, seed));
    return out;
  };
  const auto dih = runs(build_example("dihedral").action(), 7);
  CHECK(atomicity_report(dih).verdict == "atom candidate");
  for (const auto& r : dih)
    CHECK(r.classes.size() == 1);
  const auto grig = runs(build_example("grigorchuk").action(), 7);
  CHECK(atomicity_report(grig).verdict == "non-atomic trend");
  CHECK_THROWS_AS(atomicity_report({dih[0]}), CantorError);
}

TEST_CASE("Chabauty-Fell basic sets") {
  const auto act = build_example("dihedral").action();
  const Word zero(12, 0);
  const auto a = act.parse("a");
  const auto b = act.parse("b");
  CHECK(ChabautyBasicSet{{b}, {a}}.contains_stabilizer_of(act, zero));
  CHECK_FALSE(ChabautyBasicSet{{a}, {}}.contains_stabilizer_of(act, zero));
  CHECK_FALSE(ChabautyBasicSet{{}, {b}}.contains_stabilizer_of(act, zero));
}
