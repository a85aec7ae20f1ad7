#include "cantor/error.hpp"
#include "cantor/tree.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace cantor;

TEST_CASE("index lookups") {
  CHECK(SphericalIndex::constant(2).at(7) == 2);
  CHECK(SphericalIndex::geometric({3}, 3).at(3) == 27);
  auto ep = SphericalIndex::eventually_periodic({3, 6}, {6});
  CHECK(ep.at(1) == 3);
  CHECK(ep.at(2) == 6);
  CHECK(ep.at(50) == 6);
  auto cyc = SphericalIndex::eventually_periodic({5}, {2, 3});
  CHECK(cyc.at(2) == 2);
  CHECK(cyc.at(3) == 3);
  CHECK(cyc.at(4) == 2);
}

TEST_CASE("index validation") {
  CHECK_THROWS_AS(SphericalIndex::eventually_periodic({1}, {2}), CantorError);
  CHECK_THROWS_AS(SphericalIndex::eventually_periodic({2}, {}), CantorError);
  CHECK_THROWS_AS(SphericalIndex::geometric({}, 3), CantorError);
  CHECK_THROWS_AS(SphericalIndex::geometric({3}, 1), CantorError);
  try {
    SphericalIndex::geometric({3}, 3).at(60);
    FAIL("expected overflow");
  } catch (const CantorError& e) {
    CHECK(e.kind() == ErrorKind::InvalidIndex);
  }
}

TEST_CASE("shifted index") {
  auto g = SphericalIndex::geometric({3}, 3);
  for (std::size_t s = 0; s < 5; ++s)
    for (std::size_t l = 1; l < 8; ++l)
      CHECK(g.shifted(s).at(l) == g.at(s + l));
  auto ep = SphericalIndex::eventually_periodic({7, 5}, {2, 3, 4});
  for (std::size_t s = 0; s < 7; ++s)
    for (std::size_t l = 1; l < 10; ++l)
      CHECK(ep.shifted(s).at(l) == ep.at(s + l));
}

TEST_CASE("index json round trip") {
  for (const auto& idx : {SphericalIndex::geometric({3}, 3),
                          SphericalIndex::eventually_periodic({3, 6}, {6}),
                          SphericalIndex::constant(2)}) {
    auto j = idx.to_json();
    CHECK(SphericalIndex::from_json(j) == idx);
    CHECK(SphericalIndex::from_json(j).to_json().dump() == j.dump());
  }
  CHECK(SphericalIndex::constant(2).to_json().dump() ==
        R"({"cycle":[2],"mode":"eventually_periodic","prefix":[]})");
  CHECK_THROWS_AS(SphericalIndex::from_json(nlohmann::json{{"mode", "weird"}}), CantorError);
}

TEST_CASE("cylinder measure") {
  CHECK(cylinder_measure(SphericalIndex::constant(2), Vertex{}) == 1);
  auto ep = SphericalIndex::eventually_periodic({3, 6}, {6});
  CHECK(cylinder_measure(ep, Vertex{{0, 4}}) == Rational(1, 18));
  // n = 3, 9, 27
  CHECK(cylinder_measure(SphericalIndex::geometric({3}, 3), Vertex{{0, 0, 0}}) ==
        Rational(1, 3 * 9 * 27));
  CHECK_THROWS_AS(cylinder_measure(ep, Vertex{{3}}), CantorError);
}

TEST_CASE("measure normalization and parent relation") {
  for (const auto& idx : {SphericalIndex::constant(2), SphericalIndex::constant(3),
                          SphericalIndex::geometric({3}, 3),
                          SphericalIndex::eventually_periodic({3, 6}, {6})}) {
    std::vector<std::uint64_t> radices;
    for (std::size_t l = 1; l <= 3; ++l) {
      radices.push_back(idx.at(l));
      Rational total = 0;
      for (const auto& w : oracle::all_words(radices)) {
        const auto m = cylinder_measure(idx, Vertex{w});
        total += m;
        Word parent(w.begin(), w.end() - 1);
        CHECK(m * idx.at(l) == cylinder_measure(idx, Vertex{parent}));
      }
      CHECK(total == 1);
    }
  }
}

TEST_CASE("boundary metric") {
  auto idx = SphericalIndex::constant(2);
  auto m = boundary_metric(idx, {{0, 1, 1}}, {{1, 0, 0}});
  CHECK(m.resolved);
  CHECK(m.value == Rational(1, 2));
  m = boundary_metric(idx, {{0, 0, 1}}, {{0, 0, 0}});
  CHECK(m.value == Rational(1, 8));
  CHECK(m.first_difference == 3);
  m = boundary_metric(idx, {{0, 1, 0}}, {{0, 1, 0}});
  CHECK_FALSE(m.resolved);
  CHECK(m.value == Rational(1, 8));
  CHECK_THROWS_AS(boundary_metric(idx, {{0}}, {{0, 1}}), CantorError);
}

TEST_CASE("boundary metric is a symmetric ultrametric") {
  std::mt19937_64 rng(11);
  auto idx = SphericalIndex::eventually_periodic({3}, {2});
  auto draw = [&] {
    Word w(6);
    for (std::size_t i = 0; i < w.size(); ++i)
      w[i] = rng() % idx.at(i + 1);
    // bias towards shared prefixes
    if (rng() % 2)
      w[0] = 0;
    return BoundaryPrefix{w};
  };
  for (int t = 0; t < 500; ++t) {
    auto x = draw(), y = draw(), z = draw();
    auto xy = boundary_metric(idx, x, y), yz = boundary_metric(idx, y, z),
         xz = boundary_metric(idx, x, z);
    CHECK(xy.value == boundary_metric(idx, y, x).value);
    if (xy.resolved && yz.resolved && xz.resolved)
      CHECK(xz.value <= std::max(xy.value, yz.value));
  }
}

TEST_CASE("level codec") {
  auto idx = SphericalIndex::eventually_periodic({3}, {2});
  LevelCodec codec(idx, 3);
  CHECK(codec.size() == 12);
  for (std::uint64_t r = 0; r < codec.size(); ++r)
    CHECK(codec.rank(codec.unrank(r)) == r);
  CHECK(codec.unrank(0) == Word{0, 0, 0});
  CHECK(codec.unrank(1) == Word{0, 0, 1});
  CHECK_THROWS_AS(LevelCodec(SphericalIndex::constant(2), 30, 1000), CantorError);
}

TEST_CASE("word parsing") {
  CHECK(parse_word("") == Word{});
  CHECK(parse_word("0,1,2") == Word{0, 1, 2});
  CHECK(word_to_string({0, 1}) == "(0,1)");
  CHECK_THROWS_AS(parse_word("0,x"), CantorError);
}
