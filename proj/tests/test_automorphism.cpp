#include "cantor/automorphism.hpp"
#include "cantor/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace cantor;

namespace {

TreeAutomorphism from(const char* text) { return element_from_json(nlohmann::json::parse(text)); }

TreeAutomorphism adding_machine() {
  return from(R"({"kind":"mealy","alphabet":2,"initial":"a",
                  "states":{"a":{"perm":[1,0],"to":["id","a"]}}})");
}

TreeAutomorphism grig(const std::string& g) {
  auto j = nlohmann::json::parse(R"({"kind":"mealy","alphabet":2,"states":{
      "a":{"perm":[1,0],"to":["id","id"]},
      "b":{"perm":[0,1],"to":["a","c"]},
      "c":{"perm":[0,1],"to":["a","d"]},
      "d":{"perm":[0,1],"to":["id","b"]}}})");
  j["initial"] = g;
  return element_from_json(j);
}

std::vector<Word> level_words(const SphericalIndex& idx, std::size_t L) {
  std::vector<std::uint64_t> radices;
  for (std::size_t l = 1; l <= L; ++l)
    radices.push_back(idx.at(l));
  return oracle::all_words(radices);
}

std::shared_ptr<const PortraitNode> random_node(std::mt19937_64& rng, const SphericalIndex& idx,
                                                std::size_t level, std::size_t depth) {
  auto nd = std::make_shared<PortraitNode>();
  nd->depth = depth;
  if (depth == 0)
    return nd;
  const auto n = idx.at(level);
  nd->perm.resize(n);
  for (std::size_t k = 0; k < n; ++k)
    nd->perm[k] = k;
  std::shuffle(nd->perm.begin(), nd->perm.end(), rng);
  for (std::size_t k = 0; k < n; ++k)
    nd->children.push_back(random_node(rng, idx, level + 1, depth - 1));
  return nd;
}

TreeAutomorphism random_portrait(std::mt19937_64& rng, const SphericalIndex& idx,
                                 std::size_t depth) {
  return TreeAutomorphism::portrait(idx, random_node(rng, idx, 1, depth));
}

} // namespace

TEST_CASE("apply: identity, adding machine, Grigorchuk") {
  auto idx = SphericalIndex::constant(2);
  CHECK(cantor::apply(TreeAutomorphism::identity(idx), Word{1, 0, 1}) == Word{1, 0, 1});
  auto a = adding_machine();
  CHECK(cantor::apply(a, Word{1, 1, 0}) == Word{0, 0, 1});
  CHECK(cantor::apply(grig("b"), Word{0, 1}) == Word{0, 0});
  for (std::size_t L = 1; L <= 6; ++L)
    for (const auto& w : level_words(idx, L)) {
      CHECK(cantor::apply(a, w) == oracle::odometer(w, 1));
      for (char g : std::string("abcd"))
        CHECK(cantor::apply(grig(std::string(1, g)), w) == oracle::grigorchuk(g, w));
    }
  CHECK_THROWS_AS(cantor::apply(a, Word{2}), CantorError);
}

TEST_CASE("apply beyond a portrait's depth fails") {
  std::mt19937_64 rng(1);
  auto p = random_portrait(rng, SphericalIndex::constant(2), 2);
  try {
    cantor::apply(p, Word{0, 0, 0});
    FAIL("expected DepthExceeded");
  } catch (const CantorError& e) {
    CHECK(e.kind() == ErrorKind::DepthExceeded);
  }
}

TEST_CASE("compose and invert") {
  auto idx = SphericalIndex::constant(2);
  auto a = adding_machine();
  auto e = TreeAutomorphism::identity(idx);
  CHECK(equal_to_depth(compose(a, e), a, 8));
  CHECK(cantor::apply(compose(a, a), Word{0, 0}) == Word{0, 1});
  auto ga = grig("a");
  CHECK(equal_to_depth(compose(ga, ga), e, 10));
  CHECK(exact_equal(compose(ga, ga), e) == std::optional<bool>(true));
  CHECK(exact_equal(compose(grig("b"), grig("c")), grig("d")) == std::optional<bool>(true));
  auto ai = invert(a);
  CHECK(cantor::apply(ai, Word{0, 0, 0}) == Word{1, 1, 1});
  for (const auto& w : level_words(idx, 5))
    CHECK(cantor::apply(ai, w) == oracle::odometer(w, -1));
  CHECK(exact_equal(compose(a, ai), e) == std::optional<bool>(true));
  CHECK(equal_to_depth(invert(e), e, 5));
  CHECK(equal_to_depth(invert(ga), ga, 6));
  CHECK_THROWS_AS(compose(a, TreeAutomorphism::identity(SphericalIndex::constant(3))),
                  CantorError);
}

TEST_CASE("sections") {
  auto idx = SphericalIndex::constant(2);
  auto a = adding_machine();
  CHECK(section(TreeAutomorphism::identity(idx), Vertex{{0, 1}}).known_identity() ==
        std::optional<bool>(true));
  CHECK(exact_equal(section(a, Vertex{{1}}), a) == std::optional<bool>(true));
  CHECK(section(a, Vertex{{0}}).known_identity() == std::optional<bool>(true));
  CHECK(exact_equal(section(grig("b"), Vertex{{1}}), grig("c")) == std::optional<bool>(true));
}

TEST_CASE("equal_to_depth") {
  auto idx = SphericalIndex::constant(2);
  auto e = TreeAutomorphism::identity(idx);
  CHECK_FALSE(equal_to_depth(adding_machine(), e, 1));
  CHECK(equal_to_depth(grig("d"), e, 1));
  CHECK(equal_to_depth(grig("d"), e, 2));
  CHECK_FALSE(equal_to_depth(grig("d"), e, 3));
  CHECK(exact_equal(grig("d"), e) == std::optional<bool>(false));
  CHECK_THROWS_AS(equal_to_depth(TreeAutomorphism::rule(SphericalIndex::constant(2),
                                                        RuleState{RuleKind::Odometer,
                                                                  RulePhase::Odometer}),
                                 e, 30, 1000),
                  CantorError);
}

TEST_CASE("section closure") {
  auto idx = SphericalIndex::constant(2);
  auto c = section_closure(TreeAutomorphism::identity(idx), 10);
  CHECK(c.sections.size() == 1);
  CHECK(c.bounded == Boundedness::Bounded);
  auto b = section_closure(grig("b"), 10);
  CHECK(b.bounded == Boundedness::Bounded);
  CHECK(b.sections.size() == 5);
  std::set<std::string> names;
  for (const auto& s : b.sections)
    names.insert(describe(s));
  CHECK(names == std::set<std::string>{"mealy:a", "mealy:b", "mealy:c", "mealy:d", "mealy:id"});
  auto a = section_closure(adding_machine(), 10);
  CHECK(a.sections.size() == 2);
  CHECK(section_closure(grig("b"), 3).bounded == Boundedness::Unbounded);
}

TEST_CASE("minimal moved vertex") {
  CHECK(minimal_moved_vertex(grig("a"))->level() == 1);
  CHECK(minimal_moved_vertex(grig("b"))->level() == 2);
  CHECK(minimal_moved_vertex(grig("c"))->level() == 2);
  CHECK(*minimal_moved_vertex(grig("d")) == Vertex{{1, 0, 0}});
  CHECK_FALSE(minimal_moved_vertex(TreeAutomorphism::identity(SphericalIndex::constant(2))));
}

TEST_CASE("rule elements") {
  auto geo = SphericalIndex::geometric({3}, 3);
  auto b = TreeAutomorphism::rule(geo, RuleState{RuleKind::LargeSwap, RulePhase::SwapFirstLarge});
  CHECK(cantor::apply(b, Word{1, 7, 3}) == Word{2, 7, 3});
  CHECK(cantor::apply(b, Word{0, 7, 3}) == Word{0, 8, 3});
  CHECK(cantor::apply(b, Word{0, 0, 25}) == Word{0, 0, 26});
  CHECK(cantor::apply(b, Word{0, 0, 3}) == Word{0, 0, 3});
  CHECK(equal_to_depth(compose(b, b), TreeAutomorphism::identity(geo), 3));
  auto odo = TreeAutomorphism::rule(SphericalIndex::constant(2),
                                    RuleState{RuleKind::Odometer, RulePhase::Odometer});
  CHECK(equal_to_depth(odo, adding_machine(), 10));
  CHECK(equal_to_depth(invert(odo), invert(adding_machine()), 10));
  auto mixed = SphericalIndex::eventually_periodic({3, 5}, {2});
  auto m = TreeAutomorphism::rule(mixed, RuleState{RuleKind::Odometer, RulePhase::Odometer});
  for (const auto& w : level_words(mixed, 4))
    CHECK(cantor::apply(m, w) == oracle::mixed_add_one(w, {3, 5, 2, 2}));
}

TEST_CASE("element json round trip is bit-exact") {
  auto geo = SphericalIndex::geometric({3}, 3);
  std::mt19937_64 rng(5);
  std::vector<TreeAutomorphism> elems{
      adding_machine(), grig("b"), invert(grig("d")), compose(grig("b"), adding_machine()),
      TreeAutomorphism::identity(geo),
      TreeAutomorphism::rule(geo, RuleState{RuleKind::LargeSwap, RulePhase::SwapFirstLarge}),
      invert(TreeAutomorphism::rule(geo, RuleState{RuleKind::GraftEveryLevel, RulePhase::EveryLevelPath})),
      section(TreeAutomorphism::rule(geo, RuleState{RuleKind::GraftEveryLevel, RulePhase::EveryLevelPath}),
              Vertex{{0, 1}}),
      random_portrait(rng, geo, 2),
      make_product({TreeAutomorphism::rule(geo, RuleState{RuleKind::LargeSwap, RulePhase::SwapFirstLarge}),
                    TreeAutomorphism::rule(geo, RuleState{RuleKind::GraftEveryLevel, RulePhase::EveryLevelPath})})};
  for (const auto& g : elems) {
    const auto text = element_to_json(g).dump();
    const auto back = element_from_json(nlohmann::json::parse(text));
    CHECK(element_to_json(back).dump() == text);
    CHECK(equal_to_depth(back, g, 2));
  }
  CHECK(element_to_json(adding_machine()).dump() ==
        R"({"alphabet":2,"initial":"a","kind":"mealy","states":{"a":{"perm":[1,0],"to":["id","a"]}}})");
  CHECK_THROWS_AS(from(R"({"kind":"mealy","alphabet":2,"initial":"a",
                           "states":{"a":{"perm":[0,0],"to":["a","a"]}}})"),
                  CantorError);
  CHECK_THROWS_AS(from(R"({"kind":"spline"})"), CantorError);
}

TEST_CASE("level permutation agrees with apply") {
  auto geo = SphericalIndex::eventually_periodic({3}, {2});
  std::mt19937_64 rng(9);
  auto g = random_portrait(rng, geo, 4);
  LevelCodec codec(geo, 4);
  auto perm = level_permutation(g, 4);
  for (std::uint64_t r = 0; r < codec.size(); ++r)
    CHECK(perm[r] == codec.rank(cantor::apply(g, codec.unrank(r))));
}

TEST_CASE("property: level bijectivity and reconstruction") {
  std::mt19937_64 rng(21);
  auto idx = SphericalIndex::eventually_periodic({3}, {2, 3});
  const std::size_t L = 4;
  const auto words = level_words(idx, L);
  for (int t = 0; t < 200; ++t) {
    auto g = random_portrait(rng, idx, L);
    std::set<Word> image;
    for (const auto& w : words) {
      const auto img = cantor::apply(g, w);
      image.insert(img);
      // root permutation, then the section at the first digit
      auto [k, s] = g.step(w[0]);
      Word rest(w.begin() + 1, w.end());
      Word rebuilt{k};
      const auto tail = cantor::apply(s, rest);
      rebuilt.insert(rebuilt.end(), tail.begin(), tail.end());
      CHECK(rebuilt == img);
    }
    CHECK(image.size() == words.size());
  }
}

TEST_CASE("property: group laws on portraits") {
  std::mt19937_64 rng(33);
  auto idx = SphericalIndex::eventually_periodic({2}, {3});
  const std::size_t L = 4;
  auto e = TreeAutomorphism::identity(idx);
  for (int t = 0; t < 200; ++t) {
    auto f = random_portrait(rng, idx, L), g = random_portrait(rng, idx, L),
         h = random_portrait(rng, idx, L);
    CHECK(equal_to_depth(compose(compose(f, g), h), compose(f, compose(g, h)), L));
    CHECK(equal_to_depth(compose(f, e), f, L));
    CHECK(equal_to_depth(compose(e, f), f, L));
    CHECK(equal_to_depth(compose(f, invert(f)), e, L));
    CHECK(equal_to_depth(compose(invert(f), f), e, L));
  }
}

TEST_CASE("property: wreath law for sections") {
  std::mt19937_64 rng(44);
  auto idx = SphericalIndex::constant(3);
  const std::size_t L = 4;
  for (int t = 0; t < 200; ++t) {
    auto g = random_portrait(rng, idx, L), h = random_portrait(rng, idx, L);
    Word v{rng() % 3, rng() % 3};
    auto lhs = section(compose(g, h), Vertex{v});
    auto rhs = compose(section(g, Vertex{cantor::apply(h, v)}), section(h, Vertex{v}));
    CHECK(equal_to_depth(lhs, rhs, L - 2));
  }
}
