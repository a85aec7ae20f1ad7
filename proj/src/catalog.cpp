#include "cantor/catalog.hpp"

#include "cantor/error.hpp"

#include <numeric>

namespace cantor {

namespace {

using State = MealyMachine::State;

TreeAutomorphism odometer_rule(const SphericalIndex& index) {
  return TreeAutomorphism::rule(index, RuleState{RuleKind::Odometer, RulePhase::Odometer});
}

std::vector<Digit> identity_perm(std::uint64_t d) {
  std::vector<Digit> p(d);
  std::iota(p.begin(), p.end(), Digit{0});
  return p;
}

std::shared_ptr<MealyMachine> with_identity(std::uint64_t d, std::vector<State> states) {
  const auto id = states.size();
  states.push_back(State{"id", identity_perm(d), std::vector<std::size_t>(d, id)});
  auto m = std::make_shared<MealyMachine>(d, std::move(states));
  m->mark_implicit_identity();
  return m;
}

} // namespace

std::shared_ptr<const MealyMachine> odometer_machine(std::uint64_t d) {
  if (d < 2)
    fail(ErrorKind::InvalidParams, "odometer needs d >= 2");
  State a{"a", {}, std::vector<std::size_t>(d, 1)};
  for (Digit k = 0; k < d; ++k)
    a.perm.push_back((k + 1) % d);
  a.to[d - 1] = 0;
  return with_identity(d, {a});
}

std::shared_ptr<const MealyMachine> dihedral_machine() {
  // a: +1; b: negation, b = (b, f) with f = complement = sigma(f, f)
  return with_identity(2, {State{"a", {1, 0}, {3, 0}},
                           State{"b", {0, 1}, {1, 2}},
                           State{"f", {1, 0}, {2, 2}}});
}

std::shared_ptr<const MealyMachine> grigorchuk_machine() {
  return with_identity(2, {State{"a", {1, 0}, {4, 4}},
                           State{"b", {0, 1}, {0, 2}},
                           State{"c", {0, 1}, {0, 3}},
                           State{"d", {0, 1}, {4, 1}}});
}

std::vector<std::string> catalog_names() {
  return {"odometer", "dihedral", "grigorchuk", "thm61_b", "ex44_c", "ex45_c"};
}

Vertex every_level_w(std::size_t l) {
  Word w(l, 0);
  w.push_back(1);
  return Vertex{w};
}

Vertex doubling_w(std::size_t k) {
  if (k < 1 || k > 62)
    fail(ErrorKind::InvalidParams, "k must lie in 1..62");
  return every_level_w((std::size_t{1} << k) - 1);
}

CatalogEntry build_example(const std::string& name, const ExampleParams& params) {
  CatalogEntry e{name, "", SphericalIndex::constant(2), {}, {}};
  const auto d = params.d.value_or(2);
  auto mealy = [](const std::shared_ptr<const MealyMachine>& m, const std::string& s) {
    return TreeAutomorphism::mealy(m, *m->find(s));
  };
  if (name == "odometer") {
    e.summary = "adding machine on the d-ary tree; acts freely";
    e.index = SphericalIndex::constant(d);
    e.names = {"a"};
    e.generators = {mealy(odometer_machine(d), "a")};
  } else if (name == "dihedral") {
    e.summary = "adding machine a and negation b on the binary tree; G_x = <b> at x = 0";
    auto m = dihedral_machine();
    e.names = {"a", "b"};
    e.generators = {mealy(m, "a"), mealy(m, "b")};
  } else if (name == "grigorchuk") {
    e.summary = "Grigorchuk group: a = swap, b = (a,c), c = (a,d), d = (id,b)";
    auto m = grigorchuk_machine();
    e.names = {"a", "b", "c", "d"};
    for (const auto& s : e.names)
      e.generators.push_back(mealy(m, s));
  } else if (name == "thm61_b") {
    e.summary = "mixed-radix odometer a and the swap-first-large-digit element b";
    e.index = params.index.value_or(SphericalIndex::geometric({3}, 3));
    // n_{l+1} > 2 n_l and n_1 >= 3
    for (std::size_t l = 1; l <= e.index.prefix().size() + e.index.cycle().size() + 1; ++l) {
      if (e.index.at(l) < 3)
        fail(ErrorKind::InvalidParams, "thm61_b needs every n_l >= 3");
      if (e.index.at(l + 1) <= 2 * e.index.at(l))
        fail(ErrorKind::InvalidParams, "thm61_b needs n_{l+1} > 2 n_l");
    }
    e.names = {"a", "b"};
    e.generators = {odometer_rule(e.index),
                    TreeAutomorphism::rule(e.index, RuleState{RuleKind::LargeSwap, RulePhase::SwapFirstLarge})};
  } else if (name == "ex44_c") {
    e.summary = "mixed-radix odometer a and c = odometer grafted below each z_{l+2} = 0^l 1 0";
    e.index = params.index.value_or(SphericalIndex::geometric({3}, 3));
    e.names = {"a", "c"};
    e.generators = {odometer_rule(e.index),
                    TreeAutomorphism::rule(e.index, RuleState{RuleKind::GraftEveryLevel, RulePhase::EveryLevelPath})};
  } else if (name == "ex45_c") {
    e.summary = "d-ary odometer a and c = odometer grafted below z = 0^(m_k - 1) 1 0^(m_k), m_k = 2^k";
    e.index = SphericalIndex::constant(d);
    e.names = {"a", "c"};
    e.generators = {mealy(odometer_machine(d), "a"),
                    TreeAutomorphism::rule(e.index, RuleState{RuleKind::GraftDoubling, RulePhase::DoublingPath})};
  } else {
    fail(ErrorKind::InvalidParams, "unknown example '" + name + "'");
  }
  return e;
}

const TreeAutomorphism& CatalogEntry::generator(const std::string& gen) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == gen)
      return generators[i];
  fail(ErrorKind::InvalidParams, "example '" + name + "' has no generator '" + gen + "'");
}

nlohmann::json CatalogEntry::to_json() const {
  nlohmann::json gens = nlohmann::json::object();
  for (std::size_t i = 0; i < names.size(); ++i)
    gens[names[i]] = element_to_json(generators[i]);
  return {{"name", name}, {"summary", summary}, {"index", index.to_json()}, {"generators", gens}};
}

// ---------------------------------------------------------------------------

std::string_view to_string(ChainVerdict v) {
  switch (v) {
  case ChainVerdict::Compatible: return "compatible interleaving found";
  case ChainVerdict::Incompatible: return "incompatible";
  case ChainVerdict::Undetermined: return "undetermined at horizon";
  }
  return "undetermined at horizon";
}

nlohmann::json ChainReport::to_json() const {
  nlohmann::json j{{"verdict", std::string(to_string(verdict))}, {"horizon", horizon}};
  auto cuts = nlohmann::json::array();
  for (auto [side, level] : interleaving)
    cuts.push_back({{"side", side == 0 ? "n" : "n'"}, {"level", level}});
  j["interleaving"] = cuts;
  if (obstruction_prime) {
    j["obstruction"] = {{"prime", *obstruction_prime},
                        {"divides", obstruction_side == 0 ? "n" : "n'"},
                        {"never_divides", obstruction_side == 0 ? "n'" : "n"}};
  }
  return j;
}

ChainReport chain_compatibility(const SphericalIndex& n, const SphericalIndex& m,
                                std::size_t horizon) {
  if (horizon < 1)
    fail(ErrorKind::InvalidParams, "horizon must be at least 1");
  ChainReport rep;
  rep.horizon = horizon;

  // A prime dividing an entry of one side but no entry of the other can
  // never be absorbed into the other side's prefix products.
  const auto pn = n.prime_support();
  const auto pm = m.prime_support();
  std::set<std::uint64_t> all(pn.begin(), pn.end());
  all.insert(pm.begin(), pm.end());
  for (auto p : all) {
    if (pn.count(p) && !pm.count(p)) {
      rep.verdict = ChainVerdict::Incompatible;
      rep.obstruction_prime = p;
      rep.obstruction_side = 0;
      return rep;
    }
    if (pm.count(p) && !pn.count(p)) {
      rep.verdict = ChainVerdict::Incompatible;
      rep.obstruction_prime = p;
      rep.obstruction_side = 1;
      return rep;
    }
  }

  // Greedy: after cutting side s at level i, cut the other side at the first
  // level whose prefix product is divisible by the current one.
  const SphericalIndex* sides[2] = {&n, &m};
  BigInt prod[2] = {1, 1};
  std::size_t level[2] = {0, 0};
  int turn = 0;
  // start with the first level of n
  prod[0] = n.at(1);
  level[0] = 1;
  rep.interleaving.emplace_back(0, 1);
  const BigInt* need = &prod[0];
  turn = 1;
  while (true) {
    auto& lv = level[turn];
    auto& pr = prod[turn];
    bool found = false;
    while (lv < horizon) {
      ++lv;
      pr *= sides[turn]->at(lv);
      if (pr % *need == 0) {
        found = true;
        break;
      }
    }
    if (!found)
      break;
    rep.interleaving.emplace_back(turn, lv);
    need = &pr;
    turn ^= 1;
  }
  rep.verdict = rep.interleaving.size() >= 2 ? ChainVerdict::Compatible
                                             : ChainVerdict::Undetermined;
  return rep;
}

} // namespace cantor
