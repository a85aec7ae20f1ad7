#include "cantor/facts.hpp"

#include "cantor/dynamics.hpp"
#include "cantor/error.hpp"

#include <algorithm>

namespace cantor {

nlohmann::json Fact::to_json() const {
  return {{"id", id}, {"statement", statement}, {"pass", pass}, {"detail", detail}};
}

bool DihedralStabilizerCheck::pass() const {
  auto all = [](const std::vector<bool>& v) {
    return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
  };
  return all(contains_conjugate) && all(inside_subgroup) && pairwise_distinct;
}

DihedralStabilizerCheck dihedral_stabilizer_check(std::size_t max_n, std::size_t depth) {
  const auto entry = build_example("dihedral");
  const auto act = entry.action();
  DihedralStabilizerCheck out;
  for (std::size_t n = 0; n <= max_n; ++n) {
    Word x(depth, 0);
    for (std::size_t i = 0; i < n; ++i)
      x = act.act(act.parse("a"), x);
    GroupWord conj(n, 0);
    conj.push_back(2);
    conj.insert(conj.end(), n, 1);
    const auto target = act.evaluate(conj);
    const auto stab = point_stabilizer_ball(act, 2 * n + 2, BoundaryPrefix{x});
    bool contains = false, inside = true;
    for (const auto& w : stab) {
      const auto g = act.evaluate(w);
      const bool is_target = equal_to_depth(g, target, depth);
      contains = contains || is_target;
      inside = inside && (is_target || equal_to_depth(g, TreeAutomorphism::identity(act.index()),
                                                      depth));
    }
    out.stabilizers.push_back(stab);
    out.contains_conjugate.push_back(contains);
    out.inside_subgroup.push_back(inside);
  }
  out.pairwise_distinct = true;
  for (std::size_t i = 0; i < out.stabilizers.size(); ++i)
    for (std::size_t j = i + 1; j < out.stabilizers.size(); ++j)
      out.pairwise_distinct = out.pairwise_distinct && out.stabilizers[i] != out.stabilizers[j];
  return out;
}

namespace {

Fact make(std::string id, std::string statement, bool pass, nlohmann::json detail = {}) {
  return Fact{std::move(id), std::move(statement), pass, std::move(detail)};
}

std::vector<Fact> odometer_facts(const CatalogEntry& e) {
  const auto act = e.action();
  bool free = true;
  for (std::size_t level = 1; level <= 12; ++level)
    free = free && fixed_vertices(e.generator("a"), level).empty();
  bool powers_free = true;
  for (std::size_t k = 1; k <= 8; ++k) {
    GroupWord w(k, 0);
    const auto v2 = static_cast<std::size_t>(__builtin_ctzll(k));
    const auto g = act.evaluate(w);
    powers_free = powers_free && fixed_vertices(g, v2 + 1).empty() &&
                  fixed_vertices(g, v2).size() == e.index.level_size(v2);
  }
  return {make("odometer.free", "a fixes no vertex at levels 1..12", free),
           make("odometer.powers",
                "a^k fixes every vertex of level v2(k) and none of level v2(k)+1, k = 1..8",
                powers_free)};
}

std::vector<Fact> dihedral_facts() {
  const auto e = build_example("dihedral");
  const auto act = e.action();
  const auto stab0 = point_stabilizer_ball(act, 1, BoundaryPrefix{Word(16, 0)});
  std::vector<std::string> names;
  for (const auto& w : stab0)
    names.push_back(act.format(w));
  const auto check = dihedral_stabilizer_check();
  nlohmann::json sizes = nlohmann::json::array();
  for (const auto& s : check.stabilizers)
    sizes.push_back(s.size());
  std::vector<Fact> out{
      make("dihedral.zero", "the radius-1 stabilizer of the all-zeros point is {e, b}",
           names == std::vector<std::string>{"e", "b"}, {{"stabilizer", names}})};
  out.push_back(make("dihedral.conjugates",
                     "for n = 0..6 at depth 16 the stabilizer of a^n.0 within radius 2n+2 "
                     "contains a^n b a^-n and acts as a subgroup of order two",
                     std::all_of(check.contains_conjugate.begin(), check.contains_conjugate.end(),
                                 [](bool b) { return b; }) &&
                         std::all_of(check.inside_subgroup.begin(), check.inside_subgroup.end(),
                                     [](bool b) { return b; }),
                     {{"stabilizer_sizes", sizes}}));
  out.push_back(make("dihedral.distinct", "the seven stabilizer word sets differ pairwise",
                     check.pairwise_distinct));
  return out;
}

std::vector<Fact> grigorchuk_facts(const CatalogEntry& e) {
  std::vector<Fact> out;
  for (const auto& name : e.names) {
    const auto& g = e.generator(name);
    const auto closure = section_closure(g, 16);
    const auto cert = certify_nondegenerate(g);
    const auto replay = replay_certificate(g, cert);
    out.push_back(make("grigorchuk." + name,
                       "section closure of " + name +
                           " is bounded with at most 5 states and its certificate replays",
                       closure.bounded == Boundedness::Bounded && closure.sections.size() <= 5 &&
                           cert.certified && cert.alpha > 0 && replay.passed,
                       {{"closure_size", closure.sections.size()},
                        {"alpha", cert.certified ? rational_to_json(cert.alpha) : nullptr}}));
  }
  return out;
}

std::vector<Fact> large_swap_facts(const CatalogEntry& e) {
  const auto& b = e.generator("b");
  std::vector<Fact> out;
  const auto fixed = fixed_vertices(b, 2).size();
  std::size_t expected = 1;
  for (std::size_t j = 1; j <= 2; ++j)
    expected *= e.index.at(j) - 2;
  out.push_back(make("thm61_b.level2",
                     "the level-2 vertices fixed by b are those with every digit below n_j - 2",
                     fixed == expected, {{"fixed", fixed}, {"expected", expected}}));
  bool above = true, exact = true;
  nlohmann::json rows = nlohmann::json::array();
  RatioEngine engine;
  for (std::size_t l = 0; l <= 4; ++l) {
    const auto iv = certified_fix_interval(e.index, l, Rational(1, 1000000));
    const Rational bound = 1 - Rational(4, e.index.at(l + 1));
    above = above && iv.lower > bound && iv.width() < Rational(1, 1000000);
    rows.push_back({{"level", l},
                    {"lower", rational_to_json(iv.lower)},
                    {"upper", rational_to_json(iv.upper)},
                    {"bound", rational_to_json(bound)}});
    // the truncated product is the exact fixed measure at that depth below 0^l
    const auto window = std::min<std::size_t>(iv.truncation, l + 3);
    Rational product = 1;
    for (std::size_t j = l + 1; j <= window; ++j)
      product *= Rational(e.index.at(j) - 2, e.index.at(j));
    const auto r = nonfixed_ratio(b, Vertex{Word(l, 0)}, window, &engine);
    exact = exact && 1 - r.ratio == product;
  }
  out.push_back(make("thm61_b.bound",
                     "for l = 0..4 the fixed measure in U_l lies in an interval of width "
                     "below 1e-6 strictly above 1 - 4/n_(l+1)",
                     above, {{"rows", rows}}));
  out.push_back(make("thm61_b.product",
                     "the fixed measure at finite depth equals the product of (n_j - 2)/n_j",
                     exact));
  return out;
}

std::vector<Fact> every_level_facts(const CatalogEntry& e) {
  const auto& c = e.generator("c");
  bool ok = true;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t l = 1; l <= 4; ++l) {
    const auto r = nonfixed_ratio(c, every_level_w(l), l + 3);
    const Rational want(1, e.index.at(l + 2));
    ok = ok && r.ratio == want && r.resolved;
    rows.push_back({{"l", l}, {"ratio", rational_to_json(r.ratio)}});
  }
  return {make("ex44_c.ratios", "the moved proportion below 0^l 1 is 1/n_(l+2) for l = 1..4",
               ok, {{"rows", rows}})};
}

std::vector<Fact> doubling_facts(const CatalogEntry& e) {
  const auto& c = e.generator("c");
  const auto d = e.index.at(1);
  bool ok = true;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t k = 1; k <= 3; ++k) {
    const auto w = doubling_w(k);
    const std::size_t m = std::size_t{1} << k;
    const auto r = nonfixed_ratio(c, w, 2 * m + 1);
    Rational want = 1;
    for (std::size_t i = 0; i < m; ++i)
      want /= d;
    ok = ok && r.ratio == want && r.resolved;
    rows.push_back({{"k", k}, {"ratio", rational_to_json(r.ratio)}});
  }
  return {make("ex45_c.ratios", "the moved proportion below 0^(2^k - 1) 1 is d^(-2^k) for k = 1..3",
               ok, {{"rows", rows}})};
}

} // namespace

std::vector<Fact> known_facts(const std::string& name, const ExampleParams& params) {
  const auto e = build_example(name, params);
  if (name == "odometer")
    return odometer_facts(e);
  if (name == "dihedral")
    return dihedral_facts();
  if (name == "grigorchuk")
    return grigorchuk_facts(e);
  if (name == "thm61_b")
    return large_swap_facts(e);
  if (name == "ex44_c")
    return every_level_facts(e);
  if (name == "ex45_c")
    return doubling_facts(e);
  fail(ErrorKind::InvalidParams, "no recorded facts for '" + name + "'");
}

} // namespace cantor
