#include "cantor/cli.hpp"

#include "cantor/catalog.hpp"
#include "cantor/dynamics.hpp"
#include "cantor/error.hpp"
#include "cantor/facts.hpp"
#include "cantor/irs.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

namespace cantor::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  // global
  std::optional<std::size_t> depth;
  std::optional<std::size_t> radius;
  std::optional<std::uint64_t> cap;
  std::uint64_t seed = 0;
  bool json = false;
  std::string format;
  std::string output;
  // element and action selection
  std::string example;
  std::optional<std::uint64_t> d;
  std::string index;
  std::string gen;
  std::string element_file;
  std::string group_word;
  // verb parameters
  std::optional<std::size_t> k;
  std::optional<std::size_t> n;
  std::optional<std::size_t> level;
  std::optional<std::size_t> max_level;
  std::optional<std::size_t> margin;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> horizon;
  std::string word;
  std::string vertex;
  std::string point;
  std::string point2;
  std::string levels;
  std::string radii;
  std::string threshold;
  std::string tolerance;
  std::string index1;
  std::string index2;
  std::vector<std::string> positional;
};

// Output of one verb.
struct Result {
  nlohmann::json body;
  std::optional<std::string> dot;
  std::optional<std::string> table; ///< replaces the generic table
  int code = 0;
};

std::uint64_t level_cap(const Config& c) {
  std::uint64_t cap = kDefaultLevelCap;
  if (const char* env = std::getenv("CANTOR_LEVEL_CAP"); env && *env) {
    try {
      std::size_t used = 0;
      cap = std::stoull(env, &used);
      if (used != std::string(env).size())
        throw std::invalid_argument(env);
    } catch (const std::exception&) {
      throw UsageError("CANTOR_LEVEL_CAP must be a positive integer");
    }
  }
  if (c.cap)
    cap = *c.cap;
  if (cap == 0)
    throw UsageError("the level cap must be positive");
  return cap;
}

std::vector<std::uint64_t> parse_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty())
      continue;
    try {
      out.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw UsageError("not a number list: " + text);
    }
  }
  return out;
}

Rational parse_rational(const std::string& text) {
  try {
    const auto slash = text.find('/');
    if (slash == std::string::npos)
      return Rational(BigInt(text));
    return make_rational(BigInt(text.substr(0, slash)), BigInt(text.substr(slash + 1)));
  } catch (const std::exception&) {
    throw UsageError("not a rational: " + text);
  }
}

// JSON, or const:D, geom:P1,P2;R, ep:P1,P2;C1,C2
SphericalIndex parse_index(const std::string& text) {
  if (!text.empty() && text.front() == '{')
    return SphericalIndex::from_json(nlohmann::json::parse(text));
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw UsageError("index must be JSON or const:D, geom:PREFIX;R, ep:PREFIX;CYCLE");
  const auto kind = text.substr(0, colon);
  const auto rest = text.substr(colon + 1);
  const auto semi = rest.find(';');
  if (kind == "const") {
    const auto d = parse_list(rest);
    if (d.size() != 1)
      throw UsageError("const index takes one degree");
    return SphericalIndex::constant(d.front());
  }
  if (semi == std::string::npos)
    throw UsageError("index '" + text + "' needs PREFIX;TAIL");
  const auto prefix = parse_list(rest.substr(0, semi));
  const auto tail = parse_list(rest.substr(semi + 1));
  if (kind == "geom") {
    if (tail.size() != 1)
      throw UsageError("geometric index takes one ratio");
    return SphericalIndex::geometric(prefix, tail.front());
  }
  if (kind == "ep")
    return SphericalIndex::eventually_periodic(prefix, tail);
  throw UsageError("unknown index kind '" + kind + "'");
}

CatalogEntry entry_of(const Config& c) {
  if (c.example.empty())
    throw UsageError("--example is required");
  ExampleParams p;
  p.d = c.d;
  if (!c.index.empty())
    p.index = parse_index(c.index);
  return build_example(c.example, p);
}

GeneratedAction action_of(const Config& c) { return entry_of(c).action(); }

TreeAutomorphism element_of(const Config& c) {
  if (!c.element_file.empty()) {
    std::ifstream in(c.element_file);
    if (!in)
      fail(ErrorKind::Io, "cannot read " + c.element_file);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::InvalidElement, std::string("element file is not JSON: ") + e.what());
    }
    std::optional<SphericalIndex> idx;
    if (!c.index.empty())
      idx = parse_index(c.index);
    return element_from_json(j, idx);
  }
  const auto e = entry_of(c);
  if (!c.group_word.empty()) {
    const auto act = e.action();
    return act.evaluate(act.parse(c.group_word), level_cap(c));
  }
  if (!c.gen.empty())
    return e.generator(c.gen);
  return e.generators.back();
}

Word word_arg(const std::string& text, const char* flag) {
  if (text.empty())
    throw UsageError(std::string(flag) + " is required");
  if (text == "root" || text == "()")
    return {};
  try {
    return parse_word(text);
  } catch (const CantorError& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

std::size_t need(const std::optional<std::size_t>& v, std::size_t fallback) {
  return v ? *v : fallback;
}

nlohmann::json words_json(const GeneratedAction& act, const std::vector<GroupWord>& ws) {
  auto arr = nlohmann::json::array();
  for (const auto& w : ws)
    arr.push_back(act.format(w));
  return arr;
}

// ---------------------------------------------------------------------------
// verbs

Result cmd_catalog(const Config& c) {
  const std::string what = c.positional.empty() ? "list" : c.positional[0];
  Result r;
  if (what == "list") {
    auto arr = nlohmann::json::array();
    for (const auto& name : catalog_names()) {
      const auto e = build_example(name);
      arr.push_back({{"name", name}, {"summary", e.summary}, {"generators", e.names}});
    }
    r.body = {{"entries", arr}};
    return r;
  }
  if (c.positional.size() < 2 && c.example.empty())
    throw UsageError("catalog " + what + " needs an entry name");
  Config named = c;
  if (c.positional.size() >= 2)
    named.example = c.positional[1];
  if (what == "show") {
    r.body = entry_of(named).to_json();
    return r;
  }
  if (what == "facts") {
    ExampleParams p;
    p.d = c.d;
    if (!c.index.empty())
      p.index = parse_index(c.index);
    auto arr = nlohmann::json::array();
    bool all = true;
    for (const auto& f : known_facts(named.example, p)) {
      arr.push_back(f.to_json());
      all = all && f.pass;
    }
    r.body = {{"entry", named.example}, {"facts", arr}, {"all_pass", all}};
    r.code = all ? 0 : 1;
    return r;
  }
  throw UsageError("catalog takes list, show or facts");
}

Result cmd_apply(const Config& c) {
  const auto g = element_of(c);
  const auto w = word_arg(c.word, "--word");
  return {{{"element", describe(g)}, {"word", w}, {"image", cantor::apply(g, w)}}};
}

Result cmd_section(const Config& c) {
  const auto g = element_of(c);
  const auto v = word_arg(c.vertex, "--vertex");
  const auto s = section(g, Vertex{v});
  return {{{"vertex", v}, {"section", element_to_json(s)}, {"describe", describe(s)}}};
}

Result cmd_ball(const Config& c) {
  const auto act = action_of(c);
  const auto b = ball(act, need(c.radius, 2), need(c.depth, 8), BallOptions{level_cap(c), true});
  return {{{"radius", b.radius},
           {"dedup_depth", b.dedup_depth},
           {"exact", b.exact},
           {"count", b.words.size()},
           {"words", words_json(act, b.words)}}};
}

Result cmd_orbit(const Config& c) {
  const auto act = action_of(c);
  Result r;
  if (!c.vertex.empty()) {
    const auto v = word_arg(c.vertex, "--vertex");
    const auto orbit = level_orbit(act, Vertex{v}, level_cap(c));
    auto arr = nlohmann::json::array();
    for (const auto& u : orbit)
      arr.push_back(u.digits);
    const auto level_size = act.index().level_size(v.size());
    r.body = {{"vertex", v},
              {"size", orbit.size()},
              {"level_size", level_size.str()},
              {"transitive", BigInt(orbit.size()) == level_size},
              {"orbit", arr}};
    return r;
  }
  if (!c.level)
    throw UsageError("orbit needs --vertex or --level");
  r.body = {{"level", *c.level}, {"transitive", level_transitive(act, *c.level, level_cap(c))}};
  return r;
}

Result cmd_stabilizer(const Config& c) {
  const auto act = action_of(c);
  const auto x = word_arg(c.point, "--point");
  const auto words =
      point_stabilizer_ball(act, need(c.radius, 2), BoundaryPrefix{x}, BallOptions{level_cap(c), true});
  return {{{"point", x},
           {"radius", need(c.radius, 2)},
           {"count", words.size()},
           {"words", words_json(act, words)}}};
}

Result graph_result(const SchreierGraph& g) {
  Result r;
  r.body = {{"hash", canonical_hash(g)},
            {"vertices", g.vertices.size()},
            {"graph", canonical_json(g)}};
  r.dot = to_dot(g);
  return r;
}

Result cmd_schreier(const Config& c) {
  const auto act = action_of(c);
  if (!c.point.empty()) {
    const auto x = word_arg(c.point, "--point");
    auto r = graph_result(stabilizer_schreier_ball(act, BoundaryPrefix{x}, need(c.radius, 3), level_cap(c)));
    r.body["point"] = x;
    r.body["radius"] = need(c.radius, 3);
    return r;
  }
  const auto level = c.level ? *c.level : need(c.depth, 3);
  auto r = graph_result(schreier_level_graph(act, level, level_cap(c)));
  r.body["level"] = level;
  return r;
}

Result cmd_fixratio(const Config& c) {
  Config sel = c;
  Word v;
  std::size_t depth = 0;
  if (c.k) {
    if (c.example != "ex44_c" && c.example != "ex45_c")
      throw UsageError("--k selects the recorded vertex of ex44_c or ex45_c");
    if (sel.gen.empty() && sel.group_word.empty())
      sel.gen = "c";
    if (c.example == "ex45_c") {
      v = doubling_w(*c.k).digits;
      depth = (std::size_t{1} << (*c.k + 1)) + 1;
    } else {
      v = every_level_w(*c.k).digits;
      depth = *c.k + 3;
    }
  } else {
    v = word_arg(c.vertex, "--vertex");
    depth = v.size() + 8;
  }
  if (c.depth)
    depth = *c.depth;
  const auto g = element_of(sel);
  const auto res = nonfixed_ratio(g, Vertex{v}, depth);
  return {{{"element", describe(g)},
           {"vertex", v},
           {"depth", depth},
           {"ratio", rational_to_json(res.ratio)},
           {"resolved", res.resolved}}};
}

Result cmd_scan(const Config& c) {
  const auto g = element_of(c);
  ScanOptions o;
  o.max_level = need(c.max_level, o.max_level);
  o.margin = need(c.margin, o.margin);
  if (!c.threshold.empty())
    o.threshold = parse_rational(c.threshold);
  o.cap = level_cap(c);
  auto body = degeneracy_scan(g, o).to_json();
  body["element"] = describe(g);
  return {body};
}

Result cmd_certify(const Config& c) {
  const auto g = element_of(c);
  CertifyOptions o;
  o.cap = level_cap(c);
  const auto cert = certify_nondegenerate(g, o);
  const auto replay = replay_certificate(g, cert, need(c.samples, 100), need(c.max_level, 8),
                                         c.seed, level_cap(c));
  return {{{"element", describe(g)}, {"certificate", cert.to_json()}, {"replay", replay.to_json()}}};
}

Result cmd_holonomy(const Config& c) {
  const auto g = element_of(c);
  const auto x = word_arg(c.point, "--point");
  const auto depth = need(c.depth, x.size());
  auto body = holonomy_witness(g, BoundaryPrefix{x}, depth, need(c.margin, 4)).to_json();
  body["element"] = describe(g);
  return {body};
}

Result cmd_lqa(const Config& c) {
  const auto act = action_of(c);
  LqaOptions o;
  o.margin = need(c.margin, o.margin);
  o.cap = level_cap(c);
  const auto radius = need(c.radius, 2);
  const auto depth = need(c.depth, 9);
  auto body = lqa_to_json(act, lqa_witness_search(act, radius, depth, o));
  body["radius"] = radius;
  body["depth"] = depth;
  return {body};
}

Result cmd_distinct(const Config& c) {
  const auto act = action_of(c);
  DistinctStabilizerOptions o;
  o.cap = level_cap(c);
  o.margin = need(c.margin, o.margin);
  if (!c.point.empty())
    o.base_point = word_arg(c.point, "--point");
  const auto res =
      distinct_stabilizer_tree(act, need(c.radius, 4), need(c.depth, 17), need(c.n, 2), o);
  Result r{res.to_json(act)};
  r.code = res.all_pairs_separated() ? 0 : 1;
  return r;
}

Result cmd_density(const Config& c) {
  const auto g = element_of(c);
  const auto x = word_arg(c.point, "--point");
  std::vector<std::size_t> levels;
  for (auto l : parse_list(c.levels.empty() ? "0" : c.levels))
    levels.push_back(static_cast<std::size_t>(l));
  const auto depth = need(c.depth, x.size());
  auto arr = nlohmann::json::array();
  for (const auto& p : density_profile(g, BoundaryPrefix{x}, levels, depth))
    arr.push_back({{"level", p.level}, {"ratio", rational_to_json(p.ratio)}});
  Result r{{{"element", describe(g)}, {"point", x}, {"depth", depth}, {"profile", arr}}};
  if (!c.tolerance.empty()) {
    const auto& idx = g.index();
    auto ivs = nlohmann::json::array();
    for (auto l : levels) {
      const auto iv = certified_fix_interval(idx, l, parse_rational(c.tolerance));
      ivs.push_back({{"level", l},
                     {"truncation", iv.truncation},
                     {"lower", rational_to_json(iv.lower)},
                     {"upper", rational_to_json(iv.upper)}});
    }
    r.body["fix_intervals"] = ivs;
  }
  return r;
}

Result cmd_irs(const Config& c) {
  const auto act = action_of(c);
  const auto samples = need(c.samples ? c.samples : c.n, 100);
  const auto depth = need(c.depth, 32);
  std::vector<std::size_t> radii;
  if (!c.radii.empty())
    for (auto r : parse_list(c.radii))
      radii.push_back(static_cast<std::size_t>(r));
  else
    radii.push_back(need(c.radius, 3));
  std::vector<IrsSampleReport> runs;
  for (auto r : radii)
    runs.push_back(irs_empirical(act, samples, depth, r, c.seed, level_cap(c)));
  Result res;
  if (runs.size() == 1) {
    res.body = runs[0].to_json();
  } else {
    auto arr = nlohmann::json::array();
    for (const auto& r : runs)
      arr.push_back(r.to_json());
    res.body = {{"runs", arr}, {"atomicity", atomicity_report(runs).to_json()}};
  }
  res.dot = to_dot(runs.back().classes.front().representative);
  std::ostringstream t;
  for (const auto& run : runs) {
    t << "radius " << run.radius << ": " << run.classes.size() << " classes from "
      << run.samples << " samples (depth " << run.depth << ", seed " << run.seed << ")\n";
    t << "  hash              count  frequency\n";
    for (const auto& cl : run.classes)
      t << "  " << cl.hash << "  " << std::setw(5) << cl.count << "  " << to_string(cl.frequency)
        << "\n";
  }
  if (runs.size() > 1)
    t << "atomicity: " << atomicity_report(runs).verdict << " (empirical)\n";
  res.table = t.str();
  return res;
}

Result cmd_metric(const Config& c) {
  const auto act = action_of(c);
  const auto x = word_arg(c.point, "--point");
  const auto y = word_arg(c.point2, "--point2");
  const auto r = need(c.radius, 4);
  const auto d = schreier_metric(stabilizer_schreier_ball(act, BoundaryPrefix{x}, r, level_cap(c)),
                                 stabilizer_schreier_ball(act, BoundaryPrefix{y}, r, level_cap(c)), r);
  auto body = d.to_json();
  body["point"] = x;
  body["point2"] = y;
  body["verdict"] = d.indistinguishable()
                        ? "indistinguishable at scale (r = " + std::to_string(r) + ", L = " +
                              std::to_string(x.size()) + ")"
                        : "distance " + to_string(d.value());
  return {body};
}

Result cmd_chains(const Config& c) {
  if (c.index1.empty() || c.index2.empty())
    throw UsageError("chains needs --index1 and --index2");
  const auto rep = chain_compatibility(parse_index(c.index1), parse_index(c.index2),
                                       need(c.horizon, 20));
  return {rep.to_json()};
}

// ---------------------------------------------------------------------------
// output

// nlohmann sorts keys; rationals read better as num then den.
nlohmann::ordered_json ordered(const nlohmann::json& j) {
  if (j.is_object()) {
    nlohmann::ordered_json o = nlohmann::ordered_json::object();
    if (j.size() == 2 && j.contains("num") && j.contains("den")) {
      o["num"] = j["num"];
      o["den"] = j["den"];
      return o;
    }
    for (auto it = j.begin(); it != j.end(); ++it)
      o[it.key()] = ordered(it.value());
    return o;
  }
  if (j.is_array()) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& v : j)
      a.push_back(ordered(v));
    return a;
  }
  return nlohmann::ordered_json(j);
}

std::string scalar_text(const nlohmann::json& j) {
  if (j.is_string())
    return j.get<std::string>();
  if (j.is_object() && j.size() == 2 && j.contains("num") && j.contains("den")) {
    const auto den = j["den"].get<std::string>();
    return den == "1" ? j["num"].get<std::string>() : j["num"].get<std::string>() + "/" + den;
  }
  return j.dump();
}

bool flat(const nlohmann::json& j) {
  if (j.is_array())
    return std::all_of(j.begin(), j.end(), [](const auto& v) { return v.is_primitive(); });
  return j.is_primitive() || (j.is_object() && j.size() == 2 && j.contains("num") && j.contains("den"));
}

void table(const nlohmann::json& j, const std::string& prefix, std::ostream& out) {
  if (flat(j)) {
    out << prefix << ": ";
    if (j.is_array()) {
      if (j.empty())
        out << "(none)";
      for (std::size_t i = 0; i < j.size(); ++i)
        out << (i ? " " : "") << scalar_text(j[i]);
    } else {
      out << scalar_text(j);
    }
    out << "\n";
    return;
  }
  if (j.is_array()) {
    if (j.empty())
      out << prefix << ": (none)\n";
    for (std::size_t i = 0; i < j.size(); ++i)
      table(j[i], prefix + "[" + std::to_string(i) + "]", out);
    return;
  }
  for (auto it = j.begin(); it != j.end(); ++it)
    table(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
}

void add_globals(CLI::App* s, Config& c) {
  s->add_option("--depth,-L", c.depth, "working depth L");
  s->add_option("--radius,-r", c.radius, "word or graph ball radius");
  s->add_option("--cap", c.cap, "level cap (overrides CANTOR_LEVEL_CAP)");
  s->add_option("--seed", c.seed, "random seed")->capture_default_str();
  s->add_flag("--json", c.json, "JSON output");
  s->add_option("--format", c.format, "json, table or dot")
      ->check(CLI::IsMember({"json", "table", "dot"}));
  s->add_option("--output,-o", c.output, "write output to a file");
}

void add_action(CLI::App* s, Config& c) {
  s->add_option("--example", c.example, "catalog entry")->check(CLI::IsMember(catalog_names()));
  s->add_option("--d", c.d, "alphabet size for d-ary entries");
  s->add_option("--index", c.index, "spherical index: JSON, const:D, geom:P;R or ep:P;C");
}

void add_element(CLI::App* s, Config& c) {
  add_action(s, c);
  s->add_option("--gen", c.gen, "generator name (default: the entry's last generator)");
  s->add_option("--g", c.group_word, "group word in the entry's generators");
  s->add_option("--element", c.element_file, "element definition JSON file");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Finite-scale computations for group actions on spherically homogeneous trees",
               "cantor"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  std::map<std::string, std::function<Result(const Config&)>> verbs;

  auto verb = [&](const std::string& name, const std::string& help,
                  std::function<Result(const Config&)> fn) {
    auto* s = app.add_subcommand(name, help);
    add_globals(s, c);
    verbs[name] = std::move(fn);
    return s;
  };

  auto* s = verb("catalog", "list entries, show one, or check its recorded facts", cmd_catalog);
  s->add_option("what", c.positional, "list | show NAME | facts NAME");
  add_action(s, c);

  s = verb("apply", "apply an element to a vertex", cmd_apply);
  add_element(s, c);
  s->add_option("--word,-w", c.word, "digits, e.g. 0,1,0")->required();

  s = verb("section", "section of an element at a vertex", cmd_section);
  add_element(s, c);
  s->add_option("--vertex,-v", c.vertex, "digits")->required();

  s = verb("ball", "word ball, one word per element class", cmd_ball);
  add_action(s, c);

  s = verb("orbit", "orbit of a vertex or transitivity of a level", cmd_orbit);
  add_action(s, c);
  s->add_option("--vertex,-v", c.vertex, "digits");
  s->add_option("--level", c.level, "level");

  s = verb("stabilizer", "ball words fixing a point prefix", cmd_stabilizer);
  add_action(s, c);
  s->add_option("--point,-x", c.point, "digits")->required();

  s = verb("schreier", "level Schreier graph or stabilizer Schreier ball", cmd_schreier);
  add_action(s, c);
  s->add_option("--level", c.level, "level graph");
  s->add_option("--point,-x", c.point, "ball around this prefix");

  s = verb("fixratio", "proportion of a fixed cylinder moved at depth L", cmd_fixratio);
  add_element(s, c);
  s->add_option("--vertex,-v", c.vertex, "fixed vertex");
  s->add_option("--k", c.k, "recorded vertex of ex44_c (l) or ex45_c (k)");

  s = verb("scan", "degeneracy scan over fixed vertices", cmd_scan);
  add_element(s, c);
  s->add_option("--max-level", c.max_level, "deepest scanned level");
  s->add_option("--margin", c.margin, "truncation margin below each vertex");
  s->add_option("--threshold", c.threshold, "rational threshold, e.g. 1/100");

  s = verb("certify", "non-degeneracy certificate and its replay", cmd_certify);
  add_element(s, c);
  s->add_option("--samples", c.samples, "replay samples");
  s->add_option("--max-level", c.max_level, "replay level bound");

  s = verb("holonomy", "moved vertices near a fixed point", cmd_holonomy);
  add_element(s, c);
  s->add_option("--point,-x", c.point, "fixed point prefix")->required();
  s->add_option("--margin", c.margin, "search depth below each level");

  s = verb("lqa", "witnesses against local quasi-analyticity", cmd_lqa);
  add_action(s, c);
  s->add_option("--margin", c.margin, "levels kept below witnesses");

  s = verb("distinct", "points with pairwise distinct stabilizers", cmd_distinct);
  add_action(s, c);
  s->add_option("--n", c.n, "number of splitting stages (2^n points)");
  s->add_option("--point,-x", c.point, "base point");
  s->add_option("--margin", c.margin, "levels kept below fixed cylinders");

  s = verb("density", "fixed-set density around a point", cmd_density);
  add_element(s, c);
  s->add_option("--point,-x", c.point, "fixed point prefix")->required();
  s->add_option("--levels", c.levels, "levels, e.g. 0,1,2");
  s->add_option("--tolerance", c.tolerance, "also bracket the limit density (geometric index)");

  s = verb("irs", "empirical stabilizer distribution", cmd_irs);
  add_action(s, c);
  s->add_option("--n,--samples", c.samples, "sample count");
  s->add_option("--radii", c.radii, "several radii, e.g. 2,3,4,5");

  s = verb("metric", "Schreier distance between two point stabilizers", cmd_metric);
  add_action(s, c);
  s->add_option("--point,-x", c.point, "first prefix")->required();
  s->add_option("--point2,-y", c.point2, "second prefix")->required();

  s = verb("chains", "interleaving of two group chains", cmd_chains);
  s->add_option("--index1", c.index1, "first index")->required();
  s->add_option("--index2", c.index2, "second index")->required();
  s->add_option("--horizon", c.horizon, "levels searched");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "cantor: usage: " << e.what() << "\n";
    return 2;
  }

  const auto* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  std::string format = c.json ? "json" : (c.format.empty() ? "table" : c.format);
  try {
    auto r = verbs.at(name)(c);
    std::ostringstream text;
    if (format == "json") {
      nlohmann::ordered_json j;
      j["schema_version"] = kSchemaVersion;
      j["command"] = name;
      auto body = ordered(r.body);
      if (body.is_object()) {
        for (auto it = body.begin(); it != body.end(); ++it)
          j[it.key()] = it.value();
      } else {
        j["result"] = body;
      }
      text << j.dump() << "\n";
    } else if (format == "dot") {
      if (!r.dot)
        throw UsageError(name + " has no DOT output");
      text << *r.dot;
    } else if (r.table) {
      text << *r.table;
    } else {
      table(r.body, "", text);
    }
    if (c.output.empty()) {
      out << text.str();
    } else {
      std::ofstream f(c.output, std::ios::binary);
      if (!(f << text.str()))
        fail(ErrorKind::Io, "cannot write " + c.output);
    }
    return r.code;
  } catch (const UsageError& e) {
    err << "cantor: usage: " << e.what() << "\n";
    return 2;
  } catch (const CantorError& e) {
    err << "cantor: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    err << "cantor: invalid_params: " << e.what() << "\n";
    return 1;
  }
}

} // namespace cantor::cli
