#include "cantor/dynamics.hpp"

#include "cantor/error.hpp"
#include "cantor/random.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <unordered_map>

namespace cantor {

namespace {

struct Key {
  TreeAutomorphism h;
  std::size_t remaining;
};
struct KeyHash {
  std::size_t operator()(const Key& k) const {
    return k.h.state_hash() * 0x9e3779b97f4a7c15ULL + k.remaining;
  }
};
struct KeyEq {
  bool operator()(const Key& a, const Key& b) const {
    return a.remaining == b.remaining && a.h.same_state(b.h);
  }
};

Word prefix(const Word& w, std::size_t len) {
  return Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(len));
}

Word extend(Word w, Digit k) {
  w.push_back(k);
  return w;
}

nlohmann::json word_json(const Word& w) { return nlohmann::json(w); }

} // namespace

// ---------------------------------------------------------------------------
// RatioEngine

struct RatioEngine::Impl {
  std::uint64_t work_limit;
  std::uint64_t work = 0;
  std::unordered_map<Key, Value, KeyHash, KeyEq> memo;
  const Value zero_resolved{0, true};
  const Value zero_open{0, false};
  const Value one_resolved{1, true};
};

RatioEngine::RatioEngine(std::uint64_t work_limit) : impl_(std::make_unique<Impl>()) {
  impl_->work_limit = work_limit;
}

RatioEngine::~RatioEngine() = default;

const RatioEngine::Value& RatioEngine::moved_fraction(const TreeAutomorphism& h,
                                                      std::size_t remaining) {
  auto& im = *impl_;
  if (h.known_identity() == std::optional<bool>(true))
    return im.zero_resolved;
  if (remaining == 0)
    return im.zero_open;
  if (h.moves_every_point())
    return im.one_resolved;
  if (auto dd = h.defined_depth(); dd && *dd == 0)
    return im.zero_open;
  Key key{h, remaining};
  if (auto it = im.memo.find(key); it != im.memo.end())
    return it->second;

  const auto n = h.alphabet(1);
  std::uint64_t ones = 0;
  std::vector<std::pair<const Value*, std::uint64_t>> counts;
  std::optional<TreeAutomorphism> prev;
  const Value* prev_value = nullptr;
  for (Digit k = 0; k < n; ++k) {
    if (++im.work > im.work_limit)
      fail(ErrorKind::CapExceeded, "moved-measure computation exceeds its work limit");
    auto [out, s] = h.step(k);
    if (out != k) {
      ++ones;
      continue;
    }
    const Value* v;
    if (prev && s.same_state(*prev)) {
      v = prev_value;
    } else {
      v = &moved_fraction(s, remaining - 1);
      prev = std::move(s);
      prev_value = v;
    }
    auto it = std::find_if(counts.begin(), counts.end(),
                           [&](const auto& c) { return c.first == v; });
    if (it == counts.end())
      counts.emplace_back(v, 1);
    else
      ++it->second;
  }
  Value result{Rational(ones), true};
  for (const auto& [v, c] : counts) {
    result.moved += v->moved * c;
    result.resolved = result.resolved && v->resolved;
  }
  result.moved /= n;
  return im.memo.emplace(std::move(key), std::move(result)).first->second;
}

// ---------------------------------------------------------------------------

bool fixes(const TreeAutomorphism& g, const Word& w) { return cantor::apply(g, w) == w; }

namespace {

// Visits every fixed level-`level` vertex in lex order with its section.
void for_each_fixed(const TreeAutomorphism& g, std::size_t level, std::uint64_t cap,
                    const std::function<void(const Word&, const TreeAutomorphism&)>& fn) {
  std::uint64_t visited = 0;
  Word path;
  std::function<void(const TreeAutomorphism&)> rec = [&](const TreeAutomorphism& h) {
    if (++visited > cap)
      fail(ErrorKind::CapExceeded, "fixed-vertex enumeration exceeds the cap");
    if (path.size() == level) {
      fn(path, h);
      return;
    }
    const auto n = h.alphabet(1);
    for (Digit k = 0; k < n; ++k) {
      auto [out, s] = h.step(k);
      if (out != k)
        continue;
      path.push_back(k);
      rec(s);
      path.pop_back();
    }
  };
  rec(g);
}

} // namespace

std::vector<Vertex> fixed_vertices(const TreeAutomorphism& g, std::size_t level,
                                   std::uint64_t cap) {
  std::vector<Vertex> out;
  for_each_fixed(g, level, cap, [&](const Word& w, const TreeAutomorphism&) {
    out.push_back(Vertex{w});
  });
  return out;
}

RatioResult nonfixed_ratio(const TreeAutomorphism& g, const Vertex& v, std::size_t depth,
                           RatioEngine* engine) {
  if (depth < v.level())
    fail(ErrorKind::InvalidParams, "truncation depth is above the vertex");
  if (!fixes(g, v.digits))
    fail(ErrorKind::NotFixed, "element does not fix vertex " + word_to_string(v.digits));
  RatioEngine local;
  RatioEngine& eng = engine ? *engine : local;
  const auto& val = eng.moved_fraction(section(g, v), depth - v.level());
  return RatioResult{val.moved, val.resolved, depth};
}

// ---------------------------------------------------------------------------
// Degeneracy scan

std::string DegeneracyReport::verdict() const {
  if (refuting)
    return "refutes alpha >= " + to_string(threshold);
  return "no refutation up to level " + std::to_string(max_level);
}

nlohmann::json DegeneracyReport::to_json() const {
  auto ws = nlohmann::json::array();
  for (const auto& w : witnesses)
    ws.push_back({{"vertex", word_json(w.vertex.digits)},
                  {"ratio", rational_to_json(w.ratio)},
                  {"resolved", w.resolved},
                  {"truncation_depth", w.truncation_depth}});
  nlohmann::json j{{"verdict", verdict()},
                   {"refutes", refutes()},
                   {"threshold", rational_to_json(threshold)},
                   {"max_level", max_level},
                   {"witnesses", ws},
                   {"witnesses_total", witnesses_total},
                   {"min_ratio", min_ratio ? rational_to_json(*min_ratio) : nlohmann::json()}};
  if (refuting)
    j["refuting_vertex"] = {{"vertex", word_json(refuting->vertex.digits)},
                            {"ratio", rational_to_json(refuting->ratio)},
                            {"truncation_depth", refuting->truncation_depth}};
  return j;
}

DegeneracyReport degeneracy_scan(const TreeAutomorphism& g, const ScanOptions& options) {
  DegeneracyReport rep;
  rep.threshold = options.threshold;
  rep.max_level = options.max_level;
  RatioEngine engine;
  for (std::size_t level = 0; level <= options.max_level; ++level) {
    const auto L = level + options.margin;
    for_each_fixed(g, level, options.cap, [&](const Word& w, const TreeAutomorphism& h) {
      if (h.known_identity() == std::optional<bool>(true))
        return;
      const auto& val = engine.moved_fraction(h, options.margin);
      if (val.moved == 0)
        return;
      DegeneracyWitness dw{Vertex{w}, val.moved, val.resolved, L};
      ++rep.witnesses_total;
      if (!rep.min_ratio || val.moved < *rep.min_ratio)
        rep.min_ratio = val.moved;
      if (!rep.refuting && val.resolved && val.moved < options.threshold)
        rep.refuting = dw;
      if (rep.witnesses.size() < options.list_limit)
        rep.witnesses.push_back(std::move(dw));
    });
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Certification

nlohmann::json Certificate::to_json() const {
  nlohmann::json j{{"certified", certified}};
  if (certified) {
    j["alpha"] = rational_to_json(alpha);
    j["method"] = method;
    j["witness_depth"] = witness_depth;
  } else {
    j["reason"] = reason;
  }
  j["evidence"] = evidence;
  return j;
}

Certificate certify_nondegenerate(const TreeAutomorphism& g, const CertifyOptions& options) {
  Certificate cert;
  if (g.known_identity() == std::optional<bool>(true)) {
    cert.certified = true;
    cert.alpha = 1;
    cert.method = "AutomatonClosure";
    cert.witness_depth = 0;
    cert.evidence = {{"sections", nlohmann::json::array()},
                     {"note", "identity: no fixed vertex with non-identity restriction"}};
    return cert;
  }
  const auto closure = section_closure(g, options.state_bound, options.depth_bound,
                                       options.depth_bound, options.cap);
  const bool exact = closure.bounded == Boundedness::Bounded;
  const bool stabilized = closure.bounded == Boundedness::Unknown &&
                          closure.sections.size() < options.state_bound &&
                          closure.depth_explored < options.depth_bound;
  cert.evidence["closure_size"] = closure.sections.size();
  cert.evidence["closure"] = std::string(to_string(closure.bounded));
  if (!exact && !stabilized) {
    cert.reason = "section closure did not stabilise within " +
                  std::to_string(options.state_bound) + " sections";
    return cert;
  }

  auto sections = nlohmann::json::array();
  std::optional<Rational> alpha;
  std::size_t k_max = 0;
  for (const auto& h : closure.sections) {
    if (h.known_identity() == std::optional<bool>(true))
      continue;
    nlohmann::json entry{{"section", describe(h)}};
    Rational a;
    std::size_t k;
    if (h.moves_every_point()) {
      a = 1;
      k = 1;
      entry["moves_every_point"] = true;
    } else {
      auto w = minimal_moved_vertex(h, options.search_depth, options.cap);
      if (!w) {
        if (h.known_identity() == std::optional<bool>(false)) {
          cert.reason = "no moved vertex within the search depth for " + describe(h);
          return cert;
        }
        entry["identity_to_search_depth"] = true;
        sections.push_back(entry);
        continue;
      }
      a = cylinder_measure(h.index(), *w);
      k = w->level();
      entry["minimal_moved_vertex"] = word_json(w->digits);
    }
    entry["alpha_i"] = rational_to_json(a);
    sections.push_back(entry);
    if (!alpha || a < *alpha)
      alpha = a;
    k_max = std::max(k_max, k);
  }
  cert.evidence["sections"] = sections;
  cert.evidence["K_g"] = k_max;
  cert.witness_depth = k_max;
  if (auto m = g.index().bound())
    cert.evidence["M"] = *m;

  if (exact) {
    cert.certified = true;
    cert.method = "AutomatonClosure";
    cert.alpha = alpha.value_or(Rational(1));
    return cert;
  }
  auto m = g.index().bound();
  if (!m) {
    cert.reason = "index is unbounded and the closure is not exact";
    return cert;
  }
  cert.certified = true;
  cert.method = "BoundedIndex";
  cert.evidence["closure_stabilised_at_depth"] = options.depth_bound;
  Rational a = 1;
  for (std::size_t i = 0; i < k_max; ++i)
    a /= *m;
  cert.alpha = a;
  return cert;
}

nlohmann::json ReplayReport::to_json() const {
  auto f = nlohmann::json::array();
  for (const auto& v : failures)
    f.push_back(word_json(v.digits));
  return {{"candidates", candidates},
          {"checked", checked},
          {"passed", passed},
          {"min_ratio", min_ratio ? rational_to_json(*min_ratio) : nlohmann::json()},
          {"failures", f}};
}

ReplayReport replay_certificate(const TreeAutomorphism& g, const Certificate& cert,
                                std::size_t samples, std::size_t max_level,
                                std::uint64_t seed, std::uint64_t cap) {
  ReplayReport rep;
  if (!cert.certified) {
    rep.passed = false;
    return rep;
  }
  std::vector<Word> candidates;
  for (std::size_t level = 1; level <= max_level; ++level)
    for_each_fixed(g, level, cap, [&](const Word& w, const TreeAutomorphism& h) {
      if (h.known_identity() != std::optional<bool>(true))
        candidates.push_back(w);
    });
  rep.candidates = candidates.size();
  if (candidates.empty())
    return rep;
  RatioEngine engine;
  CounterStream rng(seed, 0);
  for (std::size_t i = 0; i < samples; ++i) {
    const auto& w = candidates[rng.uniform(candidates.size())];
    const auto r =
        nonfixed_ratio(g, Vertex{w}, w.size() + std::max<std::size_t>(cert.witness_depth, 1),
                       &engine);
    ++rep.checked;
    if (!rep.min_ratio || r.ratio < *rep.min_ratio)
      rep.min_ratio = r.ratio;
    if (r.ratio < cert.alpha) {
      rep.passed = false;
      rep.failures.push_back(Vertex{w});
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Holonomy

bool HolonomyReport::nontrivial() const {
  return std::all_of(witnesses.begin(), witnesses.end(),
                     [](const auto& w) { return w.has_value(); });
}

std::string HolonomyReport::verdict() const {
  return nontrivial() ? "non-trivial holonomy to depth " + std::to_string(depth)
                      : "trivial at scale";
}

nlohmann::json HolonomyReport::to_json() const {
  auto ws = nlohmann::json::array();
  for (std::size_t l = 0; l < witnesses.size(); ++l)
    ws.push_back({{"level", l},
                  {"moved_vertex",
                   witnesses[l] ? word_json(witnesses[l]->digits) : nlohmann::json()}});
  return {{"verdict", verdict()}, {"depth", depth}, {"margin", margin}, {"levels", ws}};
}

HolonomyReport holonomy_witness(const TreeAutomorphism& g, const BoundaryPrefix& x,
                                std::size_t depth, std::size_t margin) {
  if (x.depth() < depth)
    fail(ErrorKind::InvalidParams, "point prefix is shorter than the requested depth");
  const auto xl = prefix(x.digits, depth);
  if (!fixes(g, xl))
    fail(ErrorKind::NotFixed, "element does not fix the point");
  HolonomyReport rep;
  rep.depth = depth;
  rep.margin = margin;
  TreeAutomorphism h = g;
  for (std::size_t l = 0; l <= depth; ++l) {
    if (l > 0)
      h = h.step(xl[l - 1]).second;
    auto w = minimal_moved_vertex(h, margin);
    if (w) {
      Word full = prefix(xl, l);
      full.insert(full.end(), w->digits.begin(), w->digits.end());
      rep.witnesses.emplace_back(Vertex{full});
    } else {
      rep.witnesses.emplace_back(std::nullopt);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// LQA witnesses

std::vector<LqaWitness> lqa_witness_search(const GeneratedAction& action, std::size_t radius,
                                           std::size_t depth, const LqaOptions& options) {
  std::vector<LqaWitness> out;
  if (depth < options.margin)
    return out;
  const auto B = ball(action, radius, depth, BallOptions{options.cap, true});
  RatioEngine engine;
  const std::size_t max_level = depth - options.margin;
  for (const auto& word : B.words) {
    if (word.empty())
      continue;
    const auto g = action.evaluate(word, options.cap);
    if (engine.identity_to_depth(g, depth))
      continue;
    std::vector<LqaWitness> found;
    std::uint64_t visited = 0;
    Word path;
    std::function<void(const TreeAutomorphism&)> dfs = [&](const TreeAutomorphism& h) {
      const auto n = h.alphabet(1);
      for (Digit k = 0; k < n; ++k) {
        if (++visited > options.cap)
          fail(ErrorKind::CapExceeded, "witness search exceeds the cap");
        auto [out_digit, s] = h.step(k);
        if (out_digit != k)
          continue;
        const auto level = path.size() + 1;
        if (engine.identity_to_depth(s, depth - level)) {
          if (level <= max_level)
            found.push_back({word, Vertex{path}, Vertex{extend(path, k)}, depth});
        } else if (level < max_level) {
          path.push_back(k);
          dfs(s);
          path.pop_back();
        }
      }
    };
    dfs(g);
    std::stable_sort(found.begin(), found.end(), [](const LqaWitness& a, const LqaWitness& b) {
      if (a.V.level() != b.V.level())
        return a.V.level() < b.V.level();
      return a.V.digits < b.V.digits;
    });
    if (found.size() > options.per_element)
      found.resize(options.per_element);
    for (auto& w : found) {
      if (out.size() >= options.limit)
        return out;
      out.push_back(std::move(w));
    }
  }
  return out;
}

nlohmann::json lqa_to_json(const GeneratedAction& action, const std::vector<LqaWitness>& ws) {
  auto arr = nlohmann::json::array();
  for (const auto& w : ws)
    arr.push_back({{"g", action.format(w.g)},
                   {"U", word_json(w.U.digits)},
                   {"V", word_json(w.V.digits)},
                   {"depth", w.depth}});
  return {{"witnesses", arr},
          {"count", ws.size()},
          {"verdict", ws.empty() ? "no witness at this scale" : "not LQA at this scale"}};
}

// ---------------------------------------------------------------------------
// Distinct stabilizers

bool DistinctStabilizerResult::all_pairs_separated() const {
  return std::all_of(pairs.begin(), pairs.end(), [](const PairCheck& p) {
    return p.in_first != p.in_second && p.distinct_sets;
  });
}

nlohmann::json DistinctStabilizerResult::to_json(const GeneratedAction& action) const {
  auto pts = nlohmann::json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    pts.push_back({{"label", p.label},
                   {"point", word_json(p.y.digits)},
                   {"reached_by", action.format(p.reached_by)},
                   {"cylinder", word_json(p.cylinder.digits)},
                   {"stabilizer_size", stabilizers.size() > i ? stabilizers[i].size() : 0}});
  }
  auto seps = nlohmann::json::array();
  for (const auto& s : separators)
    seps.push_back({{"split", s.prefix},
                    {"g", action.format(s.g)},
                    {"fixed_cylinder", word_json(s.fixed_cylinder.digits)},
                    {"moved_cylinder", word_json(s.moved_cylinder.digits)}});
  auto prs = nlohmann::json::array();
  for (const auto& p : pairs)
    prs.push_back({{"first", points[p.i].label},
                   {"second", points[p.j].label},
                   {"separator", action.format(p.separator)},
                   {"in_first", p.in_first},
                   {"in_second", p.in_second},
                   {"distinct_stabilizers", p.distinct_sets}});
  return {{"radius", radius},
          {"depth", depth},
          {"n", levels},
          {"points", pts},
          {"separators", seps},
          {"pairs", prs},
          {"all_pairs_separated", all_pairs_separated()}};
}

DistinctStabilizerResult distinct_stabilizer_tree(const GeneratedAction& action,
                                                  std::size_t radius, std::size_t depth,
                                                  std::size_t n,
                                                  const DistinctStabilizerOptions& options) {
  const auto& index = action.index();
  Word base;
  if (options.base_point) {
    base = *options.base_point;
    if (base.size() != depth)
      fail(ErrorKind::InvalidParams, "base point must have the working depth");
  } else {
    for (std::size_t l = 1; l <= depth; ++l)
      base.push_back(index.at(l) - 1);
  }
  validate_word(index, base);

  DistinctStabilizerResult res;
  res.radius = radius;
  res.depth = depth;
  res.levels = n;
  res.points.push_back({"", BoundaryPrefix{base}, {}, Vertex{}});
  if (n == 0)
    return res;

  const auto B = ball(action, radius, depth, BallOptions{options.cap, true});
  std::vector<std::optional<TreeAutomorphism>> elems(B.words.size());
  auto element = [&](std::size_t i) -> const TreeAutomorphism& {
    if (!elems[i])
      elems[i] = action.evaluate(B.words[i], options.cap);
    return *elems[i];
  };
  RatioEngine engine;
  const std::size_t max_fixed_level = depth > options.margin ? depth - options.margin : 0;

  // shortest word moving the base point into a cylinder
  std::map<Word, std::pair<Word, Letter>> parent;
  std::deque<Word> queue;
  auto reach = [&](const Vertex& target) -> std::pair<Word, GroupWord> {
    if (parent.empty()) {
      parent.emplace(base, std::make_pair(Word{}, Letter{0}));
      queue.push_back(base);
    }
    auto inside = [&](const Word& w) {
      return std::equal(target.digits.begin(), target.digits.end(), w.begin());
    };
    auto path_of = [&](Word w) {
      GroupWord g;
      Word y = w;
      while (w != base) {
        const auto& [prev, l] = parent.at(w);
        g.push_back(l);
        w = prev;
      }
      return std::make_pair(y, g);
    };
    // earlier BFS layers may already hold a point inside the target
    Word best;
    bool have = false;
    for (const auto& [w, _] : parent)
      if (inside(w)) {
        // prefer the shortest word; ties by the word itself
        if (!have || path_of(w).second.size() < path_of(best).second.size()) {
          best = w;
          have = true;
        }
      }
    while (!have && !queue.empty()) {
      auto w = std::move(queue.front());
      queue.pop_front();
      for (Letter l = 0; l < action.letter_count(); ++l) {
        auto y = action.act_letter(l, w);
        if (parent.emplace(y, std::make_pair(w, l)).second) {
          if (parent.size() > options.cap)
            fail(ErrorKind::CapExceeded, "orbit search exceeds the cap");
          queue.push_back(y);
          if (!have && inside(y)) {
            best = y;
            have = true;
          }
        }
      }
    }
    if (!have)
      fail(ErrorKind::SearchExhausted,
           "no orbit point of the base point enters " + word_to_string(target.digits));
    return path_of(best);
  };

  using Point = DistinctStabilizerResult::Point;
  using Separator = DistinctStabilizerResult::Separator;
  struct Subtree {
    std::vector<Point> points;
    std::vector<Separator> separators;
  };
  // Splits p, then its halves, `stages` times. Subtrees of different points
  // are independent, so a failed half only sends us to p's next splitter.
  std::string stuck;
  std::function<std::optional<Subtree>(const Point&, std::size_t)> grow =
      [&](const Point& p, std::size_t stages) -> std::optional<Subtree> {
    if (stages == 0)
      return Subtree{{p}, {}};
    for (std::size_t i = 1; i < B.words.size(); ++i) {
      const auto& g = element(i);
      if (!fixes(g, p.y.digits))
        continue;
      // W0: the largest cylinder around y inside W on which g is the identity
      std::optional<Vertex> w0;
      TreeAutomorphism h = section(g, p.cylinder);
      for (std::size_t l = p.cylinder.level() + 1; l <= max_fixed_level; ++l) {
        h = h.step(p.y.digits[l - 1]).second;
        if (engine.identity_to_depth(h, depth - l)) {
          w0 = Vertex{prefix(p.y.digits, l)};
          break;
        }
      }
      if (!w0)
        continue;
      // W1: the first vertex below W (level order, then lex) that g moves
      std::optional<Vertex> w1;
      std::vector<std::pair<Word, TreeAutomorphism>> frontier{
          {p.cylinder.digits, section(g, p.cylinder)}};
      while (!frontier.empty() && !w1) {
        std::vector<std::pair<Word, TreeAutomorphism>> deeper;
        for (const auto& [v, hv] : frontier) {
          if (v.size() >= depth)
            continue;
          const auto nv = hv.alphabet(1);
          for (Digit k = 0; k < nv && !w1; ++k) {
            auto [out, s] = hv.step(k);
            if (out != k) {
              w1 = Vertex{extend(v, k)};
            } else if (!engine.identity_to_depth(s, depth - v.size() - 1)) {
              deeper.emplace_back(extend(v, k), std::move(s));
              if (deeper.size() > options.cap)
                fail(ErrorKind::CapExceeded, "cylinder search exceeds the cap");
            }
          }
          if (w1)
            break;
        }
        frontier = std::move(deeper);
      }
      if (!w1)
        continue;
      auto [y1, word1] = reach(*w1);
      auto left = grow({p.label + "0", p.y, p.reached_by, *w0}, stages - 1);
      if (!left)
        continue;
      auto right = grow({p.label + "1", BoundaryPrefix{y1}, word1, *w1}, stages - 1);
      if (!right)
        continue;
      Subtree t;
      t.separators.push_back({p.label, B.words[i], *w0, *w1});
      for (auto* part : {&*left, &*right}) {
        t.points.insert(t.points.end(), part->points.begin(), part->points.end());
        t.separators.insert(t.separators.end(), part->separators.begin(),
                            part->separators.end());
      }
      return t;
    }
    if (stuck.empty())
      stuck = p.label;
    return std::nullopt;
  };

  auto tree = grow(res.points.front(), n);
  if (!tree)
    fail(ErrorKind::SearchExhausted,
         "no splitting element for point '" + stuck + "' at radius " + std::to_string(radius) +
             ", depth " + std::to_string(depth));
  res.points = std::move(tree->points);
  res.separators = std::move(tree->separators);

  for (const auto& p : res.points)
    res.stabilizers.push_back(stabilizer_words(action, B, p.y.digits));
  auto contains = [](const std::vector<GroupWord>& s, const GroupWord& w) {
    return std::find(s.begin(), s.end(), w) != s.end();
  };
  for (std::size_t i = 0; i < res.points.size(); ++i)
    for (std::size_t j = i + 1; j < res.points.size(); ++j) {
      const auto& a = res.points[i].label;
      const auto& b = res.points[j].label;
      std::size_t s = 0;
      while (a[s] == b[s])
        ++s;
      const auto split = a.substr(0, s);
      auto sep = std::find_if(res.separators.begin(), res.separators.end(),
                              [&](const auto& x) { return x.prefix == split; });
      DistinctStabilizerResult::PairCheck pc;
      pc.i = i;
      pc.j = j;
      pc.separator = sep->g;
      pc.in_first = contains(res.stabilizers[i], sep->g);
      pc.in_second = contains(res.stabilizers[j], sep->g);
      pc.distinct_sets = res.stabilizers[i] != res.stabilizers[j];
      res.pairs.push_back(pc);
    }
  return res;
}

// ---------------------------------------------------------------------------

std::vector<DensityPoint> density_profile(const TreeAutomorphism& g, const BoundaryPrefix& x,
                                          const std::vector<std::size_t>& levels,
                                          std::size_t depth) {
  if (!fixes(g, x.digits))
    fail(ErrorKind::NotFixed, "element does not fix the point");
  RatioEngine engine;
  std::vector<DensityPoint> out;
  for (auto l : levels) {
    if (l > x.depth() || l > depth)
      fail(ErrorKind::InvalidParams, "level " + std::to_string(l) + " is below the prefix");
    const auto& v = engine.moved_fraction(section(g, Vertex{prefix(x.digits, l)}), depth - l);
    out.push_back({l, 1 - v.moved});
  }
  return out;
}

FixInterval certified_fix_interval(const SphericalIndex& index, std::size_t level,
                                   const Rational& tolerance) {
  if (index.mode() != SphericalIndex::Mode::Geometric)
    fail(ErrorKind::InvalidParams, "the tail bound needs a geometric index");
  const auto r = index.ratio();
  FixInterval iv;
  iv.level = level;
  Rational product = 1;
  std::size_t k = level;
  for (;;) {
    if (k >= index.prefix().size()) {
      // sum_{j>k} 2/n_j = (2/n_{k+1}) * r/(r-1) once the sequence is geometric
      const Rational tail = Rational(2 * r) / (Rational(index.at(k + 1)) * (r - 1));
      if (tail < tolerance) {
        iv.truncation = k;
        iv.upper = product;
        iv.lower = product - tail;
        return iv;
      }
    }
    ++k;
    const auto n = index.at(k);
    product *= Rational(n - 2, n);
  }
}

} // namespace cantor
