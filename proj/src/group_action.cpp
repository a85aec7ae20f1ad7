#include "cantor/group_action.hpp"

#include "cantor/error.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

namespace cantor {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Hash128 {
  std::uint64_t lo = 0, hi = 0;
  friend bool operator==(const Hash128&, const Hash128&) = default;
};

struct Hash128Hasher {
  std::size_t operator()(const Hash128& h) const { return h.lo ^ (h.hi * 31); }
};

Hash128 hash_perm(const std::vector<std::uint32_t>& perm) {
  Hash128 h{0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL};
  for (auto v : perm) {
    h.lo = splitmix(h.lo ^ v);
    h.hi = splitmix(h.hi + v * 0xff51afd7ed558ccdULL);
  }
  return h;
}

// Image of the level-L permutation of u*s, given those of u and s.
std::vector<std::uint32_t> compose_perm(const std::vector<std::uint32_t>& u,
                                        const std::vector<std::uint32_t>& s) {
  std::vector<std::uint32_t> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    out[i] = u[s[i]];
  return out;
}

} // namespace

GeneratedAction::GeneratedAction(SphericalIndex index, std::vector<std::string> names,
                                 std::vector<TreeAutomorphism> generators)
    : index_(std::move(index)), names_(std::move(names)) {
  if (names_.size() != generators.size())
    fail(ErrorKind::InvalidElement, "generator names and elements differ in number");
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty())
      fail(ErrorKind::InvalidElement, "empty generator name");
    for (std::size_t j = 0; j < i; ++j)
      if (names_[i] == names_[j])
        fail(ErrorKind::InvalidElement, "duplicate generator name '" + names_[i] + "'");
    if (!(generators[i].index() == index_))
      fail(ErrorKind::IndexMismatch, "generator '" + names_[i] + "' acts on another tree");
    if (!generators[i].is_mealy())
      all_mealy_ = false;
    letters_.push_back(generators[i]);
    letters_.push_back(invert(generators[i]));
  }
  if (names_.empty())
    all_mealy_ = false;
}

std::string GeneratedAction::letter_name(Letter l) const {
  return (l & 1U) ? names_.at(l / 2) + "^-1" : names_.at(l / 2);
}

std::string GeneratedAction::format(const GroupWord& w) const {
  if (w.empty())
    return "e";
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i)
      out += '*';
    out += letter_name(w[i]);
  }
  return out;
}

GroupWord GeneratedAction::parse(const std::string& text) const {
  GroupWord out;
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '*' || text[pos] == '.'))
      ++pos;
  };
  skip();
  if (text.substr(pos) == "e" &&
      std::find(names_.begin(), names_.end(), "e") == names_.end())
    return out;
  while (pos < text.size()) {
    std::size_t best = names_.size(), best_len = 0;
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i].size() > best_len && text.compare(pos, names_[i].size(), names_[i]) == 0) {
        best = i;
        best_len = names_[i].size();
      }
    if (best == names_.size())
      fail(ErrorKind::InvalidParams, "cannot parse group word '" + text + "'");
    pos += best_len;
    Letter l = static_cast<Letter>(2 * best);
    if (text.compare(pos, 3, "^-1") == 0) {
      l |= 1U;
      pos += 3;
    }
    out.push_back(l);
    skip();
  }
  return out;
}

TreeAutomorphism GeneratedAction::evaluate(const GroupWord& w, std::uint64_t cap) const {
  TreeAutomorphism out = TreeAutomorphism::identity(index_);
  for (auto l : w)
    out = compose(out, letter(l), cap);
  return out;
}

Word GeneratedAction::act_letter(Letter l, const Word& x) const { return cantor::apply(letter(l), x); }

Word GeneratedAction::act(const GroupWord& w, const Word& x) const {
  Word y = x;
  for (auto it = w.rbegin(); it != w.rend(); ++it)
    y = cantor::apply(letter(*it), y);
  return y;
}

WordBall ball(const GeneratedAction& action, std::size_t radius, std::size_t dedup_depth,
              const BallOptions& options) {
  WordBall out;
  out.radius = radius;
  out.dedup_depth = dedup_depth;
  out.exact = options.exact_mealy && action.all_mealy();
  out.words.push_back({});
  if (radius == 0)
    return out;

  const auto size = action.index().level_size_capped(dedup_depth, options.cap);
  if (size > UINT32_MAX)
    fail(ErrorKind::CapExceeded, "dedup level too large");
  std::vector<std::vector<std::uint32_t>> letter_perm;
  for (Letter l = 0; l < action.letter_count(); ++l)
    letter_perm.push_back(level_permutation(action.letter(l), dedup_depth, options.cap));

  // keep permutations in memory while they fit in the budget, else recompute
  constexpr std::uint64_t kBudget = std::uint64_t{1} << 26;
  std::unordered_map<std::size_t, std::vector<std::uint32_t>> stored;
  std::uint64_t stored_entries = 0;
  auto perm_of = [&](std::size_t idx) -> std::vector<std::uint32_t> {
    if (auto it = stored.find(idx); it != stored.end())
      return it->second;
    std::vector<std::uint32_t> p(size);
    for (std::uint32_t i = 0; i < size; ++i)
      p[i] = i;
    for (auto l : out.words[idx])
      p = compose_perm(p, letter_perm[l]);
    return p;
  };
  std::unordered_map<std::size_t, TreeAutomorphism> elements;
  auto element_of = [&](std::size_t idx) -> const TreeAutomorphism& {
    auto it = elements.find(idx);
    if (it == elements.end())
      it = elements.emplace(idx, action.evaluate(out.words[idx], options.cap)).first;
    return it->second;
  };

  std::unordered_map<Hash128, std::vector<std::size_t>, Hash128Hasher> classes;
  std::vector<std::pair<std::size_t, std::vector<std::uint32_t>>> layer;
  {
    std::vector<std::uint32_t> id(size);
    for (std::uint32_t i = 0; i < size; ++i)
      id[i] = i;
    classes[hash_perm(id)].push_back(0);
    layer.emplace_back(0, std::move(id));
  }
  for (std::size_t r = 1; r <= radius && !layer.empty(); ++r) {
    std::vector<std::pair<std::size_t, std::vector<std::uint32_t>>> next;
    for (const auto& [idx, sig] : layer) {
      const GroupWord base = out.words[idx];
      for (Letter l = 0; l < action.letter_count(); ++l) {
        if (!base.empty() && base.back() == inverse_letter(l))
          continue;
        auto p = compose_perm(sig, letter_perm[l]);
        const auto h = hash_perm(p);
        auto& bucket = classes[h];
        GroupWord w = base;
        w.push_back(l);
        bool merged = false;
        for (auto other : bucket) {
          if (perm_of(other) != p)
            continue;
          if (out.exact) {
            auto candidate = action.evaluate(w, options.cap);
            if (exact_equal(candidate, element_of(other)) != std::optional<bool>(true))
              continue;
          }
          merged = true;
          break;
        }
        if (merged)
          continue;
        const auto new_idx = out.words.size();
        out.words.push_back(std::move(w));
        bucket.push_back(new_idx);
        if (stored_entries + size <= kBudget) {
          stored.emplace(new_idx, p);
          stored_entries += size;
        }
        next.emplace_back(new_idx, std::move(p));
      }
    }
    layer = std::move(next);
  }
  return out;
}

std::vector<Vertex> level_orbit(const GeneratedAction& action, const Vertex& v,
                                std::uint64_t cap) {
  validate_word(action.index(), v.digits);
  LevelCodec codec(action.index(), v.level(), cap);
  std::vector<bool> seen(codec.size(), false);
  std::deque<Word> queue{v.digits};
  seen[codec.rank(v.digits)] = true;
  std::vector<Vertex> out;
  while (!queue.empty()) {
    auto w = std::move(queue.front());
    queue.pop_front();
    for (Letter l = 0; l < action.letter_count(); ++l) {
      auto y = action.act_letter(l, w);
      const auto r = codec.rank(y);
      if (!seen[r]) {
        seen[r] = true;
        queue.push_back(std::move(y));
      }
    }
    out.push_back(Vertex{std::move(w)});
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool level_transitive(const GeneratedAction& action, std::size_t level, std::uint64_t cap) {
  const auto size = action.index().level_size_capped(level, cap);
  return level_orbit(action, Vertex{Word(level, 0)}, cap).size() == size;
}

std::vector<GroupWord> stabilizer_words(const GeneratedAction& action, const WordBall& ball,
                                        const Word& v) {
  validate_word(action.index(), v);
  std::vector<GroupWord> out;
  for (const auto& w : ball.words)
    if (action.act(w, v) == v)
      out.push_back(w);
  return out;
}

std::vector<GroupWord> level_stabilizer(const GeneratedAction& action, std::size_t radius,
                                        std::size_t dedup_depth, const Vertex& v,
                                        const BallOptions& options) {
  return stabilizer_words(action, ball(action, radius, dedup_depth, options), v.digits);
}

std::vector<GroupWord> point_stabilizer_ball(const GeneratedAction& action, std::size_t radius,
                                             const BoundaryPrefix& x,
                                             const BallOptions& options) {
  return stabilizer_words(action, ball(action, radius, x.depth(), options), x.digits);
}

// ---------------------------------------------------------------------------
// Schreier graphs

namespace {

// BFS over letters from the basepoint; `radius` bounds the distance.
SchreierGraph orbit_graph(const GeneratedAction& action, const Word& basepoint,
                          std::optional<std::size_t> radius, std::uint64_t cap) {
  SchreierGraph g;
  g.labels = action.names();
  g.radius = radius;
  std::map<Word, std::size_t> id;
  std::vector<std::size_t> dist;
  auto add = [&](const Word& w, std::size_t d) {
    auto [it, inserted] = id.emplace(w, g.vertices.size());
    if (inserted) {
      g.vertices.push_back(w);
      dist.push_back(d);
      if (g.vertices.size() > cap)
        fail(ErrorKind::CapExceeded, "orbit graph exceeds the vertex cap");
    }
    return it->second;
  };
  add(basepoint, 0);
  for (std::size_t i = 0; i < g.vertices.size(); ++i) {
    if (radius && dist[i] >= *radius)
      continue;
    for (Letter l = 0; l < action.letter_count(); ++l)
      add(action.act_letter(l, g.vertices[i]), dist[i] + 1);
  }
  g.out.assign(g.vertices.size(), std::vector<std::int64_t>(action.generator_count(), -1));
  for (std::size_t i = 0; i < g.vertices.size(); ++i)
    for (std::size_t gen = 0; gen < action.generator_count(); ++gen) {
      auto it = id.find(action.act_letter(static_cast<Letter>(2 * gen), g.vertices[i]));
      if (it != id.end())
        g.out[i][gen] = static_cast<std::int64_t>(it->second);
    }
  return g;
}

} // namespace

SchreierGraph schreier_level_graph(const GeneratedAction& action, std::size_t level,
                                   std::uint64_t cap) {
  action.index().level_size_capped(level, cap);
  return orbit_graph(action, Word(level, 0), std::nullopt, cap);
}

SchreierGraph stabilizer_schreier_ball(const GeneratedAction& action, const BoundaryPrefix& x,
                                       std::size_t radius, std::uint64_t cap) {
  validate_word(action.index(), x.digits);
  return orbit_graph(action, x.digits, radius, cap);
}

SchreierGraph ball_of(const SchreierGraph& graph, std::size_t radius) {
  const std::size_t n = graph.vertices.size();
  std::vector<std::vector<std::size_t>> in(n);
  for (std::size_t v = 0; v < n; ++v)
    for (auto t : graph.out[v])
      if (t >= 0)
        in[static_cast<std::size_t>(t)].push_back(v);
  std::vector<std::size_t> dist(n, SIZE_MAX);
  std::vector<std::size_t> keep{0};
  dist[0] = 0;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const auto v = keep[i];
    if (dist[v] >= radius)
      continue;
    auto visit = [&](std::size_t t) {
      if (dist[t] == SIZE_MAX) {
        dist[t] = dist[v] + 1;
        keep.push_back(t);
      }
    };
    for (auto t : graph.out[v])
      if (t >= 0)
        visit(static_cast<std::size_t>(t));
    for (auto t : in[v])
      visit(t);
  }
  std::sort(keep.begin() + 1, keep.end());
  std::vector<std::int64_t> renumber(n, -1);
  for (std::size_t i = 0; i < keep.size(); ++i)
    renumber[keep[i]] = static_cast<std::int64_t>(i);
  SchreierGraph out;
  out.labels = graph.labels;
  out.radius = graph.radius ? std::min(*graph.radius, radius) : radius;
  for (auto v : keep) {
    out.vertices.push_back(graph.vertices[v]);
    std::vector<std::int64_t> edges;
    for (auto t : graph.out[v])
      edges.push_back(t >= 0 ? renumber[static_cast<std::size_t>(t)] : -1);
    out.out.push_back(std::move(edges));
  }
  return out;
}

CanonicalGraph canonical_form(const SchreierGraph& graph) {
  const std::size_t n = graph.vertices.size();
  const std::size_t k = graph.labels.size();
  // in-neighbour per generator is unique since each generator acts bijectively
  std::vector<std::vector<std::int64_t>> in(n, std::vector<std::int64_t>(k, -1));
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t g = 0; g < k; ++g)
      if (graph.out[v][g] >= 0)
        in[static_cast<std::size_t>(graph.out[v][g])][g] = static_cast<std::int64_t>(v);
  CanonicalGraph c;
  std::vector<std::int64_t> number(n, -1);
  if (n == 0)
    return c;
  number[0] = 0;
  c.order.push_back(0);
  for (std::size_t i = 0; i < c.order.size(); ++i) {
    const auto v = c.order[i];
    for (std::size_t g = 0; g < k; ++g)
      for (auto t : {graph.out[v][g], in[v][g]})
        if (t >= 0 && number[static_cast<std::size_t>(t)] < 0) {
          number[static_cast<std::size_t>(t)] = static_cast<std::int64_t>(c.order.size());
          c.order.push_back(static_cast<std::size_t>(t));
        }
  }
  c.vertex_count = c.order.size();
  for (std::size_t i = 0; i < c.order.size(); ++i)
    for (std::size_t g = 0; g < k; ++g) {
      const auto t = graph.out[c.order[i]][g];
      if (t >= 0)
        c.edges.push_back({i, g, static_cast<std::size_t>(number[static_cast<std::size_t>(t)])});
    }
  return c;
}

nlohmann::json canonical_json(const SchreierGraph& graph) {
  const auto c = canonical_form(graph);
  auto edges = nlohmann::json::array();
  for (const auto& e : c.edges)
    edges.push_back({e[0], graph.labels[e[1]], e[2]});
  return {{"generators", graph.labels},
          {"vertices", c.vertex_count},
          {"basepoint", 0},
          {"edges", std::move(edges)}};
}

std::uint64_t stable_hash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string canonical_hash(const SchreierGraph& graph) {
  static const char* hex = "0123456789abcdef";
  auto h = stable_hash(canonical_json(graph).dump());
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4)
    out[static_cast<std::size_t>(i)] = hex[h & 15];
  return out;
}

bool pointed_isomorphic(const SchreierGraph& a, const SchreierGraph& b) {
  return a.labels == b.labels && canonical_form(a) == canonical_form(b);
}

std::string to_dot(const SchreierGraph& graph) {
  const auto c = canonical_form(graph);
  std::string out = "digraph schreier {\n";
  for (std::size_t i = 0; i < c.order.size(); ++i) {
    out += "  n" + std::to_string(i) + " [label=\"" +
           word_to_string(graph.vertices[c.order[i]]) + "\"";
    if (i == 0)
      out += ", shape=doublecircle";
    out += "];\n";
  }
  for (const auto& e : c.edges)
    out += "  n" + std::to_string(e[0]) + " -> n" + std::to_string(e[2]) + " [label=\"" +
           graph.labels[e[1]] + "\"];\n";
  out += "}\n";
  return out;
}

} // namespace cantor
