#include "cantor/automorphism.hpp"

#include "cantor/error.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

namespace cantor {

namespace {

std::size_t hash_mix(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

void require_permutation(const std::vector<Digit>& perm, std::size_t degree,
                         const std::string& where) {
  if (perm.size() != degree)
    fail(ErrorKind::InvalidElement, where + ": permutation has wrong length");
  std::vector<bool> seen(degree, false);
  for (auto p : perm) {
    if (p >= degree || seen[p])
      fail(ErrorKind::InvalidElement, where + ": not a permutation");
    seen[p] = true;
  }
}

RulePhase initial_phase(RuleKind kind) {
  switch (kind) {
  case RuleKind::Odometer: return RulePhase::Odometer;
  case RuleKind::LargeSwap: return RulePhase::SwapFirstLarge;
  case RuleKind::GraftEveryLevel: return RulePhase::EveryLevelPath;
  case RuleKind::GraftDoubling: return RulePhase::DoublingPath;
  }
  return RulePhase::Identity;
}

std::string_view phase_name(RulePhase phase) {
  switch (phase) {
  case RulePhase::Identity: return "identity";
  case RulePhase::Odometer: return "odometer";
  case RulePhase::SwapFirstLarge: return "swap_first_large";
  case RulePhase::EveryLevelPath: return "every_level_path";
  case RulePhase::EveryLevelBranch: return "every_level_branch";
  case RulePhase::DoublingPath: return "doubling_path";
  case RulePhase::DoublingBranch: return "doubling_branch";
  }
  return "identity";
}

std::optional<RulePhase> parse_phase(std::string_view name) {
  for (auto p : {RulePhase::Identity, RulePhase::Odometer, RulePhase::SwapFirstLarge,
                 RulePhase::EveryLevelPath, RulePhase::EveryLevelBranch, RulePhase::DoublingPath,
                 RulePhase::DoublingBranch})
    if (phase_name(p) == name)
      return p;
  return std::nullopt;
}

bool is_power_of_two(std::uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

// One transition of a rule-defined element. `level` is the absolute level of
// the digit being read, `n` the alphabet there.
std::pair<Digit, RuleState> rule_step(RuleState st, std::size_t level, std::uint64_t n,
                                      Digit k) {
  RuleState next = st;
  next.phase = RulePhase::Identity;
  next.aux = 0;
  switch (st.phase) {
  case RulePhase::Identity:
    return {k, next};
  case RulePhase::Odometer: {
    const bool carry = st.sign > 0 ? (k == n - 1) : (k == 0);
    const Digit out = st.sign > 0 ? (k + 1) % n : (k + n - 1) % n;
    if (carry)
      next.phase = RulePhase::Odometer;
    return {out, next};
  }
  case RulePhase::SwapFirstLarge:
    if (k + 2 >= n)
      return {k == n - 2 ? n - 1 : n - 2, next};
    next.phase = RulePhase::SwapFirstLarge;
    return {k, next};
  case RulePhase::EveryLevelPath:
    if (k == 0)
      next.phase = RulePhase::EveryLevelPath;
    else if (k == 1 && level >= 2)
      next.phase = RulePhase::EveryLevelBranch;
    return {k, next};
  case RulePhase::EveryLevelBranch:
    if (k == 0)
      next.phase = RulePhase::Odometer;
    return {k, next};
  case RulePhase::DoublingPath:
    if (k == 0) {
      next.phase = RulePhase::DoublingPath;
    } else if (k == 1 && level >= 2 && is_power_of_two(level)) {
      next.phase = RulePhase::DoublingBranch;
      next.aux = level;
    }
    return {k, next};
  case RulePhase::DoublingBranch:
    if (k == 0) {
      if (st.aux <= 1) {
        next.phase = RulePhase::Odometer;
      } else {
        next.phase = RulePhase::DoublingBranch;
        next.aux = st.aux - 1;
      }
    }
    return {k, next};
  }
  return {k, next};
}

std::vector<Digit> inverse_perm(const std::vector<Digit>& perm) {
  std::vector<Digit> inv(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k)
    inv[perm[k]] = k;
  return inv;
}

struct StateKeyHash {
  std::size_t operator()(const std::pair<TreeAutomorphism, std::size_t>& key) const {
    return hash_mix(key.first.state_hash(), key.second);
  }
};
struct StateKeyEq {
  bool operator()(const std::pair<TreeAutomorphism, std::size_t>& a,
                  const std::pair<TreeAutomorphism, std::size_t>& b) const {
    return a.second == b.second && a.first.same_state(b.first);
  }
};

} // namespace

std::string_view to_string(RuleKind kind) {
  switch (kind) {
  case RuleKind::Odometer: return "odometer";
  case RuleKind::LargeSwap: return "thm61_b";
  case RuleKind::GraftEveryLevel: return "ex44_c";
  case RuleKind::GraftDoubling: return "ex45_c";
  }
  return "odometer";
}

std::optional<RuleKind> parse_rule_kind(std::string_view name) {
  for (auto k : {RuleKind::Odometer, RuleKind::LargeSwap, RuleKind::GraftEveryLevel, RuleKind::GraftDoubling})
    if (to_string(k) == name)
      return k;
  return std::nullopt;
}

std::string_view to_string(Boundedness b) {
  switch (b) {
  case Boundedness::Bounded: return "bounded";
  case Boundedness::Unbounded: return "unbounded";
  case Boundedness::Unknown: return "unknown";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// MealyMachine

MealyMachine::MealyMachine(std::size_t degree, std::vector<State> states)
    : degree_(degree), states_(std::move(states)) {
  if (degree_ < 2)
    fail(ErrorKind::InvalidElement, "Mealy alphabet must have at least 2 letters");
  if (states_.empty())
    fail(ErrorKind::InvalidElement, "Mealy machine has no states");
  for (const auto& s : states_) {
    require_permutation(s.perm, degree_, "state '" + s.name + "'");
    if (s.to.size() != degree_)
      fail(ErrorKind::InvalidElement, "state '" + s.name + "': transitions not total");
    for (auto t : s.to)
      if (t >= states_.size())
        fail(ErrorKind::InvalidElement, "state '" + s.name + "': bad transition target");
  }

  const std::size_t n = states_.size();
  // identity: no state with a nontrivial permutation is reachable
  std::vector<bool> nontrivial(n, false);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t k = 0; k < degree_; ++k)
      if (states_[s].perm[k] != k)
        nontrivial[s] = true;
  std::vector<std::vector<std::size_t>> preds(n);
  for (std::size_t s = 0; s < n; ++s)
    for (auto t : states_[s].to)
      preds[t].push_back(s);
  std::vector<bool> bad = nontrivial;
  std::deque<std::size_t> queue;
  for (std::size_t s = 0; s < n; ++s)
    if (bad[s])
      queue.push_back(s);
  while (!queue.empty()) {
    auto t = queue.front();
    queue.pop_front();
    for (auto s : preds[t])
      if (!bad[s]) {
        bad[s] = true;
        queue.push_back(s);
      }
  }
  identity_.resize(n);
  for (std::size_t s = 0; s < n; ++s)
    identity_[s] = !bad[s];

  // Moore partition refinement
  std::vector<std::size_t> cls(n);
  {
    std::map<std::vector<Digit>, std::size_t> by_perm;
    for (std::size_t s = 0; s < n; ++s)
      cls[s] = by_perm.emplace(states_[s].perm, by_perm.size()).first->second;
  }
  for (;;) {
    std::map<std::vector<std::size_t>, std::size_t> sig;
    std::vector<std::size_t> next(n);
    for (std::size_t s = 0; s < n; ++s) {
      std::vector<std::size_t> key{cls[s]};
      for (auto t : states_[s].to)
        key.push_back(cls[t]);
      next[s] = sig.emplace(std::move(key), sig.size()).first->second;
    }
    const auto count = [](const std::vector<std::size_t>& c) {
      return c.empty() ? 0 : *std::max_element(c.begin(), c.end()) + 1;
    };
    const bool stable = count(next) == count(cls);
    cls = std::move(next);
    if (stable)
      break;
  }
  canonical_.resize(n);
  std::map<std::size_t, std::size_t> first;
  for (std::size_t s = 0; s < n; ++s)
    canonical_[s] = first.emplace(cls[s], s).first->second;
}

std::optional<std::size_t> MealyMachine::find(const std::string& name) const {
  for (std::size_t s = 0; s < states_.size(); ++s)
    if (states_[s].name == name)
      return s;
  return std::nullopt;
}

namespace {

std::shared_ptr<const MealyMachine> inverse_machine(const MealyMachine& m) {
  std::vector<MealyMachine::State> states;
  states.reserve(m.size());
  for (std::size_t s = 0; s < m.size(); ++s) {
    const auto& st = m.state(s);
    MealyMachine::State inv;
    inv.name = m.is_identity(s) ? st.name : st.name + "^-1";
    inv.perm = inverse_perm(st.perm);
    inv.to.resize(m.degree());
    for (std::size_t k = 0; k < m.degree(); ++k)
      inv.to[st.perm[k]] = st.to[k];
    states.push_back(std::move(inv));
  }
  auto out = std::make_shared<MealyMachine>(m.degree(), std::move(states));
  if (m.has_implicit_identity())
    out->mark_implicit_identity();
  return out;
}

// Reachable part of the product machine starting at (p0, q0); p after q.
TreeAutomorphism product_machine(const MealyMachine& mp, std::size_t p0,
                                 const MealyMachine& mq, std::size_t q0) {
  const std::size_t d = mp.degree();
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> ids;
  std::vector<std::pair<std::size_t, std::size_t>> order;
  auto id_of = [&](std::size_t p, std::size_t q) {
    auto [it, inserted] = ids.emplace(std::make_pair(p, q), order.size());
    if (inserted)
      order.emplace_back(p, q);
    return it->second;
  };
  id_of(mp.canonical(p0), mq.canonical(q0));
  std::vector<MealyMachine::State> states;
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto [p, q] = order[i];
    MealyMachine::State st;
    const auto& sp = mp.state(p);
    const auto& sq = mq.state(q);
    if (mp.is_identity(p) && mq.is_identity(q))
      st.name = "id";
    else if (mp.is_identity(p))
      st.name = sq.name;
    else if (mq.is_identity(q))
      st.name = sp.name;
    else
      st.name = "(" + sp.name + "*" + sq.name + ")";
    st.perm.resize(d);
    st.to.resize(d);
    for (std::size_t k = 0; k < d; ++k) {
      const Digit mid = sq.perm[k];
      st.perm[k] = sp.perm[mid];
      st.to[k] = id_of(mp.canonical(sp.to[mid]), mq.canonical(sq.to[k]));
    }
    states.push_back(std::move(st));
  }
  // names must stay unique for JSON export
  std::map<std::string, int> seen;
  for (auto& st : states) {
    int& c = seen[st.name];
    if (c++ > 0)
      st.name += "#" + std::to_string(c - 1);
  }
  return TreeAutomorphism::mealy(std::make_shared<MealyMachine>(d, std::move(states)), 0);
}

} // namespace

// ---------------------------------------------------------------------------
// TreeAutomorphism

TreeAutomorphism TreeAutomorphism::identity(const SphericalIndex& index) {
  return TreeAutomorphism(std::make_shared<const SphericalIndex>(index), 0, Identity{});
}

TreeAutomorphism TreeAutomorphism::portrait(const SphericalIndex& index,
                                            std::shared_ptr<const PortraitNode> node) {
  if (!node)
    fail(ErrorKind::InvalidElement, "null portrait");
  // validate shape
  std::function<void(const PortraitNode&, std::size_t)> check =
      [&](const PortraitNode& nd, std::size_t level) {
        if (nd.depth == 0)
          return;
        const auto n = index.at(level);
        require_permutation(nd.perm, n, "portrait level " + std::to_string(level));
        if (nd.children.size() != n)
          fail(ErrorKind::InvalidElement, "portrait has wrong number of children");
        for (const auto& c : nd.children) {
          if (!c || c->depth + 1 != nd.depth)
            fail(ErrorKind::InvalidElement, "portrait child depth mismatch");
          check(*c, level + 1);
        }
      };
  check(*node, 1);
  return TreeAutomorphism(std::make_shared<const SphericalIndex>(index), 0,
                          Portrait{std::move(node)});
}

TreeAutomorphism TreeAutomorphism::mealy(std::shared_ptr<const MealyMachine> machine,
                                         std::size_t state) {
  if (!machine || state >= machine->size())
    fail(ErrorKind::InvalidElement, "bad Mealy state");
  auto base = std::make_shared<const SphericalIndex>(
      SphericalIndex::constant(machine->degree()));
  return TreeAutomorphism(std::move(base), 0, Mealy{std::move(machine), state});
}

TreeAutomorphism TreeAutomorphism::rule(const SphericalIndex& index, RuleState state) {
  return rule_at(index, 0, state);
}

TreeAutomorphism TreeAutomorphism::rule_at(const SphericalIndex& base, std::size_t offset,
                                           RuleState state) {
  return TreeAutomorphism(std::make_shared<const SphericalIndex>(base), offset, Rule{state});
}

std::pair<Digit, TreeAutomorphism> TreeAutomorphism::step(Digit k) const {
  const std::size_t next_offset = offset_ + 1;
  return std::visit(
      [&](const auto& r) -> std::pair<Digit, TreeAutomorphism> {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Identity>) {
          return {k, TreeAutomorphism(base_, next_offset, Identity{})};
        } else if constexpr (std::is_same_v<T, Portrait>) {
          if (r.node->depth == 0)
            fail(ErrorKind::DepthExceeded, "word is deeper than the portrait");
          return {r.node->perm.at(k),
                  TreeAutomorphism(base_, next_offset, Portrait{r.node->children[k]})};
        } else if constexpr (std::is_same_v<T, Mealy>) {
          const auto& st = r.machine->state(r.state);
          return {st.perm.at(k),
                  TreeAutomorphism(base_, next_offset, Mealy{r.machine, st.to[k]})};
        } else if constexpr (std::is_same_v<T, Rule>) {
          auto [out, next] = rule_step(r.state, next_offset, base_->at(next_offset), k);
          return {out, TreeAutomorphism(base_, next_offset, Rule{next})};
        } else {
          std::vector<TreeAutomorphism> secs;
          secs.reserve(r->factors.size());
          Digit cur = k;
          for (std::size_t i = r->factors.size(); i-- > 0;) {
            auto [out, s] = r->factors[i].step(cur);
            secs.push_back(std::move(s));
            cur = out;
          }
          std::reverse(secs.begin(), secs.end());
          return {cur, make_product(std::move(secs))};
        }
      },
      repr_);
}

std::optional<std::size_t> TreeAutomorphism::defined_depth() const {
  if (const auto* p = std::get_if<Portrait>(&repr_))
    return p->node->depth;
  if (const auto* p = std::get_if<std::shared_ptr<const Product>>(&repr_)) {
    std::optional<std::size_t> d;
    for (const auto& f : (*p)->factors)
      if (auto fd = f.defined_depth())
        d = d ? std::min(*d, *fd) : *fd;
    return d;
  }
  return std::nullopt;
}

std::optional<bool> TreeAutomorphism::known_identity() const {
  return std::visit(
      [](const auto& r) -> std::optional<bool> {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Identity>)
          return true;
        else if constexpr (std::is_same_v<T, Mealy>)
          return r.machine->is_identity(r.state);
        else if constexpr (std::is_same_v<T, Rule>)
          return r.state.phase == RulePhase::Identity;
        else
          return std::nullopt;
      },
      repr_);
}

bool TreeAutomorphism::moves_every_point() const {
  if (const auto* r = std::get_if<Rule>(&repr_))
    return r->state.phase == RulePhase::Odometer;
  const std::vector<Digit>* perm = nullptr;
  if (const auto* m = std::get_if<Mealy>(&repr_))
    perm = &m->machine->state(m->state).perm;
  else if (const auto* p = std::get_if<Portrait>(&repr_); p && p->node->depth > 0)
    perm = &p->node->perm;
  if (!perm)
    return false;
  for (std::size_t k = 0; k < perm->size(); ++k)
    if ((*perm)[k] == k)
      return false;
  return true;
}

bool TreeAutomorphism::same_state(const TreeAutomorphism& other) const {
  if (offset_ != other.offset_ || repr_.index() != other.repr_.index())
    return false;
  if (base_ != other.base_ && !(*base_ == *other.base_))
    return false;
  return std::visit(
      [&](const auto& r) -> bool {
        using T = std::decay_t<decltype(r)>;
        const auto& o = std::get<T>(other.repr_);
        if constexpr (std::is_same_v<T, Identity>) {
          return true;
        } else if constexpr (std::is_same_v<T, Portrait>) {
          return r.node == o.node;
        } else if constexpr (std::is_same_v<T, Mealy>) {
          return r.machine == o.machine &&
                 r.machine->canonical(r.state) == o.machine->canonical(o.state);
        } else if constexpr (std::is_same_v<T, Rule>) {
          return r.state == o.state;
        } else {
          if (r->factors.size() != o->factors.size())
            return false;
          for (std::size_t i = 0; i < r->factors.size(); ++i)
            if (!r->factors[i].same_state(o->factors[i]))
              return false;
          return true;
        }
      },
      repr_);
}

std::size_t TreeAutomorphism::state_hash() const {
  std::size_t h = hash_mix(repr_.index(), offset_);
  return std::visit(
      [&](const auto& r) -> std::size_t {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Identity>) {
          return h;
        } else if constexpr (std::is_same_v<T, Portrait>) {
          return hash_mix(h, std::hash<const void*>{}(r.node.get()));
        } else if constexpr (std::is_same_v<T, Mealy>) {
          h = hash_mix(h, std::hash<const void*>{}(r.machine.get()));
          return hash_mix(h, r.machine->canonical(r.state));
        } else if constexpr (std::is_same_v<T, Rule>) {
          h = hash_mix(h, static_cast<std::size_t>(r.state.kind));
          h = hash_mix(h, static_cast<std::size_t>(r.state.phase));
          h = hash_mix(h, static_cast<std::size_t>(r.state.sign + 2));
          return hash_mix(h, r.state.aux);
        } else {
          for (const auto& f : r->factors)
            h = hash_mix(h, f.state_hash());
          return h;
        }
      },
      repr_);
}

TreeAutomorphism make_product(std::vector<TreeAutomorphism> factors) {
  if (factors.empty())
    fail(ErrorKind::InvalidElement, "empty product");
  std::vector<TreeAutomorphism> flat;
  for (auto& f : factors) {
    if (auto p = std::get_if<std::shared_ptr<const Product>>(&f.repr_)) {
      for (const auto& g : (*p)->factors)
        flat.push_back(g);
    } else if (f.known_identity() != std::optional<bool>(true)) {
      flat.push_back(std::move(f));
    }
  }
  if (flat.empty())
    return TreeAutomorphism(factors.front().base_, factors.front().offset_,
                            TreeAutomorphism::Identity{});
  if (flat.size() == 1)
    return flat.front();
  auto base = flat.front().base_;
  auto offset = flat.front().offset_;
  return TreeAutomorphism(std::move(base), offset,
                          std::make_shared<const Product>(Product{std::move(flat)}));
}

// ---------------------------------------------------------------------------
// Operations

namespace {

void check_depth(const TreeAutomorphism& g, std::size_t length) {
  if (auto d = g.defined_depth(); d && *d < length)
    fail(ErrorKind::DepthExceeded, "word of length " + std::to_string(length) +
                                       " exceeds the element's defined depth " +
                                       std::to_string(*d));
}

void check_word(const TreeAutomorphism& g, const Word& w) {
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] >= g.alphabet(i + 1))
      fail(ErrorKind::InvalidDigit, "digit " + std::to_string(w[i]) +
                                        " out of range at level " + std::to_string(i + 1));
}

void check_same_index(const TreeAutomorphism& g, const TreeAutomorphism& h) {
  if (g.base() != h.base() || g.offset() != h.offset())
    if (!(g.index() == h.index()))
      fail(ErrorKind::IndexMismatch, "elements act on trees with different indices");
}

} // namespace

Word apply(const TreeAutomorphism& g, const Word& w) {
  check_depth(g, w.size());
  check_word(g, w);
  Word out(w.size());
  TreeAutomorphism cur = g;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (cur.known_identity() == std::optional<bool>(true)) {
      std::copy(w.begin() + static_cast<std::ptrdiff_t>(i), w.end(),
                out.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
    auto [d, next] = cur.step(w[i]);
    out[i] = d;
    cur = std::move(next);
  }
  return out;
}

Vertex apply(const TreeAutomorphism& g, const Vertex& v) { return Vertex{apply(g, v.digits)}; }

BoundaryPrefix apply(const TreeAutomorphism& g, const BoundaryPrefix& x) {
  return BoundaryPrefix{apply(g, x.digits)};
}

TreeAutomorphism section(const TreeAutomorphism& g, const Vertex& v) {
  check_depth(g, v.level());
  check_word(g, v.digits);
  TreeAutomorphism cur = g;
  for (auto k : v.digits)
    cur = cur.step(k).second;
  return cur;
}

TreeAutomorphism truncate(const TreeAutomorphism& g, std::size_t depth,
                          std::uint64_t cap) {
  check_depth(g, depth);
  g.index().level_size_capped(depth, cap);
  std::unordered_map<std::pair<TreeAutomorphism, std::size_t>,
                     std::shared_ptr<const PortraitNode>, StateKeyHash, StateKeyEq>
      memo;
  std::function<std::shared_ptr<const PortraitNode>(const TreeAutomorphism&, std::size_t)>
      build = [&](const TreeAutomorphism& h, std::size_t remaining) {
        auto key = std::make_pair(h, remaining);
        if (auto it = memo.find(key); it != memo.end())
          return it->second;
        auto node = std::make_shared<PortraitNode>();
        node->depth = remaining;
        if (remaining > 0) {
          const auto n = h.alphabet(1);
          node->perm.resize(n);
          node->children.resize(n);
          for (Digit k = 0; k < n; ++k) {
            auto [out, s] = h.step(k);
            node->perm[k] = out;
            node->children[k] = build(s, remaining - 1);
          }
        }
        memo.emplace(std::move(key), node);
        return std::shared_ptr<const PortraitNode>(node);
      };
  return TreeAutomorphism::portrait(g.index(), build(g, depth));
}

TreeAutomorphism compose(const TreeAutomorphism& g, const TreeAutomorphism& h,
                         std::uint64_t cap) {
  check_same_index(g, h);
  if (g.known_identity() == std::optional<bool>(true))
    return h;
  if (h.known_identity() == std::optional<bool>(true))
    return g;
  if (g.is_portrait() || h.is_portrait()) {
    auto prod = make_product({g, h});
    return truncate(prod, *prod.defined_depth(), cap);
  }
  if (g.is_mealy() && h.is_mealy()) {
    const auto& mg = std::get<TreeAutomorphism::Mealy>(g.repr());
    const auto& mh = std::get<TreeAutomorphism::Mealy>(h.repr());
    return product_machine(*mg.machine, mg.state, *mh.machine, mh.state);
  }
  return make_product({g, h});
}

TreeAutomorphism invert(const TreeAutomorphism& g) {
  return std::visit(
      [&](const auto& r) -> TreeAutomorphism {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, TreeAutomorphism::Identity>) {
          return g;
        } else if constexpr (std::is_same_v<T, TreeAutomorphism::Portrait>) {
          std::map<const PortraitNode*, std::shared_ptr<const PortraitNode>> memo;
          std::function<std::shared_ptr<const PortraitNode>(const PortraitNode&)> inv =
              [&](const PortraitNode& nd) -> std::shared_ptr<const PortraitNode> {
            if (auto it = memo.find(&nd); it != memo.end())
              return it->second;
            auto out = std::make_shared<PortraitNode>();
            out->depth = nd.depth;
            if (nd.depth > 0) {
              out->perm = inverse_perm(nd.perm);
              out->children.resize(nd.children.size());
              for (std::size_t k = 0; k < nd.perm.size(); ++k)
                out->children[nd.perm[k]] = inv(*nd.children[k]);
            }
            memo.emplace(&nd, out);
            return out;
          };
          return TreeAutomorphism::portrait(g.index(), inv(*r.node));
        } else if constexpr (std::is_same_v<T, TreeAutomorphism::Mealy>) {
          return TreeAutomorphism::mealy(inverse_machine(*r.machine), r.state);
        } else if constexpr (std::is_same_v<T, TreeAutomorphism::Rule>) {
          RuleState st = r.state;
          if (st.phase != RulePhase::SwapFirstLarge && st.phase != RulePhase::Identity)
            st.sign = static_cast<std::int8_t>(-st.sign);
          return TreeAutomorphism::rule_at(*g.base(), g.offset(), st);
        } else {
          std::vector<TreeAutomorphism> inv;
          for (auto it = r->factors.rbegin(); it != r->factors.rend(); ++it)
            inv.push_back(invert(*it));
          return make_product(std::move(inv));
        }
      },
      g.repr());
}

std::optional<bool> exact_equal(const TreeAutomorphism& g, const TreeAutomorphism& h) {
  auto as_mealy = [](const TreeAutomorphism& x) -> std::optional<TreeAutomorphism::Mealy> {
    if (const auto* m = std::get_if<TreeAutomorphism::Mealy>(&x.repr()))
      return *m;
    return std::nullopt;
  };
  auto mg = as_mealy(g);
  auto mh = as_mealy(h);
  if (g.known_identity() == std::optional<bool>(true) && mh)
    return mh->machine->is_identity(mh->state);
  if (h.known_identity() == std::optional<bool>(true) && mg)
    return mg->machine->is_identity(mg->state);
  if (!mg || !mh)
    return std::nullopt;
  if (mg->machine->degree() != mh->machine->degree())
    return false;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::deque<std::pair<std::size_t, std::size_t>> queue;
  auto push = [&](std::size_t p, std::size_t q) {
    auto key = std::make_pair(mg->machine->canonical(p), mh->machine->canonical(q));
    if (seen.insert(key).second)
      queue.push_back(key);
  };
  push(mg->state, mh->state);
  while (!queue.empty()) {
    auto [p, q] = queue.front();
    queue.pop_front();
    const auto& sp = mg->machine->state(p);
    const auto& sq = mh->machine->state(q);
    if (sp.perm != sq.perm)
      return false;
    for (std::size_t k = 0; k < sp.perm.size(); ++k)
      push(sp.to[k], sq.to[k]);
  }
  return true;
}

bool equal_to_depth(const TreeAutomorphism& g, const TreeAutomorphism& h,
                    std::size_t depth, std::uint64_t cap) {
  check_same_index(g, h);
  check_depth(g, depth);
  check_depth(h, depth);
  if (auto exact = exact_equal(g, h); exact && *exact)
    return true;
  if (!(g.is_mealy() && h.is_mealy()))
    g.index().level_size_capped(depth, cap);

  struct PairKey {
    TreeAutomorphism a, b;
    std::size_t remaining;
  };
  struct PairHash {
    std::size_t operator()(const PairKey& k) const {
      return hash_mix(hash_mix(k.a.state_hash(), k.b.state_hash()), k.remaining);
    }
  };
  struct PairEq {
    bool operator()(const PairKey& x, const PairKey& y) const {
      return x.remaining == y.remaining && x.a.same_state(y.a) && x.b.same_state(y.b);
    }
  };
  std::unordered_map<PairKey, bool, PairHash, PairEq> memo;

  std::function<bool(const TreeAutomorphism&, const TreeAutomorphism&, std::size_t)> eq =
      [&](const TreeAutomorphism& a, const TreeAutomorphism& b, std::size_t remaining) {
        if (remaining == 0 || a.same_state(b))
          return true;
        const auto ia = a.known_identity();
        const auto ib = b.known_identity();
        if (ia && ib && *ia && *ib)
          return true;
        PairKey key{a, b, remaining};
        if (auto it = memo.find(key); it != memo.end())
          return it->second;
        bool result = true;
        const auto n = a.alphabet(1);
        for (Digit k = 0; k < n && result; ++k) {
          auto [da, sa] = a.step(k);
          auto [db, sb] = b.step(k);
          result = da == db && eq(sa, sb, remaining - 1);
        }
        memo.emplace(std::move(key), result);
        return result;
      };
  return eq(g, h, depth);
}

std::vector<std::uint32_t> level_permutation(const TreeAutomorphism& g, std::size_t depth,
                                             std::uint64_t cap) {
  check_depth(g, depth);
  const auto size = g.index().level_size_capped(depth, cap);
  if (size > UINT32_MAX)
    fail(ErrorKind::CapExceeded, "level too large for a 32-bit permutation");
  std::vector<std::uint64_t> block(depth + 1, 1); // block[i] = words below relative level i
  for (std::size_t i = depth; i-- > 0;)
    block[i] = block[i + 1] * g.alphabet(i + 1);
  std::vector<std::uint32_t> perm(size);
  std::function<void(const TreeAutomorphism&, std::uint64_t, std::uint64_t, std::size_t)>
      fill = [&](const TreeAutomorphism& h, std::uint64_t in, std::uint64_t out,
                 std::size_t level) {
        if (level == depth) {
          perm[in] = static_cast<std::uint32_t>(out);
          return;
        }
        const auto width = block[level];
        if (h.known_identity() == std::optional<bool>(true)) {
          for (std::uint64_t t = 0; t < width; ++t)
            perm[in * width + t] = static_cast<std::uint32_t>(out * width + t);
          return;
        }
        const auto n = h.alphabet(1);
        for (Digit k = 0; k < n; ++k) {
          auto [img, s] = h.step(k);
          fill(s, in * n + k, out * n + img, level + 1);
        }
      };
  fill(g, 0, 0, 0);
  return perm;
}

SectionClosure section_closure(const TreeAutomorphism& g, std::size_t state_bound,
                               std::size_t depth_bound, std::size_t dedup_depth,
                               std::uint64_t cap) {
  SectionClosure out;
  out.bound_used = state_bound;
  if (const auto* m = std::get_if<TreeAutomorphism::Mealy>(&g.repr())) {
    const auto& machine = *m->machine;
    std::vector<std::size_t> order{machine.canonical(m->state)};
    std::set<std::size_t> seen{order.front()};
    out.bounded = Boundedness::Bounded;
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (auto t : machine.state(order[i]).to) {
        const auto c = machine.canonical(t);
        if (seen.insert(c).second)
          order.push_back(c);
      }
      if (order.size() > state_bound) {
        out.bounded = Boundedness::Unbounded;
        order.resize(state_bound);
        break;
      }
    }
    for (auto s : order)
      out.sections.push_back(TreeAutomorphism::mealy(m->machine, s));
    return out;
  }
  if (g.known_identity() == std::optional<bool>(true)) {
    out.sections.push_back(g);
    out.bounded = Boundedness::Bounded;
    return out;
  }

  out.bounded = Boundedness::Unknown;
  struct Item {
    TreeAutomorphism h;
    std::size_t level;
  };
  std::vector<Item> items{{g, 0}};
  auto known = [&](const TreeAutomorphism& h) {
    const auto idx = h.index();
    std::size_t d = dedup_depth;
    if (auto dd = h.defined_depth())
      d = std::min(d, *dd);
    while (d > 0) {
      try {
        idx.level_size_capped(d, cap);
        break;
      } catch (const CantorError&) {
        --d;
      }
    }
    for (const auto& it : items) {
      if (it.h.same_state(h))
        return true;
      if (!(it.h.index() == idx))
        continue;
      const auto a = it.h.known_identity();
      const auto b = h.known_identity();
      if (a && b && *a && *b)
        return true;
      if (auto dd = it.h.defined_depth(); dd && *dd < d)
        continue;
      if (equal_to_depth(it.h, h, d, cap))
        return true;
    }
    return false;
  };
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].level >= depth_bound)
      continue;
    auto dd = items[i].h.defined_depth();
    if (dd && *dd == 0)
      continue;
    const auto n = items[i].h.alphabet(1);
    for (Digit k = 0; k < n; ++k) {
      auto s = items[i].h.step(k).second;
      if (!known(s)) {
        items.push_back({std::move(s), items[i].level + 1});
        out.depth_explored = std::max(out.depth_explored, items.back().level);
      }
      if (items.size() >= state_bound)
        break;
    }
    if (items.size() >= state_bound)
      break;
  }
  for (auto& it : items)
    out.sections.push_back(std::move(it.h));
  return out;
}

std::optional<Vertex> minimal_moved_vertex(const TreeAutomorphism& g,
                                           std::size_t search_depth, std::uint64_t cap) {
  struct Node {
    Word path;
    TreeAutomorphism h;
  };
  std::vector<Node> frontier{{Word{}, g}};
  for (std::size_t level = 0; level < search_depth && !frontier.empty(); ++level) {
    std::vector<Node> next;
    std::unordered_map<std::pair<TreeAutomorphism, std::size_t>, bool, StateKeyHash,
                       StateKeyEq>
        seen;
    for (const auto& nd : frontier) {
      if (nd.h.known_identity() == std::optional<bool>(true))
        continue;
      if (auto dd = nd.h.defined_depth(); dd && *dd == 0)
        continue;
      const auto n = nd.h.alphabet(1);
      for (Digit k = 0; k < n; ++k) {
        auto [out, s] = nd.h.step(k);
        Word path = nd.path;
        path.push_back(k);
        if (out != k)
          return Vertex{std::move(path)};
        if (s.known_identity() == std::optional<bool>(true))
          continue;
        if (!seen.emplace(std::make_pair(s, 0), true).second)
          continue;
        next.push_back({std::move(path), std::move(s)});
        if (next.size() > cap)
          fail(ErrorKind::CapExceeded, "moved-vertex search frontier exceeds the cap");
      }
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::json node_to_json(const PortraitNode& nd) {
  nlohmann::json j{{"depth", nd.depth}};
  if (nd.depth > 0) {
    j["perm"] = nd.perm;
    auto children = nlohmann::json::array();
    for (const auto& c : nd.children)
      children.push_back(node_to_json(*c));
    j["children"] = std::move(children);
  }
  return j;
}

std::shared_ptr<const PortraitNode> node_from_json(const nlohmann::json& j) {
  auto nd = std::make_shared<PortraitNode>();
  nd->depth = j.at("depth").get<std::size_t>();
  if (nd->depth > 0) {
    nd->perm = j.at("perm").get<std::vector<Digit>>();
    for (const auto& c : j.at("children"))
      nd->children.push_back(node_from_json(c));
  }
  return nd;
}

} // namespace

nlohmann::json element_to_json(const TreeAutomorphism& g) {
  return std::visit(
      [&](const auto& r) -> nlohmann::json {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, TreeAutomorphism::Identity>) {
          return {{"kind", "identity"}, {"index", g.index().to_json()}};
        } else if constexpr (std::is_same_v<T, TreeAutomorphism::Portrait>) {
          auto j = node_to_json(*r.node);
          j["kind"] = "portrait";
          j["index"] = g.index().to_json();
          return j;
        } else if constexpr (std::is_same_v<T, TreeAutomorphism::Mealy>) {
          const auto& m = *r.machine;
          nlohmann::json states = nlohmann::json::object();
          for (std::size_t s = 0; s < m.size(); ++s) {
            const auto& st = m.state(s);
            if (m.has_implicit_identity() && st.name == "id")
              continue;
            std::vector<std::string> to;
            for (auto t : st.to)
              to.push_back(m.state(t).name);
            states[st.name] = {{"perm", st.perm}, {"to", to}};
          }
          return {{"kind", "mealy"},
                  {"alphabet", m.degree()},
                  {"states", std::move(states)},
                  {"initial", m.state(r.state).name}};
        } else if constexpr (std::is_same_v<T, TreeAutomorphism::Rule>) {
          nlohmann::json params{{"index", g.base()->to_json()}};
          if (g.offset() != 0)
            params["level"] = g.offset();
          if (r.state.phase != initial_phase(r.state.kind))
            params["phase"] = std::string(phase_name(r.state.phase));
          if (r.state.aux != 0)
            params["aux"] = r.state.aux;
          if (r.state.sign < 0)
            params["inverse"] = true;
          return {{"kind", "rule"},
                  {"rule", std::string(to_string(r.state.kind))},
                  {"params", std::move(params)}};
        } else {
          auto factors = nlohmann::json::array();
          for (const auto& f : r->factors)
            factors.push_back(element_to_json(f));
          return {{"kind", "product"}, {"factors", std::move(factors)}};
        }
      },
      g.repr());
}

TreeAutomorphism element_from_json(const nlohmann::json& j,
                                   const std::optional<SphericalIndex>& index) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    auto index_of = [&](const nlohmann::json& holder) {
      if (holder.contains("index"))
        return SphericalIndex::from_json(holder.at("index"));
      if (index)
        return *index;
      fail(ErrorKind::InvalidElement, "element definition lacks an index");
    };
    if (kind == "identity")
      return TreeAutomorphism::identity(index_of(j));
    if (kind == "portrait")
      return TreeAutomorphism::portrait(index_of(j), node_from_json(j));
    if (kind == "mealy") {
      const auto degree = j.at("alphabet").get<std::size_t>();
      const auto& states_json = j.at("states");
      std::vector<std::string> names;
      for (auto it = states_json.begin(); it != states_json.end(); ++it)
        names.push_back(it.key());
      bool implicit_id = false;
      auto lookup = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < names.size(); ++i)
          if (names[i] == name)
            return i;
        if (name == "id") {
          implicit_id = true;
          return names.size();
        }
        fail(ErrorKind::InvalidElement, "unknown state '" + name + "'");
      };
      std::vector<MealyMachine::State> states;
      for (const auto& name : names) {
        const auto& sj = states_json.at(name);
        MealyMachine::State st;
        st.name = name;
        st.perm = sj.at("perm").get<std::vector<Digit>>();
        for (const auto& t : sj.at("to"))
          st.to.push_back(lookup(t.get<std::string>()));
        states.push_back(std::move(st));
      }
      const auto initial = lookup(j.at("initial").get<std::string>());
      if (implicit_id) {
        MealyMachine::State id;
        id.name = "id";
        id.perm.resize(degree);
        std::iota(id.perm.begin(), id.perm.end(), Digit{0});
        id.to.assign(degree, names.size());
        states.push_back(std::move(id));
      }
      auto machine = std::make_shared<MealyMachine>(degree, std::move(states));
      if (implicit_id)
        machine->mark_implicit_identity();
      return TreeAutomorphism::mealy(std::move(machine), initial);
    }
    if (kind == "rule") {
      const auto name = j.at("rule").get<std::string>();
      auto rk = parse_rule_kind(name);
      if (!rk)
        fail(ErrorKind::InvalidElement, "unknown rule '" + name + "'");
      const auto params = j.value("params", nlohmann::json::object());
      RuleState st;
      st.kind = *rk;
      st.phase = initial_phase(*rk);
      if (params.contains("phase")) {
        auto ph = parse_phase(params.at("phase").get<std::string>());
        if (!ph)
          fail(ErrorKind::InvalidElement, "unknown rule phase");
        st.phase = *ph;
      }
      st.aux = params.value("aux", std::uint64_t{0});
      st.sign = params.value("inverse", false) ? -1 : 1;
      const auto level = params.value("level", std::size_t{0});
      auto base = index_of(params);
      if (*rk == RuleKind::LargeSwap)
        for (std::size_t l = 1; l <= base.prefix().size() + base.cycle().size() + 1; ++l)
          if (base.at(l) < 3)
            fail(ErrorKind::InvalidParams, "thm61_b needs every n_l >= 3");
      return TreeAutomorphism::rule_at(base, level, st);
    }
    if (kind == "product") {
      std::vector<TreeAutomorphism> factors;
      for (const auto& f : j.at("factors"))
        factors.push_back(element_from_json(f, index));
      return make_product(std::move(factors));
    }
    fail(ErrorKind::InvalidElement, "unknown element kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidElement, std::string("malformed element definition: ") + e.what());
  }
}

std::string describe(const TreeAutomorphism& g) {
  return std::visit(
      [&](const auto& r) -> std::string {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, TreeAutomorphism::Identity>)
          return "identity";
        else if constexpr (std::is_same_v<T, TreeAutomorphism::Portrait>)
          return "portrait(depth " + std::to_string(r.node->depth) + ")";
        else if constexpr (std::is_same_v<T, TreeAutomorphism::Mealy>)
          return "mealy:" + r.machine->state(r.state).name;
        else if constexpr (std::is_same_v<T, TreeAutomorphism::Rule>)
          return std::string("rule:") + std::string(to_string(r.state.kind)) + "/" +
                 std::string(phase_name(r.state.phase));
        else
          return "product of " + std::to_string(r->factors.size());
      },
      g.repr());
}

} // namespace cantor
