#pragma once

#include "cantor/tree.hpp"

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cantor {

/// A finite-state, invertible, synchronous transducer over the alphabet
/// {0, ..., d-1}. State `s` acts on a word k s_2 s_3 ... as
/// perm[k] followed by the action of state to[k] on s_2 s_3 ...
class MealyMachine {
public:
  struct State {
    std::string name;
    std::vector<Digit> perm;
    std::vector<std::size_t> to;
  };

  MealyMachine(std::size_t degree, std::vector<State> states);

  std::size_t degree() const { return degree_; }
  std::size_t size() const { return states_.size(); }
  const State& state(std::size_t s) const { return states_.at(s); }
  std::optional<std::size_t> find(const std::string& name) const;

  /// Representative of the state's class under behavioural equivalence.
  std::size_t canonical(std::size_t s) const { return canonical_[s]; }
  bool is_identity(std::size_t s) const { return identity_[s]; }

  /// True when the machine carries a state named "id" that was added on load
  /// rather than declared.
  bool has_implicit_identity() const { return implicit_identity_; }
  void mark_implicit_identity() { implicit_identity_ = true; }

private:
  std::size_t degree_;
  std::vector<State> states_;
  std::vector<std::size_t> canonical_;
  std::vector<bool> identity_;
  bool implicit_identity_ = false;
};

enum class RuleKind : std::uint8_t { Odometer, LargeSwap, GraftEveryLevel, GraftDoubling };

enum class RulePhase : std::uint8_t {
  Identity,
  Odometer,          ///< +sign with carry on the remaining digits
  SwapFirstLarge,    ///< swap the first digit lying in {n-2, n-1}
  EveryLevelPath,    ///< still on the all-zeros path
  EveryLevelBranch,  ///< at w = 0..01, waiting for the 0 that reaches z
  DoublingPath,
  DoublingBranch,    ///< below w_{m_k}; aux = zeros still required to reach z
};

std::string_view to_string(RuleKind kind);
std::optional<RuleKind> parse_rule_kind(std::string_view name);

struct RuleState {
  RuleKind kind = RuleKind::Odometer;
  RulePhase phase = RulePhase::Identity;
  std::int8_t sign = 1;
  std::uint64_t aux = 0;

  friend bool operator==(const RuleState&, const RuleState&) = default;
};

/// Finite depth-L portrait: a permutation at every vertex above level L.
struct PortraitNode {
  std::size_t depth = 0;
  std::vector<Digit> perm;                                   ///< empty at depth 0
  std::vector<std::shared_ptr<const PortraitNode>> children; ///< indexed by source digit
};

class TreeAutomorphism;

struct Product {
  /// Applied right to left: factors = {g, h} acts as g after h.
  std::vector<TreeAutomorphism> factors;
};

/// An element of Aut(T) acting on the subtree below a level-`offset` vertex
/// of the tree with index `base`. Sections share `base` and bump `offset`.
class TreeAutomorphism {
public:
  struct Identity {};
  struct Portrait {
    std::shared_ptr<const PortraitNode> node;
  };
  struct Mealy {
    std::shared_ptr<const MealyMachine> machine;
    std::size_t state = 0;
  };
  struct Rule {
    RuleState state;
  };
  using Repr = std::variant<Identity, Portrait, Mealy, Rule, std::shared_ptr<const Product>>;

  static TreeAutomorphism identity(const SphericalIndex& index);
  static TreeAutomorphism portrait(const SphericalIndex& index,
                                   std::shared_ptr<const PortraitNode> node);
  static TreeAutomorphism mealy(std::shared_ptr<const MealyMachine> machine,
                                std::size_t state);
  static TreeAutomorphism rule(const SphericalIndex& index, RuleState state);
  /// Rule element already sitting `offset` levels below the root of `base`.
  static TreeAutomorphism rule_at(const SphericalIndex& base, std::size_t offset,
                                  RuleState state);

  const Repr& repr() const { return repr_; }
  bool is_portrait() const { return std::holds_alternative<Portrait>(repr_); }
  bool is_mealy() const { return std::holds_alternative<Mealy>(repr_); }
  bool is_rule() const { return std::holds_alternative<Rule>(repr_); }
  bool is_product() const {
    return std::holds_alternative<std::shared_ptr<const Product>>(repr_);
  }

  /// The index of the tree this element acts on.
  SphericalIndex index() const { return base_->shifted(offset_); }
  const std::shared_ptr<const SphericalIndex>& base() const { return base_; }
  std::size_t offset() const { return offset_; }
  /// Alphabet size at relative level `level` >= 1.
  std::uint64_t alphabet(std::size_t level) const { return base_->at(offset_ + level); }

  /// Image of the first digit and the section there: g(k s) = k' g|_k(s).
  std::pair<Digit, TreeAutomorphism> step(Digit k) const;

  /// Depth to which the action is known; nullopt = every depth.
  std::optional<std::size_t> defined_depth() const;

  /// Exact identity knowledge: true/false when decidable from the representation.
  std::optional<bool> known_identity() const;
  /// True only when every boundary point below is certainly moved.
  bool moves_every_point() const;

  /// Same representation in the same state at the same offset.
  bool same_state(const TreeAutomorphism& other) const;
  std::size_t state_hash() const;

private:
  TreeAutomorphism(std::shared_ptr<const SphericalIndex> base, std::size_t offset,
                   Repr repr)
      : base_(std::move(base)), offset_(offset), repr_(std::move(repr)) {}

  friend TreeAutomorphism make_product(std::vector<TreeAutomorphism> factors);

  std::shared_ptr<const SphericalIndex> base_;
  std::size_t offset_ = 0;
  Repr repr_;
};

/// Product of factors (right to left), flattening nested products and
/// dropping identities.
TreeAutomorphism make_product(std::vector<TreeAutomorphism> factors);

Word apply(const TreeAutomorphism& g, const Word& w);
Vertex apply(const TreeAutomorphism& g, const Vertex& v);
BoundaryPrefix apply(const TreeAutomorphism& g, const BoundaryPrefix& x);

/// g after h. Portraits force a portrait result at the smaller defined depth;
/// two Mealy elements give a Mealy element on the product machine; every other
/// mix is kept as a lazy product.
TreeAutomorphism compose(const TreeAutomorphism& g, const TreeAutomorphism& h,
                         std::uint64_t cap = kDefaultLevelCap);
TreeAutomorphism invert(const TreeAutomorphism& g);

/// g|_v, taken one level at a time.
TreeAutomorphism section(const TreeAutomorphism& g, const Vertex& v);

/// Depth-L portrait of any element. Throws CapExceeded past `cap` vertices on level L.
TreeAutomorphism truncate(const TreeAutomorphism& g, std::size_t depth,
                          std::uint64_t cap = kDefaultLevelCap);

/// True iff g and h agree on every word of length L.
bool equal_to_depth(const TreeAutomorphism& g, const TreeAutomorphism& h,
                    std::size_t depth, std::uint64_t cap = kDefaultLevelCap);

/// Exact equality when both operands are Mealy (product-automaton reachability).
std::optional<bool> exact_equal(const TreeAutomorphism& g, const TreeAutomorphism& h);

/// Permutation of the level-L words induced by g, in LevelCodec rank order.
std::vector<std::uint32_t> level_permutation(const TreeAutomorphism& g,
                                             std::size_t depth,
                                             std::uint64_t cap = kDefaultLevelCap);

enum class Boundedness { Bounded, Unbounded, Unknown };
std::string_view to_string(Boundedness b);

struct SectionClosure {
  std::vector<TreeAutomorphism> sections; ///< sections[0] is the element itself
  Boundedness bounded = Boundedness::Unknown;
  std::size_t bound_used = 0;
  std::size_t depth_explored = 0;
};

/// Breadth-first closure of {g|_v}. Exact for Mealy elements; otherwise
/// sections are explored down to `depth_bound` and deduplicated with
/// equal_to_depth at `dedup_depth`, and boundedness is reported Unknown.
SectionClosure section_closure(const TreeAutomorphism& g, std::size_t state_bound,
                               std::size_t depth_bound = 8,
                               std::size_t dedup_depth = 8,
                               std::uint64_t cap = kDefaultLevelCap);

/// A shortest vertex moved by g, found along fixed vertices; nullopt if g is
/// the identity (exactly, or to `search_depth` for elements without exact
/// identity knowledge).
std::optional<Vertex> minimal_moved_vertex(const TreeAutomorphism& g,
                                           std::size_t search_depth = 64,
                                           std::uint64_t cap = kDefaultLevelCap);

// Element-definition JSON.
nlohmann::json element_to_json(const TreeAutomorphism& g);
TreeAutomorphism element_from_json(const nlohmann::json& j,
                                   const std::optional<SphericalIndex>& index = std::nullopt);

std::string describe(const TreeAutomorphism& g);

} // namespace cantor
