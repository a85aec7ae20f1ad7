#pragma once

#include "cantor/automorphism.hpp"

#include <array>
#include <string>
#include <vector>

namespace cantor {

/// Letter 2i is generator i, letter 2i+1 its inverse.
using Letter = std::uint32_t;
using GroupWord = std::vector<Letter>;

inline Letter inverse_letter(Letter l) { return l ^ 1U; }

/// A finitely generated subgroup of Aut(T), given by named generators.
class GeneratedAction {
public:
  GeneratedAction(SphericalIndex index, std::vector<std::string> names,
                  std::vector<TreeAutomorphism> generators);

  const SphericalIndex& index() const { return index_; }
  std::size_t generator_count() const { return names_.size(); }
  std::size_t letter_count() const { return 2 * names_.size(); }
  const std::string& name(std::size_t gen) const { return names_.at(gen); }
  const std::vector<std::string>& names() const { return names_; }
  const TreeAutomorphism& generator(std::size_t gen) const { return letters_.at(2 * gen); }
  const TreeAutomorphism& letter(Letter l) const { return letters_.at(l); }
  bool all_mealy() const { return all_mealy_; }

  std::string letter_name(Letter l) const;
  /// "e" for the empty word; otherwise letters joined with '*'.
  std::string format(const GroupWord& w) const;
  /// Accepts the output of format(), and also bare concatenations of
  /// single-character generator names ("ab^-1a").
  GroupWord parse(const std::string& text) const;

  /// s1 s2 ... sk acts as s1 after s2 after ... after sk.
  TreeAutomorphism evaluate(const GroupWord& w, std::uint64_t cap = kDefaultLevelCap) const;
  Word act(const GroupWord& w, const Word& x) const;
  Word act_letter(Letter l, const Word& x) const;

private:
  SphericalIndex index_;
  std::vector<std::string> names_;
  std::vector<TreeAutomorphism> letters_;
  bool all_mealy_ = true;
};

struct BallOptions {
  std::uint64_t cap = kDefaultLevelCap;
  /// For all-Mealy generators, merge two words only when they are exactly
  /// equal, not merely equal at the dedup depth.
  bool exact_mealy = true;
};

/// Freely reduced words of length <= radius in shortlex order, one per
/// element class. Classes are decided on the level-`dedup_depth` action
/// (or exactly, see BallOptions). Prefix-closed.
struct WordBall {
  std::size_t radius = 0;
  std::size_t dedup_depth = 0;
  bool exact = false;
  std::vector<GroupWord> words;
};

WordBall ball(const GeneratedAction& action, std::size_t radius, std::size_t dedup_depth,
              const BallOptions& options = {});

std::vector<Vertex> level_orbit(const GeneratedAction& action, const Vertex& v,
                                std::uint64_t cap = kDefaultLevelCap);
bool level_transitive(const GeneratedAction& action, std::size_t level,
                      std::uint64_t cap = kDefaultLevelCap);

/// Words of `ball` whose element fixes `v`.
std::vector<GroupWord> stabilizer_words(const GeneratedAction& action, const WordBall& ball,
                                        const Word& v);
std::vector<GroupWord> level_stabilizer(const GeneratedAction& action, std::size_t radius,
                                        std::size_t dedup_depth, const Vertex& v,
                                        const BallOptions& options = {});
/// Ball elements fixing the whole prefix x; the dedup depth is x's depth.
std::vector<GroupWord> point_stabilizer_ball(const GeneratedAction& action, std::size_t radius,
                                             const BoundaryPrefix& x,
                                             const BallOptions& options = {});

/// Pointed, generator-labelled orbit graph. vertices[0] is the basepoint.
/// out[v][i] is the image of v under generator i, or -1 when that image lies
/// outside an extracted ball.
struct SchreierGraph {
  std::vector<std::string> labels;
  std::vector<Word> vertices;
  std::vector<std::vector<std::int64_t>> out;
  std::optional<std::size_t> radius;
};

/// Orbit graph of the all-zeros level-`level` vertex.
SchreierGraph schreier_level_graph(const GeneratedAction& action, std::size_t level,
                                   std::uint64_t cap = kDefaultLevelCap);
/// Radius-r ball around x of the orbit graph of x's depth-L prefix.
SchreierGraph stabilizer_schreier_ball(const GeneratedAction& action, const BoundaryPrefix& x,
                                       std::size_t radius,
                                       std::uint64_t cap = kDefaultLevelCap);
/// Induced subgraph on the vertices within distance r of the basepoint,
/// following edges in both directions.
SchreierGraph ball_of(const SchreierGraph& graph, std::size_t radius);

/// Vertices renumbered by BFS from the basepoint (generator order, out-edge
/// before in-edge); edges are (source, generator, target) in that numbering.
struct CanonicalGraph {
  std::size_t vertex_count = 0;
  std::vector<std::array<std::size_t, 3>> edges;
  std::vector<std::size_t> order; ///< order[i] = original index of canonical vertex i
  friend bool operator==(const CanonicalGraph& a, const CanonicalGraph& b) {
    return a.vertex_count == b.vertex_count && a.edges == b.edges;
  }
};

CanonicalGraph canonical_form(const SchreierGraph& graph);
nlohmann::json canonical_json(const SchreierGraph& graph);
/// 16 hex digits, stable across platforms.
std::string canonical_hash(const SchreierGraph& graph);
bool pointed_isomorphic(const SchreierGraph& a, const SchreierGraph& b);
std::string to_dot(const SchreierGraph& graph);

/// FNV-1a, 64 bit.
std::uint64_t stable_hash(std::string_view bytes);

} // namespace cantor
