#pragma once

#include "cantor/group_action.hpp"

#include <memory>
#include <string>
#include <vector>

namespace cantor {

/// Measure of the points moved by h at depth `remaining`, as a fraction of
/// the whole tree h acts on. Results are memoised on (state, remaining) and
/// shared between calls, so one engine should serve a whole scan.
class RatioEngine {
public:
  struct Value {
    Rational moved;
    /// true when the moved set below is a finite union of cylinders that is
    /// fully decided within the window, so `moved` is the exact measure
    bool resolved = false;
  };

  explicit RatioEngine(std::uint64_t work_limit = 200'000'000);
  ~RatioEngine();
  RatioEngine(const RatioEngine&) = delete;
  RatioEngine& operator=(const RatioEngine&) = delete;

  const Value& moved_fraction(const TreeAutomorphism& h, std::size_t remaining);
  bool identity_to_depth(const TreeAutomorphism& h, std::size_t depth) {
    return moved_fraction(h, depth).moved == 0;
  }

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

bool fixes(const TreeAutomorphism& g, const Word& w);

/// All level-`level` vertices fixed by g, in lex order.
std::vector<Vertex> fixed_vertices(const TreeAutomorphism& g, std::size_t level,
                                   std::uint64_t cap = kDefaultLevelCap);

struct RatioResult {
  Rational ratio;
  bool resolved = false;
  std::size_t truncation_depth = 0;
};

/// mu{w in dT_v : g w != w at depth L} / mu(dT_v). Throws NotFixed if g moves v.
RatioResult nonfixed_ratio(const TreeAutomorphism& g, const Vertex& v, std::size_t depth,
                           RatioEngine* engine = nullptr);

struct DegeneracyWitness {
  Vertex vertex;
  Rational ratio;
  bool resolved = false;
  std::size_t truncation_depth = 0;
};

struct DegeneracyReport {
  std::vector<DegeneracyWitness> witnesses; ///< fixed vertices with non-identity restriction
  std::size_t witnesses_total = 0;          ///< before truncating the list
  std::optional<Rational> min_ratio;
  std::optional<DegeneracyWitness> refuting;
  Rational threshold;
  std::size_t max_level = 0;
  bool refutes() const { return refuting.has_value(); }
  std::string verdict() const;
  nlohmann::json to_json() const;
};

struct ScanOptions {
  std::size_t max_level = 8;
  std::size_t margin = 8;
  Rational threshold = Rational(1, 100);
  std::size_t list_limit = 64;
  std::uint64_t cap = kDefaultLevelCap;
};

DegeneracyReport degeneracy_scan(const TreeAutomorphism& g, const ScanOptions& options);

struct Certificate {
  bool certified = false;
  Rational alpha;
  std::string method; ///< "AutomatonClosure" or "BoundedIndex"
  /// Depth below a fixed vertex by which a moved cylinder of measure >= alpha
  /// is guaranteed to show up; used by replay.
  std::size_t witness_depth = 0;
  nlohmann::json evidence;
  std::string reason; ///< why not certified
  nlohmann::json to_json() const;
};

struct CertifyOptions {
  std::size_t state_bound = 64;
  std::size_t depth_bound = 8;
  std::size_t search_depth = 64;
  std::uint64_t cap = kDefaultLevelCap;
};

Certificate certify_nondegenerate(const TreeAutomorphism& g, const CertifyOptions& options = {});

struct ReplayReport {
  std::size_t candidates = 0; ///< fixed vertices with non-identity section found
  std::size_t checked = 0;
  bool passed = true;
  std::optional<Rational> min_ratio;
  std::vector<Vertex> failures;
  nlohmann::json to_json() const;
};

/// Checks nonfixed_ratio >= alpha at `samples` random fixed vertices (levels
/// 1..max_level) whose section is not the identity.
ReplayReport replay_certificate(const TreeAutomorphism& g, const Certificate& cert,
                                std::size_t samples = 100, std::size_t max_level = 8,
                                std::uint64_t seed = 0, std::uint64_t cap = kDefaultLevelCap);

struct HolonomyReport {
  std::vector<std::optional<Vertex>> witnesses; ///< index l: moved vertex below x|l
  std::size_t depth = 0;
  std::size_t margin = 0;
  bool nontrivial() const;
  std::string verdict() const;
  nlohmann::json to_json() const;
};

HolonomyReport holonomy_witness(const TreeAutomorphism& g, const BoundaryPrefix& x,
                                std::size_t depth, std::size_t margin = 4);

struct LqaWitness {
  GroupWord g;
  Vertex U;
  Vertex V;
  std::size_t depth = 0;
};

struct LqaOptions {
  std::size_t margin = 2;           ///< V's level is at most depth - margin
  std::size_t per_element = 16;     ///< witnesses listed per ball element
  std::size_t limit = 256;
  std::uint64_t cap = kDefaultLevelCap;
};

std::vector<LqaWitness> lqa_witness_search(const GeneratedAction& action, std::size_t radius,
                                           std::size_t depth, const LqaOptions& options = {});
nlohmann::json lqa_to_json(const GeneratedAction& action, const std::vector<LqaWitness>& ws);

struct DistinctStabilizerOptions {
  std::optional<Word> base_point; ///< default: the last digit at every level
  std::size_t margin = 2;
  std::uint64_t cap = kDefaultLevelCap;
};

struct DistinctStabilizerResult {
  struct Point {
    std::string label;       ///< binary word k_1...k_n
    BoundaryPrefix y;
    GroupWord reached_by;    ///< y = reached_by . base point
    Vertex cylinder;         ///< W_label
  };
  struct Separator {
    std::string prefix;      ///< label of the split; g_{prefix 0}
    GroupWord g;
    Vertex fixed_cylinder;   ///< W_{prefix 0}: g is the identity here at depth L
    Vertex moved_cylinder;   ///< W_{prefix 1}: g moves every point here
  };
  struct PairCheck {
    std::size_t i = 0, j = 0;
    GroupWord separator;
    bool in_first = false, in_second = false;
    bool distinct_sets = false;
  };
  std::vector<Point> points;
  std::vector<Separator> separators;
  std::vector<PairCheck> pairs;
  std::vector<std::vector<GroupWord>> stabilizers;
  std::size_t radius = 0, depth = 0, levels = 0;
  bool all_pairs_separated() const;
  nlohmann::json to_json(const GeneratedAction& action) const;
};

/// Builds 2^n orbit points with pairwise distinct depth-L stabilizer balls by
/// splitting cylinders W into a part fixed pointwise and a part moved
/// entirely by one ball element. Throws SearchExhausted if some split cannot
/// be found at this scale.
DistinctStabilizerResult distinct_stabilizer_tree(const GeneratedAction& action,
                                                  std::size_t radius, std::size_t depth,
                                                  std::size_t n,
                                                  const DistinctStabilizerOptions& options = {});

struct DensityPoint {
  std::size_t level = 0;
  Rational ratio;
};

/// mu(Fix_L(g) ∩ dT_{x|l}) / mu(dT_{x|l}) for each requested level.
std::vector<DensityPoint> density_profile(const TreeAutomorphism& g, const BoundaryPrefix& x,
                                          const std::vector<std::size_t>& levels,
                                          std::size_t depth);

/// Interval certified to contain prod_{j>l} (n_j - 2)/n_j, the Fix density of
/// the swap-first-large-digit element at a fixed level-l cylinder. Needs a
/// geometric index. The product is truncated at the first K with width < tol.
struct FixInterval {
  std::size_t level = 0;
  std::size_t truncation = 0; ///< K
  Rational lower, upper;
  Rational width() const { return upper - lower; }
};
FixInterval certified_fix_interval(const SphericalIndex& index, std::size_t level,
                                   const Rational& tolerance);

} // namespace cantor
