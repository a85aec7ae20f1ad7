#pragma once

#include "cantor/group_action.hpp"
#include "cantor/random.hpp"

#include <string>
#include <vector>

namespace cantor {

/// Depth-L prefix with independent uniform digits.
BoundaryPrefix sample_point(const SphericalIndex& index, std::size_t depth, CounterStream& rng);

struct IrsClass {
  std::string hash;
  SchreierGraph representative;
  std::size_t count = 0;
  Rational frequency;
};

struct IrsSampleReport {
  std::vector<std::string> generators;
  std::size_t samples = 0;
  std::size_t depth = 0;
  std::size_t radius = 0;
  std::uint64_t seed = 0;
  std::vector<IrsClass> classes; ///< by count, then hash
  Rational max_frequency;
  nlohmann::json to_json() const;
};

/// Samples are drawn from stream i = sample number, so any subset of samples
/// can be recomputed alone.
IrsSampleReport irs_empirical(const GeneratedAction& action, std::size_t samples,
                              std::size_t depth, std::size_t radius, std::uint64_t seed,
                              std::uint64_t cap = kDefaultLevelCap);

struct SchreierDistance {
  /// largest tested radius with isomorphic pointed balls, if some radius differs
  std::optional<std::size_t> agree_radius;
  std::size_t tested_radius = 0;
  bool indistinguishable() const { return !agree_radius; }
  /// 1/2^k, or the upper bound 1/2^tested when indistinguishable
  Rational value() const;
  nlohmann::json to_json() const;
};

SchreierDistance schreier_metric(const SchreierGraph& a, const SchreierGraph& b,
                                 std::size_t r_max);

/// Same graph pointed at vertex v.
SchreierGraph move_basepoint(const SchreierGraph& graph, std::size_t v);

struct AtomicityRow {
  std::size_t radius = 0;
  std::size_t classes = 0;
  Rational max_frequency;
};

struct AtomicityReport {
  std::vector<AtomicityRow> rows;
  Rational threshold;
  std::string verdict; ///< "atom candidate", "non-atomic trend" or "inconclusive"
  nlohmann::json to_json() const;
};

AtomicityReport atomicity_report(const std::vector<IrsSampleReport>& runs,
                                 const Rational& threshold = Rational(9, 10));

/// Chabauty-Fell basic set {H : A in H, B disjoint from H}, tested on the
/// depth-L stabilizer of a point using word representatives.
struct ChabautyBasicSet {
  std::vector<GroupWord> inside;
  std::vector<GroupWord> outside;
  bool contains_stabilizer_of(const GeneratedAction& action, const Word& x) const;
};

} // namespace cantor
