#pragma once

#include "cantor/rational.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

namespace cantor {

using Digit = std::uint64_t;
using Word = std::vector<Digit>;

/// Default bound on the number of vertices enumerated on one level.
inline constexpr std::uint64_t kDefaultLevelCap = 1'000'000;

/// The sequence (n_1, n_2, ...) of a spherically homogeneous tree, in one of
/// two closed forms. Every entry is at least 2.
class SphericalIndex {
public:
  enum class Mode { EventuallyPeriodic, Geometric };

  static SphericalIndex eventually_periodic(std::vector<std::uint64_t> prefix,
                                            std::vector<std::uint64_t> cycle);
  static SphericalIndex geometric(std::vector<std::uint64_t> prefix,
                                  std::uint64_t ratio);
  static SphericalIndex constant(std::uint64_t d) {
    return eventually_periodic({}, {d});
  }

  Mode mode() const { return mode_; }
  const std::vector<std::uint64_t>& prefix() const { return prefix_; }
  const std::vector<std::uint64_t>& cycle() const { return cycle_; }
  std::uint64_t ratio() const { return ratio_; }

  /// n_level for level >= 1. Throws InvalidIndex if the entry overflows 64 bits.
  std::uint64_t at(std::size_t level) const;

  /// The index of the subtree rooted at a level-`levels` vertex.
  SphericalIndex shifted(std::size_t levels) const;

  std::optional<std::uint64_t> constant_degree() const;
  /// max n_l when the index is bounded (EventuallyPeriodic), else nullopt.
  std::optional<std::uint64_t> bound() const;

  /// n_1 * ... * n_level, exactly.
  BigInt level_size(std::size_t level) const;
  /// Same as level_size but throws CapExceeded above `cap`.
  std::uint64_t level_size_capped(std::size_t level, std::uint64_t cap) const;

  /// Primes dividing at least one entry of the sequence (finite for both forms).
  std::set<std::uint64_t> prime_support() const;

  nlohmann::json to_json() const;
  static SphericalIndex from_json(const nlohmann::json& j);

  friend bool operator==(const SphericalIndex&, const SphericalIndex&) = default;

private:
  SphericalIndex() = default;

  Mode mode_ = Mode::EventuallyPeriodic;
  std::vector<std::uint64_t> prefix_;
  std::vector<std::uint64_t> cycle_;
  std::uint64_t ratio_ = 0;
};

/// A vertex of the tree, i.e. a word (w_1, ..., w_l) with 0 <= w_i < n_i.
/// The root is the empty word.
struct Vertex {
  Word digits;

  std::size_t level() const { return digits.size(); }
  friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

/// Depth-L truncation of a boundary point; stands for the cylinder it spans.
struct BoundaryPrefix {
  Word digits;

  std::size_t depth() const { return digits.size(); }
  Vertex vertex() const { return Vertex{digits}; }
  friend auto operator<=>(const BoundaryPrefix&, const BoundaryPrefix&) = default;
};

/// Throws InvalidDigit if some digit is out of range for its level.
void validate_word(const SphericalIndex& index, const Word& word);

/// mu(dT_v) = 1 / (n_1 ... n_l).
Rational cylinder_measure(const SphericalIndex& index, const Vertex& v);

struct MetricValue {
  bool resolved = false;     ///< false: prefixes agree through their depth
  std::size_t first_difference = 0;
  Rational value;            ///< 1/2^m, or the upper bound 1/2^L when unresolved
};

/// Boundary ultrametric 1/2^m where m is the first level at which the
/// prefixes differ.
MetricValue boundary_metric(const SphericalIndex& index, const BoundaryPrefix& x,
                            const BoundaryPrefix& y);

/// Mixed-radix ranking of the words of one level (first digit most significant).
class LevelCodec {
public:
  LevelCodec(const SphericalIndex& index, std::size_t level,
             std::uint64_t cap = kDefaultLevelCap);

  std::size_t level() const { return radices_.size(); }
  std::uint64_t size() const { return size_; }
  const std::vector<std::uint64_t>& radices() const { return radices_; }

  std::uint64_t rank(const Word& word) const;
  Word unrank(std::uint64_t rank) const;

private:
  std::vector<std::uint64_t> radices_;
  std::uint64_t size_ = 1;
};

std::string word_to_string(const Word& word);
/// Parses "0,1,2" (empty string = root).
Word parse_word(const std::string& text);

} // namespace cantor
