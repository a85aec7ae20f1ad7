#pragma once

#include "cantor/group_action.hpp"

#include <string>
#include <vector>

namespace cantor {

struct ExampleParams {
  std::optional<std::uint64_t> d;          ///< alphabet for d-ary entries
  std::optional<SphericalIndex> index;     ///< override for rule entries
};

struct CatalogEntry {
  std::string name;
  std::string summary;
  SphericalIndex index;
  std::vector<std::string> names;
  std::vector<TreeAutomorphism> generators;

  GeneratedAction action() const { return GeneratedAction(index, names, generators); }
  const TreeAutomorphism& generator(const std::string& name) const;
  nlohmann::json to_json() const;
};

/// odometer, dihedral, grigorchuk, thm61_b, ex44_c, ex45_c.
std::vector<std::string> catalog_names();
CatalogEntry build_example(const std::string& name, const ExampleParams& params = {});

// Recorded constants of the degenerate examples.
/// 0^l 1, a vertex of level l+1.
Vertex every_level_w(std::size_t l);
/// 0^(2^k - 1) 1, a vertex of level 2^k.
Vertex doubling_w(std::size_t k);

std::shared_ptr<const MealyMachine> odometer_machine(std::uint64_t d);
std::shared_ptr<const MealyMachine> dihedral_machine();
std::shared_ptr<const MealyMachine> grigorchuk_machine();

// Interleaving of two group chains by divisibility of prefix products.
enum class ChainVerdict { Compatible, Incompatible, Undetermined };
std::string_view to_string(ChainVerdict v);

struct ChainReport {
  ChainVerdict verdict = ChainVerdict::Undetermined;
  /// Alternating cut levels i_1 < i'_1 < i_2 < ... found so far (1-based),
  /// as pairs (side, level) with side 0 for n and 1 for n'.
  std::vector<std::pair<int, std::size_t>> interleaving;
  std::optional<std::uint64_t> obstruction_prime;
  int obstruction_side = -1; ///< side whose products the prime divides
  std::size_t horizon = 0;
  nlohmann::json to_json() const;
};

ChainReport chain_compatibility(const SphericalIndex& n, const SphericalIndex& m,
                                std::size_t horizon);

} // namespace cantor
