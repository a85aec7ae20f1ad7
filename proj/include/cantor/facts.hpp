#pragma once

#include "cantor/catalog.hpp"

#include <string>
#include <vector>

namespace cantor {

/// A recorded property of a catalog entry, re-checked by computation.
struct Fact {
  std::string id;
  std::string statement;
  bool pass = false;
  nlohmann::json detail;
  nlohmann::json to_json() const;
};

std::vector<Fact> known_facts(const std::string& name, const ExampleParams& params = {});

/// Point a^n . 0^depth in the dihedral action, and its stabilizer check
/// within radius 2n+2: contains a^n b a^-n, every member acts as e or as it,
/// and the seven word sets for n = 0..6 differ pairwise.
struct DihedralStabilizerCheck {
  std::vector<std::vector<GroupWord>> stabilizers;
  std::vector<bool> contains_conjugate;
  std::vector<bool> inside_subgroup;
  bool pairwise_distinct = false;
  bool pass() const;
};
DihedralStabilizerCheck dihedral_stabilizer_check(std::size_t max_n = 6, std::size_t depth = 16);

} // namespace cantor
