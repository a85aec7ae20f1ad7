#include "cantor/irs.hpp"

#include "cantor/error.hpp"

#include <algorithm>
#include <map>

namespace cantor {

BoundaryPrefix sample_point(const SphericalIndex& index, std::size_t depth, CounterStream& rng) {
  BoundaryPrefix x;
  x.digits.reserve(depth);
  for (std::size_t l = 1; l <= depth; ++l)
    x.digits.push_back(rng.uniform(index.at(l)));
  return x;
}

IrsSampleReport irs_empirical(const GeneratedAction& action, std::size_t samples,
                              std::size_t depth, std::size_t radius, std::uint64_t seed,
                              std::uint64_t cap) {
  if (samples == 0)
    fail(ErrorKind::InvalidParams, "sample count must be positive");
  IrsSampleReport rep;
  rep.generators = action.names();
  rep.samples = samples;
  rep.depth = depth;
  rep.radius = radius;
  rep.seed = seed;
  std::map<std::string, IrsClass> classes;
  for (std::size_t i = 0; i < samples; ++i) {
    CounterStream rng(seed, i);
    const auto x = sample_point(action.index(), depth, rng);
    auto ball = stabilizer_schreier_ball(action, x, radius, cap);
    auto h = canonical_hash(ball);
    auto [it, fresh] = classes.try_emplace(h);
    if (fresh) {
      it->second.hash = h;
      it->second.representative = std::move(ball);
    }
    ++it->second.count;
  }
  for (auto& [h, c] : classes) {
    c.frequency = Rational(c.count, samples);
    rep.classes.push_back(std::move(c));
  }
  std::stable_sort(rep.classes.begin(), rep.classes.end(),
                   [](const IrsClass& a, const IrsClass& b) { return a.count > b.count; });
  rep.max_frequency = rep.classes.front().frequency;
  return rep;
}

nlohmann::json IrsSampleReport::to_json() const {
  auto cs = nlohmann::json::array();
  for (const auto& c : classes)
    cs.push_back({{"hash", c.hash},
                  {"count", c.count},
                  {"frequency", rational_to_json(c.frequency)},
                  {"ball_vertices", c.representative.vertices.size()}});
  return {{"generators", generators},
          {"samples", samples},
          {"depth", depth},
          {"radius", radius},
          {"seed", seed},
          {"class_count", classes.size()},
          {"max_frequency", rational_to_json(max_frequency)},
          {"classes", cs}};
}

Rational SchreierDistance::value() const {
  return inverse_power_of_two(agree_radius ? *agree_radius : tested_radius);
}

nlohmann::json SchreierDistance::to_json() const {
  nlohmann::json j{{"tested_radius", tested_radius},
                   {"indistinguishable", indistinguishable()}};
  if (agree_radius) {
    j["agree_radius"] = *agree_radius;
    j["distance"] = rational_to_json(value());
  } else {
    j["upper_bound"] = rational_to_json(value());
  }
  return j;
}

SchreierDistance schreier_metric(const SchreierGraph& a, const SchreierGraph& b,
                                 std::size_t r_max) {
  if (a.labels != b.labels)
    fail(ErrorKind::InvalidParams, "Schreier graphs carry different generator labels");
  std::size_t top = r_max;
  for (const auto* g : {&a, &b})
    if (g->radius)
      top = std::min(top, *g->radius);
  SchreierDistance d;
  d.tested_radius = top;
  // radius-0 balls are single pointed vertices and always agree
  for (std::size_t r = 1; r <= top; ++r)
    if (canonical_form(ball_of(a, r)) != canonical_form(ball_of(b, r))) {
      d.agree_radius = r - 1;
      return d;
    }
  return d;
}

SchreierGraph move_basepoint(const SchreierGraph& graph, std::size_t v) {
  const auto n = graph.vertices.size();
  if (v >= n)
    fail(ErrorKind::InvalidParams, "basepoint is not a vertex of the graph");
  std::vector<std::int64_t> renumber(n);
  for (std::size_t i = 0; i < n; ++i)
    renumber[i] = static_cast<std::int64_t>(i);
  std::swap(renumber[0], renumber[v]);
  SchreierGraph out;
  out.labels = graph.labels;
  out.radius = std::nullopt;
  out.vertices.resize(n);
  out.out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = static_cast<std::size_t>(renumber[i]);
    out.vertices[j] = graph.vertices[i];
    for (auto t : graph.out[i])
      out.out[j].push_back(t >= 0 ? renumber[static_cast<std::size_t>(t)] : -1);
  }
  return out;
}

nlohmann::json AtomicityReport::to_json() const {
  auto rs = nlohmann::json::array();
  for (const auto& r : rows)
    rs.push_back({{"radius", r.radius},
                  {"classes", r.classes},
                  {"max_frequency", rational_to_json(r.max_frequency)}});
  return {{"verdict", verdict},
          {"threshold", rational_to_json(threshold)},
          {"rows", rs},
          {"note", "empirical at the sampled scale"}};
}

AtomicityReport atomicity_report(const std::vector<IrsSampleReport>& runs,
                                 const Rational& threshold) {
  if (runs.size() < 2)
    fail(ErrorKind::InvalidParams, "atomicity needs runs at two or more radii");
  AtomicityReport rep;
  rep.threshold = threshold;
  for (const auto& r : runs)
    rep.rows.push_back({r.radius, r.classes.size(), r.max_frequency});
  std::sort(rep.rows.begin(), rep.rows.end(),
            [](const auto& a, const auto& b) { return a.radius < b.radius; });
  const bool high = std::all_of(rep.rows.begin(), rep.rows.end(),
                                [&](const auto& r) { return r.max_frequency >= threshold; });
  bool nonincreasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    nonincreasing = nonincreasing && rep.rows[i].max_frequency <= rep.rows[i - 1].max_frequency;
  const bool decays = nonincreasing && rep.rows.back().max_frequency < rep.rows.front().max_frequency;
  if (high && rep.rows.back().max_frequency == rep.rows[rep.rows.size() - 2].max_frequency)
    rep.verdict = "atom candidate";
  else if (decays)
    rep.verdict = "non-atomic trend";
  else
    rep.verdict = "inconclusive";
  return rep;
}

bool ChabautyBasicSet::contains_stabilizer_of(const GeneratedAction& action,
                                              const Word& x) const {
  auto fixes = [&](const GroupWord& w) { return action.act(w, x) == x; };
  return std::all_of(inside.begin(), inside.end(), fixes) &&
         std::none_of(outside.begin(), outside.end(), fixes);
}

} // namespace cantor
