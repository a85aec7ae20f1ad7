// Runs the acceptance criteria and prints one line per criterion.
// Exit status is the number of failed criteria.

#include "cantor/catalog.hpp"
#include "cantor/dynamics.hpp"
#include "cantor/facts.hpp"
#include "cantor/irs.hpp"
#include "cantor/random.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>

using namespace cantor;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass)
        detail << "failed: ";
      else
        detail << "; ";
      detail << what;
    }
    pass = pass && ok;
  }
};

std::shared_ptr<const PortraitNode> random_node(CounterStream& rng, const SphericalIndex& idx,
                                                std::size_t level, std::size_t depth) {
  auto nd = std::make_shared<PortraitNode>();
  nd->depth = depth;
  if (depth == 0)
    return nd;
  const auto n = idx.at(level);
  nd->perm.resize(n);
  for (std::size_t k = 0; k < n; ++k)
    nd->perm[k] = k;
  for (std::size_t k = n; k-- > 1;)
    std::swap(nd->perm[k], nd->perm[rng.uniform(k + 1)]);
  for (std::size_t k = 0; k < n; ++k)
    nd->children.push_back(random_node(rng, idx, level + 1, depth - 1));
  return nd;
}

TreeAutomorphism random_portrait(CounterStream& rng, const SphericalIndex& idx, std::size_t depth) {
  return TreeAutomorphism::portrait(idx, random_node(rng, idx, 1, depth));
}

Word random_word(CounterStream& rng, const SphericalIndex& idx, std::size_t depth) {
  Word w;
  for (std::size_t l = 1; l <= depth; ++l)
    w.push_back(rng.uniform(idx.at(l)));
  return w;
}

// 1. stabilizers of the dihedral points a^n.0
void dihedral_stabilizers(Outcome& o) {
  const auto check = dihedral_stabilizer_check(6, 16);
  for (std::size_t n = 0; n <= 6; ++n) {
    o.require(check.contains_conjugate[n], "a^n b a^-n missing for n = " + std::to_string(n));
    o.require(check.inside_subgroup[n], "extra stabilizer element for n = " + std::to_string(n));
  }
  o.require(check.pairwise_distinct, "stabilizer word sets coincide");
  if (o.pass)
    o.detail << "n = 0..6 at L = 16, radius 2n+2; 7 sets pairwise distinct";
}

// 2. fixed measure of the large-swap element against 1 - 4/n
void large_swap_bound(Outcome& o) {
  const auto e = build_example("thm61_b");
  const Rational tol(1, 1000000);
  for (std::size_t l = 0; l <= 4; ++l) {
    const auto iv = certified_fix_interval(e.index, l, tol);
    const Rational bound = 1 - Rational(4, e.index.at(l + 1));
    o.require(iv.width() < tol, "interval too wide at l = " + std::to_string(l));
    o.require(iv.lower > bound, "interval not above 1 - 4/n at l = " + std::to_string(l));
    if (l == 0 && o.pass)
      o.detail << "l = 0: [" << iv.lower.convert_to<double>() << ", "
               << iv.upper.convert_to<double>() << "] > " << bound.convert_to<double>() << "; ";
  }
  if (o.pass)
    o.detail << "l = 0..4 all above with width < 1e-6";
}

// 3. degenerate ratios
void degenerate_ratios(Outcome& o) {
  const auto e45 = build_example("ex45_c", {.d = 2});
  for (std::size_t k = 1; k <= 3; ++k) {
    const std::size_t m = std::size_t{1} << k;
    const auto r = nonfixed_ratio(e45.generator("c"), doubling_w(k), 2 * m + 1);
    Rational want = 1;
    for (std::size_t i = 0; i < m; ++i)
      want /= 2;
    o.require(r.ratio == want, "ex45_c k = " + std::to_string(k) + " gives " + to_string(r.ratio));
  }
  const auto e44 = build_example("ex44_c");
  for (std::size_t l = 1; l <= 4; ++l) {
    const auto r = nonfixed_ratio(e44.generator("c"), every_level_w(l), l + 3);
    o.require(r.ratio == Rational(1, e44.index.at(l + 2)),
              "ex44_c l = " + std::to_string(l) + " gives " + to_string(r.ratio));
  }
  if (o.pass)
    o.detail << "ex45_c: 1/4, 1/16, 1/256; ex44_c: 1/27 .. 1/729 exact";
}

// 4. automaton certification of the Grigorchuk generators
void grigorchuk_certificates(Outcome& o) {
  const auto e = build_example("grigorchuk");
  for (const auto& name : e.names) {
    const auto& g = e.generator(name);
    const auto closure = section_closure(g, 16);
    o.require(closure.bounded == Boundedness::Bounded && closure.sections.size() <= 5,
              name + " closure not bounded by 5");
    const auto cert = certify_nondegenerate(g);
    o.require(cert.certified && cert.alpha > 0, name + " not certified");
    const auto replay = replay_certificate(g, cert, 100, 8, 0);
    o.require(replay.passed, name + " replay failed");
    o.detail << (name == e.names.front() ? "" : "; ") << name << ": alpha "
             << to_string(cert.alpha) << ", " << closure.sections.size() << " states, "
             << replay.checked << " replays";
  }
}

// 5. witnesses and distinct stabilizers
void lqa_dichotomy(Outcome& o) {
  const auto dih = build_example("dihedral").action();
  o.require(lqa_witness_search(dih, 6, 12).empty(), "dihedral has a witness");
  const auto act = build_example("ex45_c", {.d = 2}).action();
  const auto ws = lqa_witness_search(act, 2, 9);
  o.require(!ws.empty(), "no witness for <a, c>");
  const auto tree = distinct_stabilizer_tree(act, 4, 17, 2);
  o.require(tree.points.size() == 4, "tree does not have 4 points");
  o.require(tree.pairs.size() == 6 && tree.all_pairs_separated(), "some pair not separated");
  if (o.pass)
    o.detail << "dihedral empty; " << ws.size() << " witnesses for <a, c> (first g = "
             << act.format(ws.front().g) << "); 4 points, 6 pairs separated at radius 4, L = 17";
}

// 6. empirical stabilizer distributions
void irs_empirics(Outcome& o) {
  for (const char* name : {"odometer", "dihedral"}) {
    const auto act = build_example(name, {.d = 2}).action();
    const auto a = irs_empirical(act, 1000, 64, 4, 0);
    const auto b = irs_empirical(act, 1000, 64, 4, 0);
    o.require(a.to_json().dump() == b.to_json().dump(), std::string(name) + " not reproducible");
    o.require(a.classes.size() == 1 && a.max_frequency >= Rational(999, 1000),
              std::string(name) + " has " + std::to_string(a.classes.size()) + " classes");
  }
  const auto g = build_example("grigorchuk").action();
  std::size_t prev = 0;
  std::ostringstream counts;
  for (std::size_t r = 2; r <= 5; ++r) {
    const auto rep = irs_empirical(g, 500, 32, r, 0);
    o.require(rep.classes.size() >= prev, "class count drops at r = " + std::to_string(r));
    prev = rep.classes.size();
    counts << (r > 2 ? "," : "") << rep.classes.size();
    if (r == 4) {
      o.require(rep.max_frequency < Rational(9, 10), "Grigorchuk max frequency >= 0.9 at r = 4");
      counts << "(max " << rep.max_frequency.convert_to<double>() << ")";
      o.require(rep.to_json().dump() == irs_empirical(g, 500, 32, r, 0).to_json().dump(),
                "Grigorchuk not reproducible");
    }
  }
  if (o.pass)
    o.detail << "odometer, dihedral: 1 class each; Grigorchuk classes at r = 2..5: "
             << counts.str();
}

// 7. chain compatibility
void chains(Outcome& o) {
  const auto primes =
      SphericalIndex::eventually_periodic({2, 3, 5, 7, 11, 13, 17, 19, 23, 29}, {31});
  const auto a = chain_compatibility(primes, SphericalIndex::constant(2), 20);
  o.require(a.verdict == ChainVerdict::Incompatible && a.obstruction_prime == 3u,
            "distinct primes vs 2 not refuted by 3");
  const auto b = chain_compatibility(SphericalIndex::constant(2), SphericalIndex::constant(4), 20);
  o.require(b.verdict == ChainVerdict::Compatible, "2 vs 4 not compatible");
  if (o.pass)
    o.detail << "primes vs 2: incompatible (prime 3); 2 vs 4: compatible";
}

// 8. property suites
void properties(Outcome& o) {
  CounterStream rng(2024, 8);
  std::size_t checks = 0;

  {
    const auto idx = SphericalIndex::eventually_periodic({2}, {3});
    const std::size_t L = 4;
    const auto e = TreeAutomorphism::identity(idx);
    bool ok = true;
    for (int t = 0; t < 200; ++t) {
      auto f = random_portrait(rng, idx, L), g = random_portrait(rng, idx, L),
           h = random_portrait(rng, idx, L);
      ok = ok && equal_to_depth(compose(compose(f, g), h), compose(f, compose(g, h)), L) &&
           equal_to_depth(compose(f, e), f, L) && equal_to_depth(compose(e, f), f, L) &&
           equal_to_depth(compose(f, invert(f)), e, L) &&
           equal_to_depth(compose(invert(f), f), e, L);
      ++checks;
    }
    o.require(ok, "group laws");
  }
  {
    const auto idx = SphericalIndex::constant(3);
    const std::size_t L = 4;
    bool ok = true;
    for (int t = 0; t < 200; ++t) {
      auto g = random_portrait(rng, idx, L), h = random_portrait(rng, idx, L);
      const Word v = random_word(rng, idx, 2);
      auto lhs = section(compose(g, h), Vertex{v});
      auto rhs = compose(section(g, Vertex{cantor::apply(h, v)}), section(h, Vertex{v}));
      ok = ok && equal_to_depth(lhs, rhs, L - 2);
      // the element is rebuilt from its root permutation and first-level sections
      const Word w = random_word(rng, idx, L);
      auto [k, s] = g.step(w[0]);
      Word rebuilt{k};
      const auto tail = cantor::apply(s, Word(w.begin() + 1, w.end()));
      rebuilt.insert(rebuilt.end(), tail.begin(), tail.end());
      ok = ok && rebuilt == cantor::apply(g, w);
      ++checks;
    }
    o.require(ok, "section reconstruction");
  }
  {
    bool ok = true;
    for (const auto& idx : {SphericalIndex::constant(2), SphericalIndex::geometric({3}, 3)}) {
      for (int t = 0; t < 500; ++t) {
        const BoundaryPrefix x{random_word(rng, idx, 12)}, y{random_word(rng, idx, 12)},
            z{random_word(rng, idx, 12)};
        // low digits collide often enough on the binary tree to hit equal prefixes
        const auto xy = boundary_metric(idx, x, y), yx = boundary_metric(idx, y, x);
        const auto yz = boundary_metric(idx, y, z), xz = boundary_metric(idx, x, z);
        ok = ok && xy.value == yx.value && xz.value <= std::max(xy.value, yz.value);
        ++checks;
      }
    }
    const auto act = build_example("grigorchuk").action();
    std::vector<SchreierGraph> balls;
    for (std::size_t i = 0; i < 40; ++i) {
      CounterStream s(17, i);
      balls.push_back(stabilizer_schreier_ball(act, sample_point(act.index(), 32, s), 6));
    }
    for (int t = 0; t < 500; ++t) {
      const auto& x = balls[rng.uniform(balls.size())];
      const auto& y = balls[rng.uniform(balls.size())];
      const auto& z = balls[rng.uniform(balls.size())];
      const auto xy = schreier_metric(x, y, 6).value(), yx = schreier_metric(y, x, 6).value();
      const auto yz = schreier_metric(y, z, 6).value(), xz = schreier_metric(x, z, 6).value();
      ok = ok && xy == yx && xz <= std::max(xy, yz);
      ++checks;
    }
    o.require(ok, "ultrametric");
  }
  {
    bool ok = true;
    for (const auto& name : catalog_names()) {
      const auto idx = build_example(name).index;
      for (std::size_t l = 1; l <= 6; ++l) {
        // children partition their parent, so the level sums to one
        const Word v = random_word(rng, idx, l - 1);
        Rational sum = 0;
        for (Digit k = 0; k < idx.at(l); ++k) {
          Word c = v;
          c.push_back(k);
          sum += cylinder_measure(idx, Vertex{c});
        }
        ok = ok && sum == cylinder_measure(idx, Vertex{v});
        ok = ok && cylinder_measure(idx, Vertex{Word(l, 0)}) * Rational(idx.level_size(l)) == 1;
        ++checks;
      }
    }
    o.require(ok, "measure normalisation");
  }
  {
    bool ok = true;
    for (const auto& name : catalog_names()) {
      const auto e = build_example(name, {.d = 2});
      for (const auto& g : e.generators) {
        RatioEngine engine;
        for (std::size_t level = 0; level <= 2; ++level) {
          const auto fixed = fixed_vertices(g, level);
          for (std::size_t i = 0; i < fixed.size() && i < 10; ++i) {
            Rational prev = 0;
            for (std::size_t L = level + 1; L <= level + 7; ++L) {
              const auto r = nonfixed_ratio(g, fixed[i], L, &engine).ratio;
              ok = ok && r >= prev && r <= 1;
              prev = r;
            }
            ++checks;
          }
        }
      }
    }
    o.require(ok, "monotonicity");
  }
  if (o.pass)
    o.detail << checks << " property cases";
}

} // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    double limit;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "dihedral stabilizers", 5, dihedral_stabilizers},
      {2, "large-swap fixed-measure bound", 1, large_swap_bound},
      {3, "degenerate ratios", 0, degenerate_ratios},
      {4, "automaton certification", 10, grigorchuk_certificates},
      {5, "LQA dichotomy and distinct stabilizers", 60, lqa_dichotomy},
      {6, "IRS empirics", 120, irs_empirics},
      {7, "chain compatibility", 1, chains},
      {8, "property suites", 0, properties},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit > 0 && secs > c.limit)
      o.require(false, "over the " + std::to_string(c.limit) + " s limit");
    failed += !o.pass;
    std::printf("criterion %d %-40s %s  %.3f s  %s\n", c.id, c.title, o.pass ? "PASS" : "FAIL", secs,
                o.detail.str().c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed;
}
