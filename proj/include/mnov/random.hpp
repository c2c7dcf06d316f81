#pragma once

#include <random>
#include <span>

#include "mnov/diffalg.hpp"
#include "mnov/treealg.hpp"

namespace mnov {

using Rng = std::mt19937_64;

inline int rand_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Symbol rand_pick(Rng& rng, std::span<const Symbol> pool) {
  return pool[rand_int(rng, 0, static_cast<int>(pool.size()) - 1)];
}

// Uniformly shaped planar tree with exactly `nodes` nodes and random labels.
inline RTree random_tree_exact(Rng& rng, std::span<const Symbol> vars,
                               std::span<const Symbol> ops, int nodes) {
  if (nodes <= 1) return leaf(rand_pick(rng, vars));
  RTree out{rand_pick(rng, vars), {}};
  int remaining = nodes - 1;
  int parts = rand_int(rng, 1, remaining);
  for (int i = 0; i < parts; ++i) {
    int size = (i + 1 == parts) ? remaining : rand_int(rng, 1, remaining - (parts - 1 - i));
    remaining -= size;
    out.children.emplace_back(random_tree_exact(rng, vars, ops, size), rand_pick(rng, ops));
  }
  return out;
}

inline RTree random_tree(Rng& rng, std::span<const Symbol> vars, std::span<const Symbol> ops,
                         int max_nodes) {
  return random_tree_exact(rng, vars, ops, rand_int(rng, 1, max_nodes));
}

inline Rat random_coeff(Rng& rng) {
  int num = 0;
  while (num == 0) num = rand_int(rng, -3, 3);
  return rat(num, rand_int(rng, 1, 3));
}

// Random polynomial with small monomials: at most `max_factors` factors per
// term and derivation words of length at most `max_word`.
inline DPoly random_poly(Rng& rng, Flavor fl, std::span<const Symbol> vars,
                         std::span<const Symbol> ops, int max_terms = 3,
                         int max_factors = 3, int max_word = 2) {
  DPoly out(fl);
  int terms = rand_int(rng, 1, max_terms);
  for (int t = 0; t < terms; ++t) {
    std::vector<DVar> factors;
    int nf = rand_int(rng, 1, max_factors);
    for (int f = 0; f < nf; ++f) {
      DWord word;
      int wl = rand_int(rng, 0, max_word);
      for (int i = 0; i < wl; ++i) word.push_back(rand_pick(rng, ops));
      factors.push_back(make_dvar(fl, std::move(word), rand_pick(rng, vars)));
    }
    out.add_term(make_mono(fl, std::move(factors)), random_coeff(rng));
  }
  return out;
}

}  // namespace mnov
