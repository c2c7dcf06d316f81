#pragma once

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "mnov/diffalg.hpp"
#include "mnov/enumeration.hpp"
#include "mnov/treealg.hpp"

namespace mnov {

// Everything here lives in the commutative algebra with noncommuting
// derivations; trees realize its Novikov subalgebra generated by the
// variables.
inline constexpr Flavor kTreeFlavor = NCMDCA;

// Right-nested evaluation of a tree: a leaf is its variable, and a node is
// eval(y1) * d_{w1}(eval(rest)). Defined on all trees; invariant under both
// tree rewrites.
inline DPoly eval_in_pcd(const RTree& u) {
  if (u.is_leaf()) return DPoly::gen(kTreeFlavor, u.root);
  RTree rest{u.root, {u.children.begin() + 1, u.children.end()}};
  return tri_right(eval_in_pcd(u.children.front().first), u.children.front().second,
                   eval_in_pcd(rest));
}

inline DPoly eval_in_pcd(const TreePoly& p) {
  DPoly out(kTreeFlavor);
  for (const auto& [t, c] : p.terms()) out += eval_in_pcd(t) * c;
  return out;
}

// The same recursion restricted to nests.
inline DPoly g_map(const RTree& u) {
  if (!is_nest(u)) throw error("g_map needs a nest");
  if (u.is_leaf()) return DPoly::gen(kTreeFlavor, u.root);
  RTree rest{u.root, {u.children.begin() + 1, u.children.end()}};
  return tri_right(g_map(u.children.front().first), u.children.front().second, g_map(rest));
}

inline DPoly g_map(const TreePoly& p) {
  DPoly out(kTreeFlavor);
  for (const auto& [t, c] : p.terms()) out += g_map(t) * c;
  return out;
}

// Monomial companion of g on normal forms: a node contributes its side
// leaves and one derived factor carrying the whole edge word.
inline DMono phi(const RTree& u) {
  if (!is_nmne(u)) throw error("phi needs a normal-form tree");
  std::vector<DVar> factors;
  const RTree* cur = &u;
  while (!cur->is_leaf()) {
    for (size_t i = 1; i < cur->children.size(); ++i)
      factors.push_back(DVar{{}, cur->children[i].first.root});
    factors.push_back(DVar{detail::edge_word(*cur), cur->root});
    cur = &cur->children.front().first;
  }
  factors.push_back(DVar{{}, cur->root});
  return make_mono(kTreeFlavor, std::move(factors));
}

// The unique factorization of a populated monomial: one leading plain
// variable, then blocks of plain variables ending in a derived factor,
// blocks weakly decreasing in (word length, head, word) and the plain
// variables weakly decreasing across the whole monomial.
struct PcdBlock {
  std::vector<Symbol> plains;
  DWord word;
  Symbol head;
};

struct PcdForm {
  Symbol x0;
  std::vector<PcdBlock> blocks;
};

inline PcdForm canonical_pcd_form(const DMono& m) {
  if (!is_populated(m)) throw error("canonical form needs a populated monomial");
  std::vector<Symbol> plains;
  std::vector<PcdBlock> blocks;
  for (const DVar& f : m.factors) {
    if (f.word.empty())
      plains.push_back(f.var);
    else
      blocks.push_back(PcdBlock{{}, f.word, f.var});
  }
  std::sort(plains.begin(), plains.end(), [](Symbol a, Symbol b) { return a.rank > b.rank; });
  std::stable_sort(blocks.begin(), blocks.end(), [](const PcdBlock& a, const PcdBlock& b) {
    if (a.word.size() != b.word.size()) return a.word.size() > b.word.size();
    if (a.head.rank != b.head.rank) return a.head.rank > b.head.rank;
    return lex_compare(a.word, b.word) > 0;
  });

  PcdForm out;
  size_t next = 0;
  out.x0 = plains.at(next++);
  for (PcdBlock& b : blocks) {
    for (size_t i = 1; i < b.word.size(); ++i) b.plains.push_back(plains.at(next++));
    out.blocks.push_back(std::move(b));
  }
  if (next != plains.size()) throw internal_error("canonical form: plain variables left over");
  return out;
}

inline DMono mono_of_pcd_form(const PcdForm& f) {
  std::vector<DVar> factors{DVar{{}, f.x0}};
  for (const PcdBlock& b : f.blocks) {
    for (Symbol x : b.plains) factors.push_back(DVar{{}, x});
    factors.push_back(DVar{b.word, b.head});
  }
  return make_mono(kTreeFlavor, std::move(factors));
}

// Inverse of phi: rebuild the nest block by block, innermost first.
inline RTree psi(const DMono& m) {
  PcdForm form = canonical_pcd_form(m);
  RTree tree = leaf(form.x0);
  for (const PcdBlock& b : form.blocks) {
    RTree node{b.head, {}};
    node.children.emplace_back(std::move(tree), b.word[0]);
    for (size_t i = 0; i < b.plains.size(); ++i)
      node.children.emplace_back(leaf(b.plains[i]), b.word[i + 1]);
    tree = std::move(node);
  }
  if (!is_nmne(tree)) throw internal_error("psi produced a non-normal tree");
  return tree;
}

// Expresses a populated monomial as a tree polynomial that evaluates back
// to it, by repeatedly peeling a highest-order derived factor.
inline TreePoly generate_from_X(const DMono& m) {
  if (!is_populated(m)) throw error("generation needs a populated monomial");
  if (m.factors.size() == 1) return TreePoly::monomial(leaf(m.factors[0].var));

  // The canonical factor order puts a maximal derived factor last.
  DVar pivot = m.factors.back();
  std::vector<DVar> rest(m.factors.begin(), m.factors.end() - 1);
  const int d = static_cast<int>(pivot.word.size());
  Symbol w1 = pivot.word[0];

  if (d == 1) {
    TreePoly base = generate_from_X(make_mono(kTreeFlavor, std::move(rest)));
    return graft(base, w1, TreePoly::monomial(leaf(pivot.var)));
  }

  // Peel the leading derivation: move it onto the product of d-1 plain
  // variables and the shortened factor, then subtract the misdirected terms.
  std::vector<DVar> chosen;
  std::vector<DVar> u2;
  for (const DVar& f : rest) {
    if (f.word.empty() && static_cast<int>(chosen.size()) < d - 1)
      chosen.push_back(f);
    else
      u2.push_back(f);
  }
  if (static_cast<int>(chosen.size()) != d - 1)
    throw internal_error("generation: not enough plain variables");

  DVar shortened{DWord(pivot.word.begin() + 1, pivot.word.end()), pivot.var};

  std::vector<DVar> wfac = chosen;
  wfac.push_back(shortened);
  DMono mw = make_mono(kTreeFlavor, std::move(wfac));

  TreePoly out = graft(generate_from_X(make_mono(kTreeFlavor, u2)), w1, generate_from_X(mw));
  for (size_t j = 0; j < chosen.size(); ++j) {
    std::vector<DVar> fac = u2;
    for (size_t i = 0; i < chosen.size(); ++i)
      if (i != j) fac.push_back(chosen[i]);
    fac.push_back(shortened);
    TreePoly left = generate_from_X(make_mono(kTreeFlavor, std::move(fac)));
    out -= graft(left, w1, TreePoly::monomial(leaf(chosen[j].var)));
  }
  return out;
}

namespace detail {

// Multiset of block lengths, sorted descending. Under the lexicographic
// order on these profiles, g(u) is phi(u) plus strictly smaller monomials:
// the all-stacked Leibniz branch is the unique profile maximum. That makes
// the change of basis between g-images and monomials unitriangular.
inline std::vector<int> block_profile(const DMono& m) {
  std::vector<int> out;
  for (const DVar& f : m.factors)
    if (!f.word.empty()) out.push_back(static_cast<int>(f.word.size()));
  std::sort(out.begin(), out.end(), std::greater<int>());
  return out;
}

inline const DMono* profile_max_monomial(const DPoly& q) {
  const DMono* best = nullptr;
  std::vector<int> best_profile;
  for (const auto& [m, c] : q.terms()) {
    auto prof = block_profile(m);
    if (!best || prof > best_profile ||
        (prof == best_profile && dmono_compare(m, *best) > 0)) {
      best = &m;
      best_profile = std::move(prof);
    }
  }
  return best;
}

}  // namespace detail

// Independent normalizer: evaluate, then invert g by exact back
// substitution along the block-profile order, peeling the unique
// normal-form tree behind each leading monomial. Failure to terminate in
// the class signals an implementation bug, not a user error.
inline TreePoly normalize_semantic(const TreePoly& p) {
  DPoly residual = eval_in_pcd(p);
  TreePoly out;
  while (!residual.is_zero()) {
    DMono lead = *detail::profile_max_monomial(residual);
    if (!is_populated(lead))
      throw internal_error("semantic normalizer: non-populated residual");
    Rat c = residual.terms().at(lead);
    RTree u = psi(lead);
    residual -= g_map(u) * c;
    if (residual.terms().count(lead))
      throw internal_error("semantic normalizer: leading term did not cancel");
    out.add_term(u, c);
  }
  return out;
}

}  // namespace mnov
