#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "mnov/diffalg.hpp"
#include "mnov/treealg.hpp"

namespace mnov {

// ---------------------------------------------------------------------------
// Exact sparse linear algebra over the rationals.

// Sorted (column, coefficient) pairs, no zeros.
using SparseRow = std::vector<std::pair<int, Rat>>;

namespace detail {

inline void row_axpy(SparseRow& r, const Rat& f, const SparseRow& s) {
  SparseRow out;
  out.reserve(r.size() + s.size());
  size_t i = 0, j = 0;
  while (i < r.size() || j < s.size()) {
    if (j == s.size() || (i < r.size() && r[i].first < s[j].first)) {
      out.push_back(r[i++]);
    } else if (i == r.size() || s[j].first < r[i].first) {
      out.emplace_back(s[j].first, f * s[j].second);
      ++j;
    } else {
      Rat v = r[i].second + f * s[j].second;
      if (!is_zero(v)) out.emplace_back(r[i].first, v);
      ++i, ++j;
    }
  }
  r = std::move(out);
}

// Incremental row-echelon accumulator; pivots are kept monic.
class Eliminator {
 public:
  // Reduces r against the pivots in place; returns false if it vanished.
  bool reduce(SparseRow& r) const {
    size_t scan = 0;
    while (scan < r.size()) {
      auto it = pivots_.find(r[scan].first);
      if (it == pivots_.end()) {
        ++scan;
        continue;
      }
      Rat f = -r[scan].second;
      row_axpy(r, f, rows_[it->second]);
    }
    return !r.empty();
  }

  // Reduce, then register as a new pivot row if independent.
  bool insert(SparseRow r) {
    if (!reduce(r)) return false;
    Rat inv = 1 / r.front().second;
    for (auto& [c, v] : r) v *= inv;
    pivots_.emplace(r.front().first, rows_.size());
    rows_.push_back(std::move(r));
    return true;
  }

  int rank() const { return static_cast<int>(rows_.size()); }

 private:
  std::map<int, size_t> pivots_;
  std::vector<SparseRow> rows_;
};

}  // namespace detail

inline int sparse_rank(const std::vector<SparseRow>& rows) {
  detail::Eliminator e;
  for (const auto& r : rows) e.insert(r);
  return e.rank();
}

// Solves sum_i c_i * basis[i] = target exactly; nullopt when the target is
// outside the span.
inline std::optional<std::vector<Rat>> solve_in_span(const std::vector<SparseRow>& basis,
                                                     const SparseRow& target) {
  const int n = static_cast<int>(basis.size());
  // Echelon rows carry their expression in terms of the original basis.
  std::vector<SparseRow> rows;
  std::vector<std::vector<Rat>> combos;
  std::map<int, size_t> pivots;

  auto reduce = [&](SparseRow& r, std::vector<Rat>& combo) {
    size_t scan = 0;
    while (scan < r.size()) {
      auto it = pivots.find(r[scan].first);
      if (it == pivots.end()) {
        ++scan;
        continue;
      }
      Rat f = -r[scan].second;
      detail::row_axpy(r, f, rows[it->second]);
      for (int i = 0; i < n; ++i) combo[i] += f * combos[it->second][i];
    }
  };

  for (int i = 0; i < n; ++i) {
    SparseRow r = basis[i];
    std::vector<Rat> combo(n);
    combo[i] = 1;
    reduce(r, combo);
    if (r.empty()) continue;
    Rat inv = 1 / r.front().second;
    for (auto& [c, v] : r) v *= inv;
    for (auto& v : combo) v *= inv;
    pivots.emplace(r.front().first, rows.size());
    rows.push_back(std::move(r));
    combos.push_back(std::move(combo));
  }

  SparseRow rest = target;
  std::vector<Rat> coeffs(n);
  while (!rest.empty()) {
    auto it = pivots.find(rest.front().first);
    if (it == pivots.end()) return std::nullopt;
    Rat f = rest.front().second;
    detail::row_axpy(rest, -f, rows[it->second]);
    for (int i = 0; i < n; ++i) coeffs[i] += f * combos[it->second][i];
  }
  return coeffs;
}

namespace detail {

template <class T, class Less>
std::vector<SparseRow> index_rows(const std::vector<const std::map<T, Rat, Less>*>& termmaps) {
  std::map<T, int, Less> index;
  for (const auto* m : termmaps)
    for (const auto& [k, v] : *m) index.emplace(k, 0);
  int next = 0;
  for (auto& [k, v] : index) v = next++;
  std::vector<SparseRow> rows;
  rows.reserve(termmaps.size());
  for (const auto* m : termmaps) {
    SparseRow r;
    r.reserve(m->size());
    for (const auto& [k, v] : *m) r.emplace_back(index.at(k), v);
    std::sort(r.begin(), r.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace detail

inline std::vector<SparseRow> to_rows(const std::vector<DPoly>& vecs) {
  std::vector<const std::map<DMono, Rat, DMonoLess>*> maps;
  for (const auto& p : vecs) maps.push_back(&p.terms());
  return detail::index_rows(maps);
}

inline std::vector<SparseRow> to_rows(const std::vector<TreePoly>& vecs) {
  std::vector<const std::map<RTree, Rat, RTreeLess>*> maps;
  for (const auto& p : vecs) maps.push_back(&p.terms());
  return detail::index_rows(maps);
}

inline int rank(const std::vector<DPoly>& vecs) { return sparse_rank(to_rows(vecs)); }
inline int rank(const std::vector<TreePoly>& vecs) { return sparse_rank(to_rows(vecs)); }

// ---------------------------------------------------------------------------
// Graded enumeration.

namespace detail {

// Weakly decreasing sequences of the given length over the alphabet
// (i.e. multisets in their canonical arrangement).
inline void gen_decreasing(std::span<const Symbol> alphabet, int len, int max_idx,
                           std::vector<Symbol>& cur,
                           std::vector<std::vector<Symbol>>& out) {
  if (len == 0) {
    out.push_back(cur);
    return;
  }
  for (int i = max_idx; i >= 0; --i) {
    cur.push_back(alphabet[i]);
    gen_decreasing(alphabet, len - 1, i, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::vector<Symbol>> decreasing_sequences(std::span<const Symbol> alphabet,
                                                             int len) {
  std::vector<std::vector<Symbol>> out;
  std::vector<Symbol> cur;
  if (!alphabet.empty())
    gen_decreasing(alphabet, len, static_cast<int>(alphabet.size()) - 1, cur, out);
  else if (len == 0)
    out.push_back({});
  return out;
}

inline void gen_words(std::span<const Symbol> alphabet, int len, std::vector<Symbol>& cur,
                      std::vector<DWord>& out) {
  if (len == 0) {
    out.push_back(cur);
    return;
  }
  for (Symbol s : alphabet) {
    cur.push_back(s);
    gen_words(alphabet, len - 1, cur, out);
    cur.pop_back();
  }
}

inline std::vector<DWord> all_words(std::span<const Symbol> alphabet, int len) {
  std::vector<DWord> out;
  std::vector<Symbol> cur;
  gen_words(alphabet, len, cur, out);
  return out;
}

struct Block {
  DWord word;
  Symbol head;
};

// Canonical chain order: longer blocks first, ties by head then by word,
// all descending; equal blocks may repeat.
inline bool block_may_follow(const Block& prev, const Block& next) {
  if (prev.word.size() != next.word.size()) return prev.word.size() > next.word.size();
  if (prev.head.rank != next.head.rank) return prev.head.rank > next.head.rank;
  return lex_compare(prev.word, next.word) >= 0;
}

inline DMono assemble_populated(const std::vector<Symbol>& plains,
                                const std::vector<Block>& blocks) {
  std::vector<DVar> factors;
  factors.reserve(plains.size() + blocks.size());
  for (Symbol x : plains) factors.push_back(DVar{{}, x});
  for (const Block& b : blocks) factors.push_back(DVar{b.word, b.head});
  return make_mono(NCMDCA, std::move(factors));
}

}  // namespace detail

// All canonical populated monomials with exactly k derivation occurrences
// over the given alphabets.
inline std::vector<DMono> enum_populated(std::span<const Symbol> X,
                                         std::span<const Symbol> Omega, int k) {
  if (k < 0) throw error("negative grade");
  std::vector<DMono> out;
  std::vector<detail::Block> blocks;

  auto emit = [&]() {
    int s = static_cast<int>(blocks.size());
    for (auto& plains : detail::decreasing_sequences(X, k + 1 - s))
      out.push_back(detail::assemble_populated(plains, blocks));
  };

  auto rec = [&](auto&& self, int remaining) -> void {
    if (remaining == 0) {
      emit();
      return;
    }
    int maxlen = blocks.empty() ? remaining
                                : std::min<int>(remaining, static_cast<int>(blocks.back().word.size()));
    for (int len = maxlen; len >= 1; --len) {
      for (auto& w : detail::all_words(Omega, len)) {
        for (Symbol h : X) {
          detail::Block b{w, h};
          if (!blocks.empty() && !detail::block_may_follow(blocks.back(), b)) continue;
          blocks.push_back(b);
          self(self, remaining - len);
          blocks.pop_back();
        }
      }
    }
  };
  rec(rec, k);
  return out;
}

namespace detail {

// Sequences drawn without replacement from a multiset of symbols.
inline void gen_words_from_pool(std::map<Symbol, int>& pool, int len, std::vector<Symbol>& cur,
                                std::vector<DWord>& out) {
  if (len == 0) {
    out.push_back(cur);
    return;
  }
  for (auto& [s, cnt] : pool) {
    if (cnt == 0) continue;
    --cnt;
    cur.push_back(s);
    gen_words_from_pool(pool, len - 1, cur, out);
    cur.pop_back();
    ++cnt;
  }
}

}  // namespace detail

// Canonical populated monomials whose variable and operation label
// multisets match the given ones exactly.
inline std::vector<DMono> enum_populated_class(const std::vector<Symbol>& var_labels,
                                               const std::vector<Symbol>& op_labels) {
  if (var_labels.size() != op_labels.size() + 1)
    return {};  // such a class holds no populated monomial
  std::map<Symbol, int> var_pool, op_pool;
  for (Symbol s : var_labels) ++var_pool[s];
  for (Symbol s : op_labels) ++op_pool[s];

  std::vector<DMono> out;
  std::vector<detail::Block> blocks;

  auto emit = [&]() {
    std::vector<Symbol> plains;
    for (auto& [s, cnt] : var_pool)
      for (int i = 0; i < cnt; ++i) plains.push_back(s);
    std::sort(plains.begin(), plains.end(),
              [](Symbol a, Symbol b) { return a.rank > b.rank; });
    out.push_back(detail::assemble_populated(plains, blocks));
  };

  auto rec = [&](auto&& self, int remaining) -> void {
    if (remaining == 0) {
      emit();
      return;
    }
    int maxlen = blocks.empty() ? remaining
                                : std::min<int>(remaining, static_cast<int>(blocks.back().word.size()));
    for (int len = maxlen; len >= 1; --len) {
      std::vector<DWord> words;
      std::vector<Symbol> cur;
      detail::gen_words_from_pool(op_pool, len, cur, words);
      for (auto& w : words) {
        for (auto& [h, cnt] : var_pool) {
          if (cnt == 0) continue;
          detail::Block b{w, h};
          if (!blocks.empty() && !detail::block_may_follow(blocks.back(), b)) continue;
          for (Symbol s : w) --op_pool[s];
          --cnt;
          blocks.push_back(b);
          self(self, remaining - len);
          blocks.pop_back();
          ++cnt;
          for (Symbol s : w) ++op_pool[s];
        }
      }
    }
  };
  rec(rec, static_cast<int>(op_labels.size()));
  return out;
}

// All nests with exactly k edges over the alphabets that pass the
// normal-form predicate. Enumerates the nest shape first to prune.
inline std::vector<RTree> enum_nmne(std::span<const Symbol> X, std::span<const Symbol> Omega,
                                    int k) {
  if (k < 0) throw error("negative grade");
  std::vector<RTree> out;
  if (k == 0) {
    for (Symbol x : X) out.push_back(leaf(x));
    return out;
  }

  // Level lengths, innermost first; each level adds (root, edges, side leaves).
  std::vector<int> comp;
  auto build_levels = [&](auto&& self, size_t level, const RTree& below) -> void {
    if (level == comp.size()) {
      if (is_nmne(below)) out.push_back(below);
      return;
    }
    int len = comp[level];
    for (Symbol root : X) {
      for (auto& edges : detail::all_words(Omega, len)) {
        std::vector<std::vector<Symbol>> sides =
            detail::decreasing_sequences(X, len - 1);
        for (auto& side : sides) {
          RTree node{root, {}};
          node.children.emplace_back(below, edges[0]);
          for (int i = 0; i + 1 < len; ++i)
            node.children.emplace_back(leaf(side[i]), edges[i + 1]);
          self(self, level + 1, node);
        }
      }
    }
  };

  auto rec_comp = [&](auto&& self, int remaining) -> void {
    if (remaining == 0) {
      for (Symbol x : X) build_levels(build_levels, 0, leaf(x));
      return;
    }
    for (int part = 1; part <= remaining; ++part) {
      comp.push_back(part);
      self(self, remaining - part);
      comp.pop_back();
    }
  };
  rec_comp(rec_comp, k);
  return out;
}

// Every planar typed tree with the given node count.
inline std::vector<RTree> enum_all_trees_nodes(std::span<const Symbol> X,
                                               std::span<const Symbol> Omega, int nodes,
                                               size_t cap = 200000) {
  if (nodes <= 0) return {};
  std::vector<RTree> out;
  if (nodes == 1) {
    for (Symbol x : X) out.push_back(leaf(x));
    return out;
  }
  std::vector<RTree> partial;  // children subtrees chosen so far (without edges)

  auto attach = [&](auto&& self, size_t idx, RTree& shell) -> void {
    if (idx == shell.children.size()) {
      for (Symbol root : X) {
        shell.root = root;
        out.push_back(shell);
        if (out.size() > cap) throw error("tree enumeration exceeds the configured cap");
      }
      return;
    }
    for (Symbol e : Omega) {
      shell.children[idx].second = e;
      self(self, idx + 1, shell);
    }
  };

  auto rec_children = [&](auto&& self, int remaining) -> void {
    if (remaining == 0) {
      RTree shell{X[0], {}};
      for (const RTree& c : partial) shell.children.emplace_back(c, Omega[0]);
      attach(attach, 0, shell);
      return;
    }
    for (int part = 1; part <= remaining; ++part) {
      for (const RTree& sub : enum_all_trees_nodes(X, Omega, part, cap)) {
        partial.push_back(sub);
        self(self, remaining - part);
        partial.pop_back();
      }
    }
  };
  rec_children(rec_children, nodes - 1);
  return out;
}

inline std::vector<RTree> enum_all_trees(std::span<const Symbol> X,
                                         std::span<const Symbol> Omega, int k,
                                         size_t cap = 200000) {
  return enum_all_trees_nodes(X, Omega, k + 1, cap);
}

// Dimension of the degree-(k+1) slice of the quotient by the two-sided
// relation ideal, by exact elimination of all degree-matching relation
// instances (including grafted closures) against the full tree basis.
inline long long quotient_dim_bruteforce(std::span<const Symbol> X,
                                         std::span<const Symbol> Omega, int k,
                                         size_t cap = 200000) {
  if (k < 0) throw error("negative grade");
  const int deg = k + 1;
  std::vector<std::vector<RTree>> trees_by_nodes(deg + 1);
  for (int n = 1; n <= deg; ++n) trees_by_nodes[n] = enum_all_trees_nodes(X, Omega, n, cap);

  if (deg < 3) return static_cast<long long>(trees_by_nodes[deg].size());

  std::vector<std::vector<TreePoly>> elems(deg + 1);
  for (int d = 3; d <= deg; ++d) {
    // Fresh relation instances of total degree d.
    for (int dx = 1; dx <= d - 2; ++dx)
      for (int dy = 1; dy <= d - 1 - dx; ++dy) {
        int dz = d - dx - dy;
        for (const RTree& x : trees_by_nodes[dx])
          for (const RTree& y : trees_by_nodes[dy])
            for (const RTree& z : trees_by_nodes[dz])
              for (Symbol w : Omega)
                for (Symbol t : Omega) {
                  auto [r1, r2] = relation_elements(x, y, z, w, t);
                  if (!r1.is_zero()) elems[d].push_back(std::move(r1));
                  if (!r2.is_zero()) elems[d].push_back(std::move(r2));
                }
      }
    // Two-sided closure of lower-degree elements.
    for (int dp = 3; dp < d; ++dp)
      for (const TreePoly& e : elems[dp])
        for (const RTree& t : trees_by_nodes[d - dp])
          for (Symbol w : Omega) {
            TreePoly tm = TreePoly::monomial(t);
            TreePoly left = graft(tm, w, e);
            TreePoly right = graft(e, w, tm);
            if (!left.is_zero()) elems[d].push_back(std::move(left));
            if (!right.is_zero()) elems[d].push_back(std::move(right));
          }
  }

  int r = rank(elems[deg]);
  return static_cast<long long>(trees_by_nodes[deg].size()) - r;
}

struct GradeDims {
  int grade;
  long long nmne;
  long long populated;
  std::optional<long long> quotient;
};

// Per-grade counts along the two enumeration routes; the quotient oracle is
// attached for grades up to quotient_max (it grows quickly).
inline std::vector<GradeDims> graded_dims(std::span<const Symbol> X,
                                          std::span<const Symbol> Omega, int maxgrade,
                                          int quotient_max = -1) {
  std::vector<GradeDims> out;
  for (int k = 0; k <= maxgrade; ++k) {
    GradeDims row{k, static_cast<long long>(enum_nmne(X, Omega, k).size()),
                  static_cast<long long>(enum_populated(X, Omega, k).size()),
                  std::nullopt};
    if (k <= quotient_max) row.quotient = quotient_dim_bruteforce(X, Omega, k);
    out.push_back(row);
  }
  return out;
}

}  // namespace mnov
