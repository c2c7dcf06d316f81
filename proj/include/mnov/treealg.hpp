#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mnov/symbols.hpp"

namespace mnov {

// A typed decorated rooted tree: the root carries a variable, each child
// hangs on an operation-labelled edge. Child order is significant until
// normalization. An empty child list is a bare variable.
struct RTree {
  Symbol root;
  std::vector<std::pair<RTree, Symbol>> children;  // (subtree, edge label)

  bool is_leaf() const { return children.empty(); }

  friend bool operator==(const RTree&, const RTree&) = default;
};

inline RTree leaf(Symbol x) {
  if (x.role != Role::Var) throw error("tree node needs a Var symbol");
  return RTree{x, {}};
}

inline std::strong_ordering rtree_compare(const RTree& a, const RTree& b) {
  if (auto c = a.root.rank <=> b.root.rank; c != 0) return c;
  if (auto c = a.children.size() <=> b.children.size(); c != 0) return c;
  for (size_t i = 0; i < a.children.size(); ++i) {
    if (auto c = a.children[i].second.rank <=> b.children[i].second.rank; c != 0) return c;
    if (auto c = rtree_compare(a.children[i].first, b.children[i].first); c != 0) return c;
  }
  return std::strong_ordering::equal;
}

struct RTreeLess {
  bool operator()(const RTree& a, const RTree& b) const {
    return rtree_compare(a, b) < 0;
  }
};

// Number of variable-decorated nodes.
inline int degree(const RTree& u) {
  int d = 1;
  for (const auto& [c, e] : u.children) d += degree(c);
  return d;
}

inline int length(const RTree& u) { return static_cast<int>(u.children.size()); }

// (degree, outer length, outer length + first-child length), ordered
// lexicographically. Drives the normalization induction.
struct Weight {
  int degree;
  int length;
  int nm;

  friend constexpr auto operator<=>(const Weight&, const Weight&) = default;
};

inline Weight weight(const RTree& u) {
  int n = length(u);
  int m = u.is_leaf() ? 0 : length(u.children.front().first);
  return Weight{degree(u), n, n + m};
}

// Rational linear combination of trees; no zero coefficients stored.
class TreePoly {
 public:
  TreePoly() = default;

  static TreePoly monomial(const RTree& t, const Rat& c = Rat(1)) {
    TreePoly p;
    p.add_term(t, c);
    return p;
  }

  const std::map<RTree, Rat, RTreeLess>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const RTree& t, const Rat& coeff) {
    if (mnov::is_zero(coeff)) return;
    auto [it, inserted] = terms_.emplace(t, coeff);
    if (!inserted) {
      it->second += coeff;
      if (mnov::is_zero(it->second)) terms_.erase(it);
    }
  }

  TreePoly& operator+=(const TreePoly& o) {
    for (const auto& [t, c] : o.terms_) add_term(t, c);
    return *this;
  }
  TreePoly& operator-=(const TreePoly& o) {
    for (const auto& [t, c] : o.terms_) add_term(t, -c);
    return *this;
  }
  TreePoly& operator*=(const Rat& r) {
    if (mnov::is_zero(r)) {
      terms_.clear();
      return *this;
    }
    for (auto& [t, c] : terms_) c *= r;
    return *this;
  }

  friend TreePoly operator+(TreePoly a, const TreePoly& b) { return a += b; }
  friend TreePoly operator-(TreePoly a, const TreePoly& b) { return a -= b; }
  friend TreePoly operator*(TreePoly a, const Rat& r) { return a *= r; }
  friend TreePoly operator*(const Rat& r, TreePoly a) { return a *= r; }
  friend TreePoly operator-(TreePoly a) { return a *= Rat(-1); }

  friend bool operator==(const TreePoly& a, const TreePoly& b) {
    return a.terms_ == b.terms_;
  }

 private:
  std::map<RTree, Rat, RTreeLess> terms_;
};

// u grafted on the root of v as the new leftmost child, edge labelled w.
inline RTree graft1(const RTree& u, Symbol w, const RTree& v) {
  if (w.role != Role::Op) throw error("graft edge needs an Op symbol");
  RTree out{v.root, {}};
  out.children.reserve(v.children.size() + 1);
  out.children.emplace_back(u, w);
  out.children.insert(out.children.end(), v.children.begin(), v.children.end());
  return out;
}

inline TreePoly graft(const TreePoly& u, Symbol w, const TreePoly& v) {
  TreePoly out;
  for (const auto& [tu, cu] : u.terms())
    for (const auto& [tv, cv] : v.terms()) out.add_term(graft1(tu, w, tv), cu * cv);
  return out;
}

// A nest: every child beyond the first is a bare variable, recursively
// along the leftmost spine.
inline bool is_nest(const RTree& u) {
  if (u.is_leaf()) return true;
  for (size_t i = 1; i < u.children.size(); ++i)
    if (!u.children[i].first.is_leaf()) return false;
  return is_nest(u.children.front().first);
}

// Leaf decorations of a nest, rightmost child first at every level, then
// down the spine. The normal-form condition asks this to be weakly
// increasing.
inline std::vector<Symbol> leafseq(const RTree& u) {
  if (!is_nest(u)) throw error("leafseq of a non-nest");
  std::vector<Symbol> out;
  const RTree* cur = &u;
  while (!cur->is_leaf()) {
    for (size_t i = cur->children.size(); i-- > 1;)
      out.push_back(cur->children[i].first.root);
    cur = &cur->children.front().first;
  }
  out.push_back(cur->root);
  return out;
}

namespace detail {

inline std::vector<Symbol> edge_word(const RTree& u) {
  std::vector<Symbol> w;
  w.reserve(u.children.size());
  for (const auto& [c, e] : u.children) w.push_back(e);
  return w;
}

// Top-level ordering condition between a node and its first child: the
// inner (length, root, edge word) must dominate the outer one. A leaf
// first child always passes.
inline bool ordered_at_top(const RTree& u) {
  const RTree& y1 = u.children.front().first;
  if (y1.is_leaf()) return true;
  int m = length(y1), n = length(u);
  if (m != n) return m > n;
  if (y1.root.rank != u.root.rank) return y1.root.rank > u.root.rank;
  return lex_compare(edge_word(y1), edge_word(u)) >= 0;
}

}  // namespace detail

inline bool is_ordered_nest(const RTree& u) {
  if (!is_nest(u)) return false;
  const RTree* cur = &u;
  while (!cur->is_leaf()) {
    if (!detail::ordered_at_top(*cur)) return false;
    cur = &cur->children.front().first;
  }
  return true;
}

inline bool is_nmne(const RTree& u) {
  if (!is_ordered_nest(u)) return false;
  auto seq = leafseq(u);
  for (size_t i = 0; i + 1 < seq.size(); ++i)
    if (seq[i].rank > seq[i + 1].rank) return false;
  return true;
}

// The two ideal generators instantiated at (x, y, z, w, t), expressed on
// trees through grafting.
inline std::pair<TreePoly, TreePoly> relation_elements(const RTree& x, const RTree& y,
                                                       const RTree& z, Symbol w,
                                                       Symbol t) {
  auto g = [](const RTree& a, Symbol o, const RTree& b) {
    return TreePoly::monomial(graft1(a, o, b));
  };
  TreePoly rel1 = g(graft1(x, w, y), t, z) - graft(TreePoly::monomial(x), w, g(y, t, z)) -
                  g(graft1(y, w, x), t, z) + graft(TreePoly::monomial(y), w, g(x, t, z));
  TreePoly rel2 = g(graft1(x, w, y), t, z) - g(graft1(x, t, z), w, y);
  return {rel1, rel2};
}

// Exchanges children i and i+1 (1-based) at the cost of two trees with one
// child fewer. The result is congruent to u modulo the relation ideal.
inline TreePoly rewrite_branch_swap(const RTree& u, int i) {
  int n = length(u);
  if (u.is_leaf() || i < 1 || i > n - 1) throw error("branch swap index out of range");
  const size_t a = static_cast<size_t>(i - 1), b = static_cast<size_t>(i);
  const auto& [ya, ea] = u.children[a];
  const auto& [yb, eb] = u.children[b];

  auto with_merged = [&](const RTree& merged) {
    RTree t{u.root, {}};
    t.children.reserve(u.children.size() - 1);
    t.children.insert(t.children.end(), u.children.begin(), u.children.begin() + a);
    t.children.emplace_back(merged, eb);
    t.children.insert(t.children.end(), u.children.begin() + b + 1, u.children.end());
    return t;
  };
  RTree transposed = u;
  transposed.children[a].first = yb;
  transposed.children[b].first = ya;

  TreePoly out;
  out.add_term(with_merged(graft1(ya, ea, yb)), 1);
  out.add_term(with_merged(graft1(yb, ea, ya)), -1);
  out.add_term(transposed, 1);
  return out;
}

// Exchanges the two leftmost spine segments: the roots swap levels while
// the deepest-left subtree stays put. Involutive, congruent modulo the
// relation ideal.
inline RTree rewrite_segment_swap(const RTree& u) {
  if (u.is_leaf() || u.children.front().first.is_leaf())
    throw error("segment swap needs a non-leaf first child");
  const RTree& y1 = u.children.front().first;
  Symbol omega1 = u.children.front().second;
  Symbol tau1 = y1.children.front().second;

  RTree inner{u.root, {}};
  inner.children.reserve(u.children.size());
  inner.children.emplace_back(y1.children.front().first, omega1);
  inner.children.insert(inner.children.end(), u.children.begin() + 1, u.children.end());

  RTree out{y1.root, {}};
  out.children.reserve(y1.children.size());
  out.children.emplace_back(std::move(inner), tau1);
  out.children.insert(out.children.end(), y1.children.begin() + 1, y1.children.end());
  return out;
}

namespace detail {

// Rewrites tree polynomials into the normal-form basis. Trees are interned
// into integer ids; each tree is resolved by the memoized transitive
// closure of a deterministic one-move step relation, with like terms
// collected at every merge. One instance per normalize() call.
class Normalizer {
 public:
  TreePoly run(const TreePoly& p) {
    std::map<int, Rat> active;
    std::map<int, Rat> settled;
    for (const auto& [t, c] : p.terms()) {
      int id = intern_rtree(t);
      (nodes_[id].nmne ? settled : active)[id] += c;
    }

    // Sweep the whole combination one move at a time so congruent terms
    // cancel before their correction cascades are expanded; small trees
    // are resolved outright through the memoized closure.
    long long sweeps = 0;
    while (!active.empty()) {
      if (++sweeps > kSweepCap)
        throw internal_error("normalize: sweep cap exceeded");
#ifdef MNOV_NF_STATS
      if (sweeps % 500 == 0)
        fprintf(stderr, "[sweep] %lld active=%zu settled=%zu cache=%zu nodes=%zu\n",
                sweeps, active.size(), settled.size(), nf_cache_.size(), nodes_.size());
#endif
      std::map<int, Rat> next;
      for (const auto& [id, c] : active) {
        if (is_zero(c)) continue;
        if (nodes_[id].degree <= kMemoDegree) {
          for (const auto& [s, cs] : nf(id))
            settled[s] += c * Rat(static_cast<long>(cs));
        } else {
          for (const auto& [s, cs] : step(id)) {
            Rat v = c * Rat(static_cast<long>(cs));
            (nodes_[s].nmne ? settled : next)[s] += v;
          }
        }
      }
      active = std::move(next);
    }

    TreePoly out;
    for (auto& [id, c] : settled)
      if (!is_zero(c)) out.add_term(to_rtree(id), c);
    return out;
  }

 private:
  static constexpr int kMemoDegree = 10;
  static constexpr long long kSweepCap = 1000000;
  struct Node {
    int root;                               // variable rank
    std::vector<std::pair<int, int>> kids;  // (child id, edge rank)
    int degree;
    bool nmne;
  };

  // Sorted (id, coeff) pairs, no zeros. Rewrite coefficients are integers.
  using Lin = std::vector<std::pair<int, long long>>;

  bool kids_nmne(int id) const {
    for (auto& [c, e] : nodes_[id].kids)
      if (!nodes_[c].nmne) return false;
    return true;
  }

  // The full normal form: the step relation iterated to a fixed point.
  // Trees with unresolved children fold over the normal forms of the head
  // child and the tail tree; trees with resolved children run their rewrite
  // chain inline so the chain intermediates never enter the cache.
  const Lin& nf(int id) {
    if (auto it = nf_cache_.find(id); it != nf_cache_.end()) return it->second;
    if (!active_.insert(id).second)
      throw internal_error("normalize: rewriting strategy cycled");

    Lin out;
    if (nodes_[id].nmne) {
      out = Lin{{id, 1}};
    } else if (!kids_nmne(id)) {
      const int root = nodes_[id].root;
      const std::vector<std::pair<int, int>> kids = nodes_[id].kids;
      const int edge = kids[0].second;
      int head = kids[0].first;
      int rest = intern(root, {kids.begin() + 1, kids.end()});
      std::unordered_map<int, long long> acc;
      // Cache values are node-stable, so the references survive inserts.
      const Lin& head_nf = nf(head);
      const Lin& rest_nf = nf(rest);
      for (const auto& [a, ca] : head_nf)
        for (const auto& [b, cb] : rest_nf) {
          long long c = mul_checked(ca, cb);
          for (const auto& [r, cr] : nf(graft_id(a, edge, b)))
            add_checked(acc[r], mul_checked(cr, c));
        }
      out = finalize_hash(std::move(acc));
    } else {
      std::unordered_map<int, long long> done;
      std::map<int, long long> work{{id, 1}};
      while (!work.empty()) {
        auto [u, c] = *work.begin();
        work.erase(work.begin());
        if (c == 0) continue;
        if (nodes_[u].nmne) {
          add_checked(done[u], c);
        } else if (kids_nmne(u)) {
          for (const auto& [s, cs] : step(u)) add_checked(work[s], mul_checked(c, cs));
        } else {
          for (const auto& [r, cr] : nf(u)) add_checked(work[r], mul_checked(c, cr));
        }
      }
      out = finalize_hash(std::move(done));
    }

    active_.erase(id);
#ifdef MNOV_NF_STATS
    lin_total_ += out.size();
    if (nf_cache_.size() % 100000 == 0)
      fprintf(stderr, "[nf] cache=%zu nodes=%zu lin_entries=%lld steps=%zu\n",
              nf_cache_.size(), nodes_.size(), lin_total_, step_cache_.size());
#endif
    return nf_cache_.emplace(id, std::move(out)).first->second;
  }

#ifdef MNOV_NF_STATS
  long long lin_total_ = 0;
#endif

  static void add_checked(long long& dst, long long v) {
    if (__builtin_add_overflow(dst, v, &dst))
      throw internal_error("normalize: coefficient overflow");
  }
  static long long mul_checked(long long a, long long b) {
    long long out;
    if (__builtin_mul_overflow(a, b, &out))
      throw internal_error("normalize: coefficient overflow");
    return out;
  }

  // --- interning -----------------------------------------------------------

  struct KeyHash {
    size_t operator()(const std::pair<int, std::vector<std::pair<int, int>>>& k) const {
      size_t h = std::hash<int>()(k.first);
      for (auto& [c, e] : k.second) {
        h = h * 1000003u + static_cast<size_t>(c) * 2 + 1;
        h = h * 1000003u + static_cast<size_t>(e) * 2;
      }
      return h;
    }
  };

  int intern(int root, std::vector<std::pair<int, int>> kids) {
    auto key = std::make_pair(root, std::move(kids));
    auto it = intern_.find(key);
    if (it != intern_.end()) return it->second;
    int deg = 1;
    for (auto& [c, e] : key.second) deg += nodes_[c].degree;
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{root, key.second, deg, false});
    nodes_.back().nmne = compute_nmne(id);
    intern_.emplace(std::move(key), id);
    return id;
  }

  int intern_rtree(const RTree& u) {
    std::vector<std::pair<int, int>> kids;
    kids.reserve(u.children.size());
    for (const auto& [c, e] : u.children) kids.emplace_back(intern_rtree(c), e.rank);
    return intern(u.root.rank, std::move(kids));
  }

  RTree to_rtree(int id) const {
    const Node& n = nodes_[id];
    RTree out{Symbol{Role::Var, n.root}, {}};
    out.children.reserve(n.kids.size());
    for (auto& [c, e] : n.kids)
      out.children.emplace_back(to_rtree(c), Symbol{Role::Op, e});
    return out;
  }

  bool leaf_id(int id) const { return nodes_[id].kids.empty(); }
  int len_id(int id) const { return static_cast<int>(nodes_[id].kids.size()); }
  int deg_id(int id) const { return nodes_[id].degree; }

  // Children are interned before parents, so child flags are available.
  bool compute_nmne(int id) const {
    const Node& n = nodes_[id];
    if (n.kids.empty()) return true;
    int first = n.kids[0].first;
    if (!nodes_[first].nmne) return false;
    for (size_t i = 1; i < n.kids.size(); ++i)
      if (!leaf_id(n.kids[i].first)) return false;
    if (!ordered_at_top_id(id)) return false;
    // Outer leaves weakly decreasing left to right.
    for (size_t i = 1; i + 1 < n.kids.size(); ++i)
      if (nodes_[n.kids[i].first].root < nodes_[n.kids[i + 1].first].root) return false;
    // Boundary with the first child's trailing leaf (or the leaf itself).
    if (n.kids.size() >= 2) {
      int l2 = nodes_[n.kids[1].first].root;
      const Node& f = nodes_[first];
      int front = f.kids.empty() ? f.root : nodes_[f.kids.back().first].root;
      if (l2 > front) return false;
    }
    return true;
  }

  bool ordered_at_top_id(int id) const {
    const Node& n = nodes_[id];
    const Node& y1 = nodes_[n.kids[0].first];
    if (y1.kids.empty()) return true;
    if (y1.kids.size() != n.kids.size()) return y1.kids.size() > n.kids.size();
    if (y1.root != n.root) return y1.root > n.root;
    for (size_t i = 0; i < n.kids.size(); ++i)
      if (y1.kids[i].second != n.kids[i].second)
        return y1.kids[i].second > n.kids[i].second;
    return true;
  }

  bool nest_id(int id) const {
    const Node* n = &nodes_[id];
    while (!n->kids.empty()) {
      for (size_t i = 1; i < n->kids.size(); ++i)
        if (!leaf_id(n->kids[i].first)) return false;
      n = &nodes_[n->kids[0].first];
    }
    return true;
  }

  int graft_id(int a, int edge, int b) {
    const Node& nb = nodes_[b];
    std::vector<std::pair<int, int>> kids;
    kids.reserve(nb.kids.size() + 1);
    kids.emplace_back(a, edge);
    kids.insert(kids.end(), nb.kids.begin(), nb.kids.end());
    return intern(nb.root, std::move(kids));
  }

  // --- linear combinations ---------------------------------------------------

  static Lin finalize(std::map<int, long long>&& acc) {
    Lin out;
    out.reserve(acc.size());
    for (auto& [id, c] : acc)
      if (c != 0) out.emplace_back(id, c);
    return out;
  }

  static Lin finalize_hash(std::unordered_map<int, long long>&& acc) {
    Lin out;
    out.reserve(acc.size());
    for (auto& [id, c] : acc)
      if (c != 0) out.emplace_back(id, c);
    std::sort(out.begin(), out.end());
    return out;
  }

  // --- the rewriting strategy ------------------------------------------------

  // One strategy move, outermost first: fix the top level while it has a
  // shape-level violation, descending into the first child only once the
  // top is locally clean. The input is congruent to the returned
  // combination modulo the relation ideal. Cached per tree.
  const Lin& step(int id) {
    auto it = step_cache_.find(id);
    if (it != step_cache_.end()) return it->second;

    std::vector<int> path;  // ancestors; descent is always into child 0
    int s = id;
    Lin local;
    for (;;) {
      // Small subtrees are resolved outright through the memoized closure,
      // so their normalization is shared across enclosing contexts.
      if (s != id && nodes_[s].degree <= kMemoDegree) {
        local = nf(s);
        break;
      }
      int move = classify(s);
      if (move >= 0) {
        path.push_back(s);
        s = nodes_[s].kids[0].first;
        continue;
      }
      local = local_move(s, move);
      break;
    }
    // Lift through the ancestor chain.
    for (auto pit = path.rbegin(); pit != path.rend(); ++pit) {
      int host = *pit;
      Lin lifted;
      lifted.reserve(local.size());
      for (auto& [sub, c] : local) {
        std::vector<std::pair<int, int>> kids = nodes_[host].kids;
        kids[0].first = sub;
        lifted.emplace_back(intern(nodes_[host].root, std::move(kids)), std::move(c));
      }
      std::sort(lifted.begin(), lifted.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      local = std::move(lifted);
    }
    return step_cache_.emplace(id, std::move(local)).first->second;
  }

  // Negative answers name the applicable top move; a non-negative answer
  // says the top is locally clean and the redex lies in the first child.
  enum Move {
    kFrontBring = -1,   // walk the leftmost non-leaf child toward the front
    kSegmentSwap = -2,  // exchange the two leftmost spine segments
    kLeafSwap = -3,     // transpose a disordered adjacent leaf pair
    kBoundary = -4,     // exchange across the first-child boundary
  };

  int classify(int id) const {
    const Node& n = nodes_[id];
    const int len = static_cast<int>(n.kids.size());
    bool shallow_nest = true;
    for (int i = 1; i < len; ++i)
      if (!leaf_id(n.kids[i].first)) {
        shallow_nest = false;
        break;
      }
    int first = n.kids[0].first;

    // Burying non-leaf side children happens outermost first; it is valid
    // for raw children and is where congruent combinations meet. The swap
    // fires only when the first child's own sides are leaves, so that the
    // result is shallow and the involution cannot bounce back.
    if (!shallow_nest) {
      if (leaf_id(first)) return kFrontBring;
      const Node& f = nodes_[first];
      for (size_t i = 1; i < f.kids.size(); ++i)
        if (!leaf_id(f.kids[i].first)) return first;
      return kSegmentSwap;
    }

    if (leaf_id(first)) {
      // All children are leaves; the only possible defect is their order.
      for (int i = 0; i + 1 < len; ++i)
        if (nodes_[n.kids[i].first].root < nodes_[n.kids[i + 1].first].root)
          return kLeafSwap;
      throw internal_error("normalize: no applicable move");
    }

    // The ordering and boundary rules compare against the first child, so
    // they wait until it is fully normal; a premature order swap would
    // undo itself.
    if (!nodes_[first].nmne) return first;

    if (!ordered_at_top_id(id)) return kSegmentSwap;

    for (int i = 1; i + 1 < len; ++i)
      if (nodes_[n.kids[i].first].root < nodes_[n.kids[i + 1].first].root)
        return kLeafSwap;

    if (len >= 2 &&
        nodes_[n.kids[1].first].root > nodes_[nodes_[first].kids.back().first].root)
      return kBoundary;
    throw internal_error("normalize: no applicable move");
  }

  Lin local_move(int id, int move) {
    const Node& n = nodes_[id];
    const int len = static_cast<int>(n.kids.size());
    switch (move) {
      case kFrontBring:
        for (int i = 1; i < len; ++i)
          if (!leaf_id(n.kids[i].first)) return swap_combo(id, i);
        throw internal_error("normalize: lost the non-leaf child");
      case kSegmentSwap:
        return Lin{{segment_swap_id(id), 1}};
      case kLeafSwap: {
        int start = leaf_id(n.kids[0].first) ? 0 : 1;
        for (int i = start; i + 1 < len; ++i)
          if (nodes_[n.kids[i].first].root < nodes_[n.kids[i + 1].first].root)
            return swap_combo(id, i + 1);
        throw internal_error("normalize: lost the leaf inversion");
      }
      case kBoundary:
        return boundary_exchange(id);
      default:
        throw internal_error("normalize: bad move");
    }
  }

  struct SwapParts {
    int merged_fwd;   // children i, i+1 fused forward, coefficient +1
    int merged_rev;   // fused reversed, coefficient -1
    int transposed;   // children exchanged, coefficient +1
  };

  // Children i and i+1 (1-based i) exchanged at the cost of two trees with
  // one child fewer; the sum of the three parts is congruent to the input.
  SwapParts branch_swap_id(int id, int i) {
    // Interning can grow nodes_, so copy what we need up front.
    const int root = nodes_[id].root;
    const std::vector<std::pair<int, int>> kids = nodes_[id].kids;
    const size_t a = static_cast<size_t>(i - 1), b = static_cast<size_t>(i);
    auto [ya, ea] = kids[a];
    auto [yb, eb] = kids[b];

    auto with_merged = [&](int merged) {
      std::vector<std::pair<int, int>> out;
      out.reserve(kids.size() - 1);
      out.insert(out.end(), kids.begin(), kids.begin() + a);
      out.emplace_back(merged, eb);
      out.insert(out.end(), kids.begin() + b + 1, kids.end());
      return intern(root, std::move(out));
    };
    std::vector<std::pair<int, int>> tr = kids;
    std::swap(tr[a].first, tr[b].first);

    SwapParts out;
    out.merged_fwd = with_merged(graft_id(ya, ea, yb));
    out.merged_rev = with_merged(graft_id(yb, ea, ya));
    out.transposed = intern(root, std::move(tr));
    return out;
  }

  Lin swap_combo(int id, int i) {
    SwapParts parts = branch_swap_id(id, i);
    std::map<int, long long> acc;
    if (parts.merged_fwd != parts.merged_rev) {
      acc[parts.merged_fwd] += 1;
      acc[parts.merged_rev] -= 1;
    }
    acc[parts.transposed] += 1;
    return finalize(std::move(acc));
  }

  int replace_first_child(int host, int child) {
    std::vector<std::pair<int, int>> kids = nodes_[host].kids;
    kids[0].first = child;
    return intern(nodes_[host].root, std::move(kids));
  }

  // Exchange the leftmost outer leaf with the first child's trailing leaf
  // via segment swaps and in-child transpositions. Emitted as one atomic
  // combination: the corrections plus the fully exchanged main line.
  Lin boundary_exchange(int id) {
    std::map<int, long long> acc;

    // Swap children j, j+1 inside `sub`, emitting the two corrections in
    // the first-child slot of `host`; returns the transposed main line.
    auto lifted_swap = [&](int host, int sub, int j) {
      SwapParts parts = branch_swap_id(sub, j);
      if (parts.merged_fwd != parts.merged_rev) {
        acc[replace_first_child(host, parts.merged_fwd)] += 1;
        acc[replace_first_child(host, parts.merged_rev)] -= 1;
      }
      return parts.transposed;
    };

    // Move the trailing leaf of the first child to its front.
    int y1 = nodes_[id].kids[0].first;
    const int m = len_id(y1);
    for (int j = m - 1; j >= 1; --j) y1 = lifted_swap(id, y1, j);

    // Exact segment exchange at the top.
    int stage = segment_swap_id(replace_first_child(id, y1));

    // Swap the two leading leaves of the new inner tree.
    stage = replace_first_child(stage, lifted_swap(stage, nodes_[stage].kids[0].first, 1));

    // Swap the segments back, then walk the imported leaf to the back of
    // the first child.
    stage = segment_swap_id(stage);
    int y1p = nodes_[stage].kids[0].first;
    for (int j = 1; j <= m - 1; ++j) y1p = lifted_swap(stage, y1p, j);
    stage = replace_first_child(stage, y1p);

    acc[stage] += 1;
    return finalize(std::move(acc));
  }

  int segment_swap_id(int id) {
    const Node& n = nodes_[id];
    const int y1_id = n.kids[0].first;
    const int y1_root = nodes_[y1_id].root;
    const std::vector<std::pair<int, int>> y1_kids = nodes_[y1_id].kids;

    std::vector<std::pair<int, int>> inner_kids;
    inner_kids.reserve(n.kids.size());
    inner_kids.emplace_back(y1_kids[0].first, n.kids[0].second);
    inner_kids.insert(inner_kids.end(), n.kids.begin() + 1, n.kids.end());
    int inner = intern(n.root, std::move(inner_kids));

    std::vector<std::pair<int, int>> kids;
    kids.reserve(y1_kids.size());
    kids.emplace_back(inner, y1_kids[0].second);
    kids.insert(kids.end(), y1_kids.begin() + 1, y1_kids.end());
    return intern(y1_root, std::move(kids));
  }

  std::vector<Node> nodes_;
  std::unordered_map<std::pair<int, std::vector<std::pair<int, int>>>, int, KeyHash> intern_;
  std::unordered_map<int, Lin> step_cache_;
  std::unordered_map<int, Lin> nf_cache_;
  std::unordered_set<int> active_;
};

}  // namespace detail

// Rewrites p into the normal-form basis: the support of the result is
// normal, the class modulo the relation ideal is unchanged, and repeated
// application is the identity.
inline TreePoly normalize(const TreePoly& p) {
  detail::Normalizer nz;
  return nz.run(p);
}

}  // namespace mnov
