#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <vector>

#include "mnov/symbols.hpp"

namespace mnov {

enum class Mult : unsigned char { Commutative, Noncommutative };
enum class Derivs : unsigned char { Commuting, Noncommuting };

// One of the four algebra kinds: the multiplication may be commutative or
// not, and the derivation family may commute or not.
struct Flavor {
  Mult mult;
  Derivs derivs;

  friend constexpr bool operator==(const Flavor&, const Flavor&) = default;
};

inline constexpr Flavor CMDCA{Mult::Commutative, Derivs::Commuting};
inline constexpr Flavor NCMDCA{Mult::Commutative, Derivs::Noncommuting};
inline constexpr Flavor CMDNCA{Mult::Noncommutative, Derivs::Commuting};
inline constexpr Flavor NCMDNCA{Mult::Noncommutative, Derivs::Noncommuting};

// A word of derivation labels. Stored sorted when the derivations commute,
// as the canonical multiset representative; otherwise kept as a free word.
using DWord = std::vector<Symbol>;

// A differential variable: a derivation word applied to a variable.
struct DVar {
  DWord word;
  Symbol var;

  friend bool operator==(const DVar&, const DVar&) = default;
};

// Total order on differential variables: plain variables first, then by
// variable rank, then lexicographically on the word. Canonical commutative
// monomials are sorted ascending in this order.
inline std::strong_ordering dvar_compare(const DVar& a, const DVar& b) {
  if (auto c = a.word.size() <=> b.word.size(); c != 0) return c;
  if (auto c = a.var.rank <=> b.var.rank; c != 0) return c;
  return lex_compare(a.word, b.word);
}

inline bool dvar_less(const DVar& a, const DVar& b) {
  return dvar_compare(a, b) < 0;
}

// A product of differential variables; empty means the unit 1. Factors are
// kept sorted under a commutative flavor.
struct DMono {
  std::vector<DVar> factors;

  bool is_unit() const { return factors.empty(); }

  friend bool operator==(const DMono&, const DMono&) = default;
};

inline std::strong_ordering dmono_compare(const DMono& a, const DMono& b) {
  if (auto c = a.factors.size() <=> b.factors.size(); c != 0) return c;
  for (size_t i = 0; i < a.factors.size(); ++i)
    if (auto c = dvar_compare(a.factors[i], b.factors[i]); c != 0) return c;
  return std::strong_ordering::equal;
}

struct DMonoLess {
  bool operator()(const DMono& a, const DMono& b) const {
    return dmono_compare(a, b) < 0;
  }
};

inline DWord make_word(Flavor fl, DWord ops) {
  for (Symbol s : ops)
    if (s.role != Role::Op) throw error("derivation word contains a variable symbol");
  if (fl.derivs == Derivs::Commuting) std::sort(ops.begin(), ops.end());
  return ops;
}

inline DVar make_dvar(Flavor fl, DWord word, Symbol var) {
  if (var.role != Role::Var) throw error("differential variable needs a Var symbol");
  return DVar{make_word(fl, std::move(word)), var};
}

inline DMono make_mono(Flavor fl, std::vector<DVar> factors) {
  if (fl.mult == Mult::Commutative)
    std::sort(factors.begin(), factors.end(), dvar_less);
  return DMono{std::move(factors)};
}

// (number of derivation occurrences) - (number of factors).
inline int pdefect(const DMono& m) {
  if (m.is_unit()) throw error("pdefect of the unit monomial");
  int ops = 0;
  for (const DVar& f : m.factors) ops += static_cast<int>(f.word.size());
  return ops - static_cast<int>(m.factors.size());
}

inline bool is_populated(const DMono& m) {
  return !m.is_unit() && pdefect(m) == -1;
}

// Sparse polynomial over differential variables with exact rational
// coefficients. Monomials are canonical for the flavor; zero coefficients
// are never stored.
class DPoly {
 public:
  explicit DPoly(Flavor fl) : flavor_(fl) {}

  static DPoly zero(Flavor fl) { return DPoly(fl); }
  static DPoly one(Flavor fl) {
    DPoly p(fl);
    p.add_term(DMono{}, 1);
    return p;
  }
  static DPoly gen(Flavor fl, Symbol x) { return gen(fl, DWord{}, x); }
  static DPoly gen(Flavor fl, DWord word, Symbol x) {
    DPoly p(fl);
    p.add_term(DMono{{make_dvar(fl, std::move(word), x)}}, 1);
    return p;
  }

  Flavor flavor() const { return flavor_; }
  const std::map<DMono, Rat, DMonoLess>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  // mono must already be canonical for the flavor.
  void add_term(const DMono& mono, const Rat& coeff) {
    if (mnov::is_zero(coeff)) return;
    auto [it, inserted] = terms_.emplace(mono, coeff);
    if (!inserted) {
      it->second += coeff;
      if (mnov::is_zero(it->second)) terms_.erase(it);
    }
  }

  DPoly& operator+=(const DPoly& o) {
    check_flavor(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  DPoly& operator-=(const DPoly& o) {
    check_flavor(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  DPoly& operator*=(const Rat& r) {
    if (mnov::is_zero(r)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= r;
    return *this;
  }

  friend DPoly operator+(DPoly a, const DPoly& b) { return a += b; }
  friend DPoly operator-(DPoly a, const DPoly& b) { return a -= b; }
  friend DPoly operator*(DPoly a, const Rat& r) { return a *= r; }
  friend DPoly operator*(const Rat& r, DPoly a) { return a *= r; }
  friend DPoly operator-(DPoly a) { return a *= Rat(-1); }

  friend bool operator==(const DPoly& a, const DPoly& b) {
    return a.flavor_ == b.flavor_ && a.terms_ == b.terms_;
  }

  void check_flavor(const DPoly& o) const {
    if (!(flavor_ == o.flavor_)) throw error("flavor mismatch");
  }

 private:
  Flavor flavor_;
  std::map<DMono, Rat, DMonoLess> terms_;
};

// Bilinear extension of factor concatenation, re-canonicalized per flavor.
inline DPoly poly_mul(const DPoly& p, const DPoly& q) {
  p.check_flavor(q);
  DPoly out(p.flavor());
  for (const auto& [mp, cp] : p.terms())
    for (const auto& [mq, cq] : q.terms()) {
      std::vector<DVar> factors = mp.factors;
      factors.insert(factors.end(), mq.factors.begin(), mq.factors.end());
      out.add_term(make_mono(p.flavor(), std::move(factors)), cp * cq);
    }
  return out;
}

// The derivation labelled w, extended from generators by the Leibniz rule.
// On a differential variable the label is prepended to the word (then
// re-canonicalized when the derivations commute).
inline DPoly derive(const DPoly& p, Symbol w) {
  if (w.role != Role::Op) throw error("derive needs an Op symbol");
  DPoly out(p.flavor());
  for (const auto& [m, c] : p.terms()) {
    for (size_t k = 0; k < m.factors.size(); ++k) {
      std::vector<DVar> factors = m.factors;
      DWord word = factors[k].word;
      word.insert(word.begin(), w);
      factors[k] = make_dvar(p.flavor(), std::move(word), factors[k].var);
      out.add_term(make_mono(p.flavor(), std::move(factors)), c);
    }
  }
  return out;
}

// x |>_w y = x * d_w(y)
inline DPoly tri_right(const DPoly& p, Symbol w, const DPoly& q) {
  return poly_mul(p, derive(q, w));
}

// x <|_w y = d_w(x) * y
inline DPoly tri_left(const DPoly& p, Symbol w, const DPoly& q) {
  return poly_mul(derive(p, w), q);
}

// Substitution homomorphism: each variable goes to its image under f while
// derivation labels are renamed through dmap (identity when absent), with
// words replayed outermost-first.
inline DPoly apply_hom(const DPoly& p, const std::map<Symbol, DPoly>& f,
                       const std::map<Symbol, Symbol>& dmap = {}) {
  DPoly out(p.flavor());
  auto rename = [&](Symbol w) {
    auto it = dmap.find(w);
    return it == dmap.end() ? w : it->second;
  };
  for (const auto& [m, c] : p.terms()) {
    DPoly term = DPoly::one(p.flavor());
    for (const DVar& fac : m.factors) {
      auto img = f.find(fac.var);
      if (img == f.end()) throw error("apply_hom: no assignment for a variable");
      img->second.check_flavor(p);
      DPoly v = img->second;
      for (auto it = fac.word.rbegin(); it != fac.word.rend(); ++it)
        v = derive(v, rename(*it));
      term = poly_mul(term, v);
    }
    out += term * c;
  }
  return out;
}

// Residuals (left minus right side) of the defining identities of the
// product family induced on an algebra of the given flavor by
// x |>_w y = x d_w(y) and x <|_w y = d_w(x) y. All residuals vanish
// identically; callers assert exactly that.
inline std::vector<DPoly> check_identity_suite(Flavor fl, const DPoly& x,
                                               const DPoly& y, const DPoly& z,
                                               Symbol w, Symbol t) {
  if (!(x.flavor() == fl)) throw error("flavor mismatch");
  x.check_flavor(y);
  x.check_flavor(z);
  auto R = [&](const DPoly& a, Symbol o, const DPoly& b) { return tri_right(a, o, b); };
  auto L = [&](const DPoly& a, Symbol o, const DPoly& b) { return tri_left(a, o, b); };

  std::vector<DPoly> res;
  const bool comm_mult = fl.mult == Mult::Commutative;
  const bool comm_der = fl.derivs == Derivs::Commuting;

  // Left-symmetry across one label pair.
  DPoly lsym = R(R(x, w, y), t, z) - R(x, w, R(y, t, z)) -
               R(R(y, w, x), t, z) + R(y, w, R(x, t, z));
  // Right-commutativity.
  DPoly rcomm = R(R(x, w, y), t, z) - R(R(x, t, z), w, y);

  if (comm_mult && comm_der) {
    // Associator symmetry in the labels needs commuting derivations.
    DPoly labsym = R(R(x, w, y), t, z) - R(x, w, R(y, t, z)) -
                   R(R(x, t, y), w, z) + R(x, t, R(y, w, z));
    res = {lsym, labsym, rcomm};
  } else if (comm_mult && !comm_der) {
    res = {lsym, rcomm};
  } else {
    DPoly r1 = R(L(x, w, y), t, z) - L(x, w, R(y, t, z));
    DPoly r2 = R(R(x, w, y), t, z) - L(x, t, L(y, w, z)) -
               R(x, t, L(y, w, z)) + L(R(x, w, y), t, z);
    if (!comm_der) {
      res = {r1, r2};
    } else {
      DPoly r3 = R(x, w, R(y, t, z)) - R(x, t, R(y, w, z)) -
                 R(x, t, L(y, w, z)) + R(x, w, L(y, t, z));
      DPoly r4 = R(R(x, t, y), w, z) - L(x, t, L(y, w, z)) -
                 R(x, w, L(y, t, z)) + L(R(x, w, y), t, z);
      DPoly r5 = L(L(x, w, y), t, z) - L(L(x, t, y), w, z) -
                 L(R(x, t, y), w, z) + L(R(x, w, y), t, z);
      DPoly r6 = L(x, w, L(y, t, z)) - L(x, t, L(y, w, z)) -
                 L(R(x, t, y), w, z) + L(R(x, w, y), t, z);
      res = {r1, r2, r3, r4, r5, r6};
    }
  }
  return res;
}

}  // namespace mnov
