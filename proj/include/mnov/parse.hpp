#pragma once

#include <cctype>
#include <string>

#include "mnov/diffalg.hpp"
#include "mnov/symbols.hpp"
#include "mnov/treealg.hpp"

namespace mnov {

// Carries the 1-based column where parsing failed.
struct parse_error : error {
  parse_error(const std::string& msg, size_t column)
      : error(msg + " at column " + std::to_string(column)), column(column) {}
  size_t column;
};

namespace detail {

class Scanner {
 public:
  explicit Scanner(const std::string& src) : src_(src) {}

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= src_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }
  bool try_eat(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  void expect(char c, const char* what) {
    if (!try_eat(c)) fail(std::string("expected '") + c + "' " + what);
  }
  [[noreturn]] void fail(const std::string& msg) const { throw parse_error(msg, pos_ + 1); }

  std::string ident() {
    skip_ws();
    size_t start = pos_;
    if (pos_ >= src_.size() || !std::isalpha(static_cast<unsigned char>(src_[pos_])))
      fail("expected an identifier");
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    return src_.substr(start, pos_ - start);
  }

  std::string digits() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected a number");
    return src_.substr(start, pos_ - start);
  }

  bool peek_digit() {
    skip_ws();
    return pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]));
  }

  size_t column() const { return pos_ + 1; }

 private:
  const std::string& src_;
  size_t pos_ = 0;
};

inline Symbol resolve(Scanner& sc, const SymbolTable& table, const std::string& name,
                      Role want) {
  auto s = table.lookup(name);
  if (!s) sc.fail("undeclared symbol '" + name + "'");
  if (s->role != want)
    sc.fail(std::string("'") + name + "' is " +
            (s->role == Role::Var ? "a variable" : "an operation") + ", but " +
            (want == Role::Var ? "a variable" : "an operation") + " is needed");
  return *s;
}

inline RTree parse_tree_node(Scanner& sc, const SymbolTable& table) {
  std::string head = sc.ident();
  if (head == "r" && sc.peek() == '(') {
    sc.expect('(', "to open the tree");
    RTree out{Symbol{}, {}};
    while (true) {
      RTree child = parse_tree_node(sc, table);
      sc.expect(',', "between child and edge");
      Symbol edge = resolve(sc, table, sc.ident(), Role::Op);
      out.children.emplace_back(std::move(child), edge);
      if (sc.try_eat(',')) continue;
      sc.expect(';', "before the root");
      break;
    }
    out.root = resolve(sc, table, sc.ident(), Role::Var);
    sc.expect(')', "to close the tree");
    return out;
  }
  return leaf(resolve(sc, table, head, Role::Var));
}

inline DVar parse_dvar(Scanner& sc, const SymbolTable& table, Flavor fl) {
  std::string head = sc.ident();
  if (head == "D" && sc.peek() == '[') {
    sc.expect('[', "to open the derivation word");
    DWord word;
    if (sc.peek() == ']') sc.fail("empty derivation word; write the bare variable");
    word.push_back(resolve(sc, table, sc.ident(), Role::Op));
    while (sc.try_eat(',')) word.push_back(resolve(sc, table, sc.ident(), Role::Op));
    sc.expect(']', "to close the derivation word");
    sc.expect('(', "before the derived variable");
    Symbol var = resolve(sc, table, sc.ident(), Role::Var);
    sc.expect(')', "after the derived variable");
    return make_dvar(fl, std::move(word), var);
  }
  return DVar{{}, resolve(sc, table, head, Role::Var)};
}

inline DMono parse_mono_body(Scanner& sc, const SymbolTable& table, Flavor fl) {
  std::vector<DVar> factors{parse_dvar(sc, table, fl)};
  while (sc.try_eat('*')) factors.push_back(parse_dvar(sc, table, fl));
  return make_mono(fl, std::move(factors));
}

inline Rat parse_rat_body(Scanner& sc) {
  std::string num = sc.digits();
  if (sc.try_eat('/')) {
    std::string den = sc.digits();
    if (Rat(rat_from_string(den)) == 0) sc.fail("zero denominator");
    return rat_from_string(num + "/" + den);
  }
  return rat_from_string(num);
}

// poly := term (("+"|"-") term)*, term := [rat "*"] atom, with an optional
// leading sign and bare rationals allowed as unit-monomial terms.
template <class Atom, class AddTerm>
void parse_sum(Scanner& sc, Atom&& atom, AddTerm&& add) {
  bool first = true;
  while (true) {
    int sign = 1;
    if (sc.try_eat('-'))
      sign = -1;
    else if (sc.try_eat('+')) {
      if (first) sc.fail("unexpected leading '+'");
    } else if (!first) {
      break;
    }
    Rat coeff(sign);
    bool have_atom = true;
    if (sc.peek_digit()) {
      coeff *= parse_rat_body(sc);
      have_atom = sc.try_eat('*');
    }
    add(coeff, have_atom ? std::optional<decltype(atom())>(atom()) : std::nullopt);
    first = false;
    char c = sc.peek();
    if (c != '+' && c != '-') break;
  }
}

}  // namespace detail

inline RTree parse_tree(const std::string& text, const SymbolTable& table) {
  detail::Scanner sc(text);
  RTree out = detail::parse_tree_node(sc, table);
  if (!sc.at_end()) sc.fail("trailing input");
  return out;
}

inline DMono parse_mono(const std::string& text, const SymbolTable& table,
                        Flavor fl = NCMDCA) {
  detail::Scanner sc(text);
  DMono out = detail::parse_mono_body(sc, table, fl);
  if (!sc.at_end()) sc.fail("trailing input");
  return out;
}

inline DPoly parse_poly(const std::string& text, Flavor fl, const SymbolTable& table) {
  detail::Scanner sc(text);
  DPoly out(fl);
  detail::parse_sum(
      sc, [&] { return detail::parse_mono_body(sc, table, fl); },
      [&](const Rat& coeff, std::optional<DMono> mono) {
        out.add_term(mono ? *mono : DMono{}, coeff);
      });
  if (!sc.at_end()) sc.fail("trailing input");
  return out;
}

inline TreePoly parse_treepoly(const std::string& text, const SymbolTable& table) {
  detail::Scanner sc(text);
  TreePoly out;
  detail::parse_sum(
      sc, [&] { return detail::parse_tree_node(sc, table); },
      [&](const Rat& coeff, std::optional<RTree> tree) {
        if (!tree) {
          if (!is_zero(coeff)) sc.fail("a tree polynomial has no unit term");
          return;
        }
        out.add_term(*tree, coeff);
      });
  if (!sc.at_end()) sc.fail("trailing input");
  return out;
}

// ---------------------------------------------------------------------------
// Pretty printing, mirroring the input grammar.

inline std::string format_word(const DWord& w, const SymbolTable& table) {
  std::string out = "D[";
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) out += ",";
    out += table.name(w[i]);
  }
  return out + "]";
}

inline std::string format_dvar(const DVar& v, const SymbolTable& table) {
  if (v.word.empty()) return table.name(v.var);
  return format_word(v.word, table) + "(" + table.name(v.var) + ")";
}

inline std::string format_mono(const DMono& m, const SymbolTable& table) {
  if (m.is_unit()) return "1";
  std::string out;
  for (size_t i = 0; i < m.factors.size(); ++i) {
    if (i) out += "*";
    out += format_dvar(m.factors[i], table);
  }
  return out;
}

inline std::string format_tree(const RTree& t, const SymbolTable& table) {
  if (t.is_leaf()) return table.name(t.root);
  std::string out = "r(";
  for (const auto& [c, e] : t.children)
    out += format_tree(c, table) + "," + table.name(e) + ",";
  out.back() = ';';
  return out + table.name(t.root) + ")";
}

namespace detail {

template <class Terms, class FormatKey>
std::string format_combination(const Terms& terms, FormatKey&& fk) {
  if (terms.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [key, coeff] : terms) {
    Rat a = abs(coeff);
    if (first) {
      if (sgn(coeff) < 0) out += "-";
      first = false;
    } else {
      out += sgn(coeff) < 0 ? " - " : " + ";
    }
    std::string body = fk(key);
    if (a != 1 || body == "1")
      out += rat_to_string(a) + (body == "1" ? "" : "*" + body);
    else
      out += body;
  }
  return out;
}

}  // namespace detail

inline std::string format_poly(const DPoly& p, const SymbolTable& table) {
  return detail::format_combination(p.terms(),
                                    [&](const DMono& m) { return format_mono(m, table); });
}

inline std::string format_treepoly(const TreePoly& p, const SymbolTable& table) {
  return detail::format_combination(p.terms(),
                                    [&](const RTree& t) { return format_tree(t, table); });
}

}  // namespace mnov
