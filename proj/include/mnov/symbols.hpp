#pragma once

#include <cctype>
#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mnov/rat.hpp"

namespace mnov {

enum class Role : unsigned char { Var, Op };

// An interned variable or operation name. rank is the position in the
// declared order; all comparisons everywhere go through it.
struct Symbol {
  Role role;
  int rank;

  friend constexpr auto operator<=>(const Symbol&, const Symbol&) = default;
};

inline bool valid_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])))) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

// Variable and operation namespaces are disjoint; ranks follow declaration
// order. Built once, then read-only.
class SymbolTable {
 public:
  SymbolTable() = default;
  SymbolTable(std::vector<std::string> vars, std::vector<std::string> ops)
      : var_names_(std::move(vars)), op_names_(std::move(ops)) {
    for (int i = 0; i < static_cast<int>(var_names_.size()); ++i)
      intern(var_names_[i], Symbol{Role::Var, i});
    for (int i = 0; i < static_cast<int>(op_names_.size()); ++i)
      intern(op_names_[i], Symbol{Role::Op, i});
  }

  int var_count() const { return static_cast<int>(var_names_.size()); }
  int op_count() const { return static_cast<int>(op_names_.size()); }

  Symbol var(int rank) const {
    if (rank < 0 || rank >= var_count()) throw error("variable rank out of range");
    return Symbol{Role::Var, rank};
  }
  Symbol op(int rank) const {
    if (rank < 0 || rank >= op_count()) throw error("operation rank out of range");
    return Symbol{Role::Op, rank};
  }

  std::optional<Symbol> lookup(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& name(Symbol s) const {
    const auto& pool = s.role == Role::Var ? var_names_ : op_names_;
    if (s.rank < 0 || s.rank >= static_cast<int>(pool.size()))
      throw error("symbol rank out of range");
    return pool[s.rank];
  }

  std::vector<Symbol> vars() const {
    std::vector<Symbol> out;
    for (int i = 0; i < var_count(); ++i) out.push_back(var(i));
    return out;
  }
  std::vector<Symbol> ops() const {
    std::vector<Symbol> out;
    for (int i = 0; i < op_count(); ++i) out.push_back(op(i));
    return out;
  }

 private:
  void intern(const std::string& name, Symbol s) {
    if (!valid_identifier(name)) throw error("invalid identifier '" + name + "'");
    if (!by_name_.emplace(name, s).second)
      throw error("duplicate symbol name '" + name + "'");
  }

  std::vector<std::string> var_names_;
  std::vector<std::string> op_names_;
  std::map<std::string, Symbol> by_name_;
};

inline SymbolTable declare_symbols(const std::vector<std::string>& vars,
                                   const std::vector<std::string>& ops) {
  if (vars.empty()) throw error("empty variable list");
  if (ops.empty()) throw error("empty operation list");
  return SymbolTable(vars, ops);
}

// Lexicographic comparison of operation words by rank; a proper prefix
// compares Less.
inline std::strong_ordering lex_compare(std::span<const Symbol> u,
                                        std::span<const Symbol> v) {
  return std::lexicographical_compare_three_way(
      u.begin(), u.end(), v.begin(), v.end(),
      [](Symbol a, Symbol b) { return a.rank <=> b.rank; });
}

}  // namespace mnov
