#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace mnov {

// User-facing error (bad input, violated precondition).
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A broken internal invariant; the CLI maps this to exit code 2.
struct internal_error : std::logic_error {
  using std::logic_error::logic_error;
};

// Exact rational coefficients. mpq_class keeps values reduced with a
// positive denominator, which is exactly the canonical form we need.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
  if (den == 0) throw error("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline bool is_zero(const Rat& r) { return sgn(r) == 0; }

// Prints "p/q", or just "p" when q == 1.
inline std::string rat_to_string(const Rat& r) { return r.get_str(); }

inline Rat rat_from_string(const std::string& s) {
  Rat r;
  if (r.set_str(s, 10) != 0) throw error("malformed rational '" + s + "'");
  if (sgn(r.get_den()) == 0) throw error("rational with zero denominator '" + s + "'");
  r.canonicalize();
  return r;
}

}  // namespace mnov
