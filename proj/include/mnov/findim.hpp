#pragma once

#include <array>
#include <optional>
#include <vector>

#include "mnov/diffalg.hpp"

namespace mnov {

// Dense square matrix of exact rationals, acting on coordinate columns.
class LinMap {
 public:
  LinMap() = default;
  explicit LinMap(int dim) : dim_(dim), a_(static_cast<size_t>(dim) * dim) {}

  int dim() const { return dim_; }
  Rat& at(int i, int j) { return a_[static_cast<size_t>(i) * dim_ + j]; }
  const Rat& at(int i, int j) const { return a_[static_cast<size_t>(i) * dim_ + j]; }

  std::vector<Rat> apply(const std::vector<Rat>& v) const {
    std::vector<Rat> out(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) out[i] += at(i, j) * v[j];
    return out;
  }

  friend LinMap operator*(const LinMap& a, const LinMap& b) {
    LinMap out(a.dim_);
    for (int i = 0; i < a.dim_; ++i)
      for (int k = 0; k < a.dim_; ++k)
        if (!is_zero(a.at(i, k)))
          for (int j = 0; j < a.dim_; ++j) out.at(i, j) += a.at(i, k) * b.at(k, j);
    return out;
  }
  friend LinMap operator-(const LinMap& a, const LinMap& b) {
    LinMap out(a.dim_);
    for (int i = 0; i < a.dim_; ++i)
      for (int j = 0; j < a.dim_; ++j) out.at(i, j) = a.at(i, j) - b.at(i, j);
    return out;
  }
  friend bool operator==(const LinMap&, const LinMap&) = default;

  bool is_zero_map() const {
    for (const Rat& v : a_)
      if (!is_zero(v)) return false;
    return true;
  }

 private:
  int dim_ = 0;
  std::vector<Rat> a_;
};

// Structure-constant tensor: e_i * e_j = sum_k c[i][j][k] e_k.
class StructTensor {
 public:
  StructTensor() = default;
  explicit StructTensor(int dim)
      : dim_(dim), c_(static_cast<size_t>(dim) * dim * dim) {}

  int dim() const { return dim_; }
  Rat& at(int i, int j, int k) {
    return c_[(static_cast<size_t>(i) * dim_ + j) * dim_ + k];
  }
  const Rat& at(int i, int j, int k) const {
    return c_[(static_cast<size_t>(i) * dim_ + j) * dim_ + k];
  }

  std::vector<Rat> apply(const std::vector<Rat>& x, const std::vector<Rat>& y) const {
    std::vector<Rat> out(dim_);
    for (int i = 0; i < dim_; ++i) {
      if (is_zero(x[i])) continue;
      for (int j = 0; j < dim_; ++j) {
        if (is_zero(y[j])) continue;
        for (int k = 0; k < dim_; ++k) out[k] += x[i] * y[j] * at(i, j, k);
      }
    }
    return out;
  }

  bool symmetric() const {
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < i; ++j)
        for (int k = 0; k < dim_; ++k)
          if (at(i, j, k) != at(j, i, k)) return false;
    return true;
  }
  bool antisymmetric() const {
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j <= i; ++j)
        for (int k = 0; k < dim_; ++k)
          if (at(i, j, k) != -at(j, i, k)) return false;
    return true;
  }

 private:
  int dim_ = 0;
  std::vector<Rat> c_;
};

// A finite-dimensional algebra by structure constants, optionally carrying
// a bracket as a second tensor.
struct FinDimAlgebra {
  int dim = 0;
  StructTensor mult;
  std::optional<StructTensor> bracket;

  explicit FinDimAlgebra(int d) : dim(d), mult(d) {}

  std::vector<Rat> basis_vec(int i) const {
    std::vector<Rat> v(dim);
    v[i] = 1;
    return v;
  }
  std::vector<Rat> mul(const std::vector<Rat>& x, const std::vector<Rat>& y) const {
    return mult.apply(x, y);
  }
  std::vector<Rat> br(const std::vector<Rat>& x, const std::vector<Rat>& y) const {
    if (!bracket) throw error("algebra has no bracket");
    return bracket->apply(x, y);
  }
};

inline bool vec_zero(const std::vector<Rat>& v) {
  for (const Rat& x : v)
    if (!is_zero(x)) return false;
  return true;
}

inline std::vector<Rat> vec_sub(std::vector<Rat> a, const std::vector<Rat>& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

inline std::vector<Rat> vec_add(std::vector<Rat> a, const std::vector<Rat>& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

// Leibniz rule on all basis pairs; bilinearity does the rest.
inline bool is_derivation(const FinDimAlgebra& A, const LinMap& d) {
  if (d.dim() != A.dim) throw error("derivation matrix shape mismatch");
  for (int i = 0; i < A.dim; ++i)
    for (int j = 0; j < A.dim; ++j) {
      auto ei = A.basis_vec(i), ej = A.basis_vec(j);
      auto lhs = d.apply(A.mul(ei, ej));
      auto rhs = vec_add(A.mul(d.apply(ei), ej), A.mul(ei, d.apply(ej)));
      if (!vec_zero(vec_sub(lhs, rhs))) return false;
    }
  return true;
}

inline bool commutes(const LinMap& d1, const LinMap& d2) {
  if (d1.dim() != d2.dim()) throw error("matrix shape mismatch");
  return (d1 * d2 - d2 * d1).is_zero_map();
}

// Matrix of y -> [v, y].
inline LinMap ad(const FinDimAlgebra& A, const std::vector<Rat>& v) {
  if (!A.bracket) throw error("ad needs a bracket");
  LinMap out(A.dim);
  for (int j = 0; j < A.dim; ++j) {
    auto col = A.br(v, A.basis_vec(j));
    for (int i = 0; i < A.dim; ++i) out.at(i, j) = col[i];
  }
  return out;
}

inline bool jacobi_holds(const FinDimAlgebra& A) {
  if (!A.bracket) throw error("jacobi needs a bracket");
  for (int i = 0; i < A.dim; ++i)
    for (int j = 0; j < A.dim; ++j)
      for (int k = 0; k < A.dim; ++k) {
        auto ei = A.basis_vec(i), ej = A.basis_vec(j), ek = A.basis_vec(k);
        auto s = vec_add(vec_add(A.br(ei, A.br(ej, ek)), A.br(ej, A.br(ek, ei))),
                         A.br(ek, A.br(ei, ej)));
        if (!vec_zero(s)) return false;
      }
  return true;
}

// First (i, j, k) where ad(e_i) breaks the Leibniz rule on e_j * e_k, if any.
inline std::optional<std::array<int, 3>> poisson_leibniz_witness(const FinDimAlgebra& A) {
  if (!A.bracket) throw error("poisson check needs a bracket");
  for (int i = 0; i < A.dim; ++i) {
    LinMap adi = ad(A, A.basis_vec(i));
    for (int j = 0; j < A.dim; ++j)
      for (int k = 0; k < A.dim; ++k) {
        auto ej = A.basis_vec(j), ek = A.basis_vec(k);
        auto lhs = adi.apply(A.mul(ej, ek));
        auto rhs = vec_add(A.mul(adi.apply(ej), ek), A.mul(ej, adi.apply(ek)));
        if (!vec_zero(vec_sub(lhs, rhs))) return std::array<int, 3>{i, j, k};
      }
  }
  return std::nullopt;
}

// The bracket makes a commutative algebra Poisson exactly when every
// adjoint map is a derivation of the multiplication.
inline bool check_poisson(const FinDimAlgebra& A) {
  if (!A.mult.symmetric()) throw error("multiplication is not commutative");
  if (!A.bracket) throw error("poisson check needs a bracket");
  if (!A.bracket->antisymmetric()) throw error("bracket is not antisymmetric");
  if (!jacobi_holds(A)) throw error("bracket fails the Jacobi identity");
  return !poisson_leibniz_witness(A);
}

// Structure constants of x |> y = x * d(y) for a verified derivation.
inline StructTensor induced_product_table(const FinDimAlgebra& A, const LinMap& d) {
  if (!is_derivation(A, d)) throw error("induced product needs a derivation");
  StructTensor out(A.dim);
  for (int i = 0; i < A.dim; ++i)
    for (int j = 0; j < A.dim; ++j) {
      auto v = A.mul(A.basis_vec(i), d.apply(A.basis_vec(j)));
      for (int k = 0; k < A.dim; ++k) out.at(i, j, k) = v[k];
    }
  return out;
}

// Residuals of the induced identity system for the flavor matching the
// algebra's multiplication and the (non)commutation of d1, d2, evaluated on
// every basis triple and every ordered label pair. Empty result means the
// system holds.
inline std::vector<std::vector<Rat>> induced_identity_residuals(const FinDimAlgebra& A,
                                                                const LinMap& d1,
                                                                const LinMap& d2,
                                                                Flavor fl) {
  if (!is_derivation(A, d1) || !is_derivation(A, d2))
    throw error("induced identities need derivations");
  if (fl.derivs == Derivs::Commuting && !commutes(d1, d2))
    throw error("derivations do not commute");
  if (fl.mult == Mult::Commutative && !A.mult.symmetric())
    throw error("multiplication is not commutative");

  using Vec = std::vector<Rat>;
  auto R = [&](const Vec& x, const LinMap& d, const Vec& y) { return A.mul(x, d.apply(y)); };
  auto L = [&](const Vec& x, const LinMap& d, const Vec& y) { return A.mul(d.apply(x), y); };

  std::vector<Vec> bad;
  const std::array<const LinMap*, 2> ds{&d1, &d2};
  for (const LinMap* wp : ds)
    for (const LinMap* tp : ds) {
      const LinMap &w = *wp, &t = *tp;
      for (int i = 0; i < A.dim; ++i)
        for (int j = 0; j < A.dim; ++j)
          for (int k = 0; k < A.dim; ++k) {
            Vec x = A.basis_vec(i), y = A.basis_vec(j), z = A.basis_vec(k);
            std::vector<Vec> res;
            Vec lsym = vec_sub(vec_sub(R(R(x, w, y), t, z), R(x, w, R(y, t, z))),
                               vec_sub(R(R(y, w, x), t, z), R(y, w, R(x, t, z))));
            Vec rcomm = vec_sub(R(R(x, w, y), t, z), R(R(x, t, z), w, y));
            if (fl.mult == Mult::Commutative) {
              res.push_back(lsym);
              res.push_back(rcomm);
              if (fl.derivs == Derivs::Commuting)
                res.push_back(vec_sub(vec_sub(R(R(x, w, y), t, z), R(x, w, R(y, t, z))),
                                      vec_sub(R(R(x, t, y), w, z), R(x, t, R(y, w, z)))));
            } else {
              res.push_back(vec_sub(R(L(x, w, y), t, z), L(x, w, R(y, t, z))));
              res.push_back(vec_sub(vec_sub(R(R(x, w, y), t, z), L(x, t, L(y, w, z))),
                                    vec_sub(R(x, t, L(y, w, z)), L(R(x, w, y), t, z))));
              if (fl.derivs == Derivs::Commuting) {
                res.push_back(vec_sub(vec_sub(R(x, w, R(y, t, z)), R(x, t, R(y, w, z))),
                                      vec_sub(R(x, t, L(y, w, z)), R(x, w, L(y, t, z)))));
                res.push_back(vec_sub(vec_sub(R(R(x, t, y), w, z), L(x, t, L(y, w, z))),
                                      vec_sub(R(x, w, L(y, t, z)), L(R(x, w, y), t, z))));
                res.push_back(vec_sub(vec_sub(L(L(x, w, y), t, z), L(L(x, t, y), w, z)),
                                      vec_sub(L(R(x, t, y), w, z), L(R(x, w, y), t, z))));
                res.push_back(vec_sub(vec_sub(L(x, w, L(y, t, z)), L(x, t, L(y, w, z))),
                                      vec_sub(L(R(x, t, y), w, z), L(R(x, w, y), t, z))));
              }
            }
            for (auto& r : res)
              if (!vec_zero(r)) bad.push_back(std::move(r));
          }
    }
  return bad;
}

}  // namespace mnov
