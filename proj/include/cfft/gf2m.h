// Copyright 2026 The CFFT Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CFFT_GF2M_H_
#define CFFT_GF2M_H_

#include <cstdint>
#include <optional>
#include <vector>

namespace cfft {

// A field element of GF(2^m) in the polynomial basis, stored as an m-bit
// coefficient mask (bit i = coefficient of x^i).
using fe_t = std::uint32_t;

// GF(2^m) arithmetic with log/antilog tables, 2 <= m <= 10.  The designated
// primitive element alpha is the polynomial root x (bitmask 2).
class Field {
 public:
  // Uses the built-in primitive polynomial for m.  Throws std::invalid_argument
  // if m is out of range.
  explicit Field(int m);
  // Uses a caller-supplied polynomial (bitmask, degree m).  Throws
  // std::invalid_argument if the polynomial is not primitive.
  Field(int m, fe_t primitive_poly);

  int m() const { return m_; }
  fe_t primitive_poly() const { return poly_; }
  // Multiplicative group order n = 2^m - 1.
  int order() const { return n_; }
  fe_t alpha() const { return 2; }

  fe_t add(fe_t a, fe_t b) const { return a ^ b; }
  fe_t mul(fe_t a, fe_t b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }
  fe_t pow(fe_t a, long long e) const;
  // Throws std::invalid_argument on a == 0.
  fe_t inverse(fe_t a) const;
  // alpha^k for any integer k (reduced mod n).
  fe_t alpha_pow(long long k) const;
  // Discrete log base alpha; a must be nonzero.
  int log_alpha(fe_t a) const;
  // Frobenius fixed-field test: e lies in GF(2^d) iff e^(2^d) == e.
  bool in_subfield(fe_t e, int sub_degree) const;

  static fe_t default_primitive_poly(int m);

 private:
  void build_tables();

  int m_ = 0;
  fe_t poly_ = 0;
  int n_ = 0;
  std::vector<fe_t> exp_;  // exp_[k] = alpha^k, doubled for wrap-free mul
  std::vector<int> log_;   // log_[e] = k with alpha^k == e; log_[0] = -1
};

// A normal basis (g, g^2, g^4, ..., g^(2^(d-1))) of the subfield GF(2^d),
// embedded in the ambient field.
struct NormalBasis {
  int subfield_degree = 0;
  std::vector<fe_t> elements;

  fe_t generator() const { return elements.empty() ? 0 : elements[0]; }
};

// GF(2) rank of the span of the given elements (as coordinate vectors).
int gf2_rank(std::vector<fe_t> elements);

// Returns the normal basis of GF(2^sub_degree) within `field` whose generator
// is the smallest power of alpha.  sub_degree must divide field.m().
NormalBasis find_normal_basis(const Field& field, int sub_degree);

// All distinct normal bases of GF(2^sub_degree) within `field`, each
// represented with its smallest-power generator first, ordered by that power.
// (Conjugate generators produce the same basis set and are not repeated.)
std::vector<NormalBasis> all_normal_bases(const Field& field, int sub_degree);

// Trace of a GF(2^sub_degree) element down to GF(2): sum of e^(2^j).
int subfield_trace(const Field& field, fe_t e, int sub_degree);

// The trace-dual basis of a normal basis; also normal.  Throws
// std::runtime_error if the trace system is singular (impossible for a valid
// normal basis).
NormalBasis dual_basis(const Field& field, const NormalBasis& basis);

// Precomputed coordinate lookup for one basis: maps any element of the
// spanned subfield to its GF(2) coordinate mask (bit j = coefficient of
// basis.elements[j]).
class CoordinateMap {
 public:
  CoordinateMap(const Field& field, const NormalBasis& basis);

  // Coordinate mask of e, or nullopt if e is outside the span.
  std::optional<std::uint32_t> coords_mask(fe_t e) const;
  int degree() const { return degree_; }

 private:
  int degree_;
  std::vector<std::int32_t> table_;  // indexed by element value; -1 = outside
};

// Coordinate vector of e in the given basis (one 0/1 entry per basis element).
// Throws std::invalid_argument if e lies outside the subfield spanned.
std::vector<int> coordinates(const Field& field, fe_t e, const NormalBasis& basis);

}  // namespace cfft

#endif  // CFFT_GF2M_H_
