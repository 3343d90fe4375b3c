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

#include "cfft/gf2m.h"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cfft {

namespace {

constexpr int kMinDegree = 2;
constexpr int kMaxDegree = 10;

// Default primitive polynomials, degree 2 through 10.
constexpr fe_t kDefaultPoly[kMaxDegree + 1] = {
    0,     0,     0x7,   0xB,   0x13,  0x25,
    0x43,  0x89,  0x11D, 0x211, 0x409,
};

}  // namespace

fe_t Field::default_primitive_poly(int m) {
  if (m < kMinDegree || m > kMaxDegree) {
    throw std::invalid_argument("field degree must be in [2, 10], got " +
                                std::to_string(m));
  }
  return kDefaultPoly[m];
}

Field::Field(int m) : Field(m, default_primitive_poly(m)) {}

Field::Field(int m, fe_t primitive_poly) : m_(m), poly_(primitive_poly) {
  if (m < kMinDegree || m > kMaxDegree) {
    throw std::invalid_argument("field degree must be in [2, 10], got " +
                                std::to_string(m));
  }
  if (poly_ >> m != 1u) {
    throw std::invalid_argument("polynomial 0x" + std::to_string(poly_) +
                                " does not have degree " + std::to_string(m));
  }
  n_ = (1 << m_) - 1;
  build_tables();
}

void Field::build_tables() {
  exp_.assign(2 * n_, 0);
  log_.assign(1 << m_, -1);
  fe_t x = 1;
  for (int i = 0; i < n_; ++i) {
    if (log_[x] != -1) {
      // alpha's order is a proper divisor of 2^m - 1.
      throw std::invalid_argument("polynomial is not primitive for degree " +
                                  std::to_string(m_));
    }
    exp_[i] = x;
    exp_[i + n_] = x;
    log_[x] = i;
    x <<= 1;
    if (x >> m_) x ^= poly_;
  }
  if (x != 1) {
    throw std::invalid_argument("polynomial is not primitive for degree " +
                                std::to_string(m_));
  }
}

fe_t Field::pow(fe_t a, long long e) const {
  if (a == 0) {
    if (e <= 0) throw std::invalid_argument("0 cannot be raised to e <= 0");
    return 0;
  }
  long long k = (static_cast<long long>(log_[a]) * (e % n_)) % n_;
  if (k < 0) k += n_;
  return exp_[k];
}

fe_t Field::inverse(fe_t a) const {
  if (a == 0) throw std::invalid_argument("zero has no inverse");
  return exp_[(n_ - log_[a]) % n_];
}

fe_t Field::alpha_pow(long long k) const {
  long long r = k % n_;
  if (r < 0) r += n_;
  return exp_[r];
}

int Field::log_alpha(fe_t a) const {
  if (a == 0) throw std::invalid_argument("zero has no discrete log");
  return log_[a];
}

bool Field::in_subfield(fe_t e, int sub_degree) const {
  fe_t p = e;
  for (int i = 0; i < sub_degree; ++i) p = mul(p, p);
  return p == e;
}

int gf2_rank(std::vector<fe_t> elements) {
  std::vector<fe_t> basis;
  for (fe_t v : elements) {
    for (fe_t b : basis) v = std::min(v, v ^ b);
    if (v != 0) {
      basis.push_back(v);
      std::sort(basis.rbegin(), basis.rend());
    }
  }
  return static_cast<int>(basis.size());
}

namespace {

// Conjugate orbit (e, e^2, e^4, ...) of length d, or empty if the orbit is
// shorter than d (e lies in a proper subfield of GF(2^d)).
std::vector<fe_t> conjugates(const Field& field, fe_t e, int d) {
  std::vector<fe_t> out;
  fe_t c = e;
  for (int j = 0; j < d; ++j) {
    out.push_back(c);
    c = field.mul(c, c);
  }
  if (c != e) return {};
  for (int j = 1; j < d; ++j) {
    if (out[j] == out[0]) return {};
  }
  return out;
}

bool is_normal(const std::vector<fe_t>& conj, int d) {
  return !conj.empty() && gf2_rank(conj) == d;
}

}  // namespace

NormalBasis find_normal_basis(const Field& field, int sub_degree) {
  if (sub_degree < 1 || field.m() % sub_degree != 0) {
    throw std::invalid_argument("subfield degree must divide field degree");
  }
  if (sub_degree == 1) return NormalBasis{1, {1}};
  for (int k = 1; k < field.order(); ++k) {
    fe_t e = field.alpha_pow(k);
    if (!field.in_subfield(e, sub_degree)) continue;
    std::vector<fe_t> conj = conjugates(field, e, sub_degree);
    if (is_normal(conj, sub_degree)) {
      return NormalBasis{sub_degree, std::move(conj)};
    }
  }
  throw std::runtime_error("no normal basis found; field tables corrupt");
}

std::vector<NormalBasis> all_normal_bases(const Field& field, int sub_degree) {
  std::vector<NormalBasis> out;
  if (sub_degree == 1) {
    out.push_back(NormalBasis{1, {1}});
    return out;
  }
  std::vector<bool> seen(1 << field.m(), false);
  for (int k = 1; k < field.order(); ++k) {
    fe_t e = field.alpha_pow(k);
    if (seen[e] || !field.in_subfield(e, sub_degree)) continue;
    std::vector<fe_t> conj = conjugates(field, e, sub_degree);
    if (conj.empty()) continue;
    for (fe_t c : conj) seen[c] = true;
    if (gf2_rank(conj) == sub_degree) {
      out.push_back(NormalBasis{sub_degree, std::move(conj)});
    }
  }
  return out;
}

int subfield_trace(const Field& field, fe_t e, int sub_degree) {
  fe_t t = 0;
  fe_t c = e;
  for (int j = 0; j < sub_degree; ++j) {
    t ^= c;
    c = field.mul(c, c);
  }
  if (t > 1) throw std::runtime_error("trace escaped GF(2); element outside subfield");
  return static_cast<int>(t);
}

NormalBasis dual_basis(const Field& field, const NormalBasis& basis) {
  const int d = basis.subfield_degree;
  if (d == 1) return basis;
  // Solve T x = e0 over GF(2), where T[c][j] = Tr(g^(2^c) * b_j) and the dual
  // generator is beta = sum_j x_j b_j.
  std::vector<std::uint32_t> aug(d);  // row c: d coefficient bits + 1 rhs bit
  for (int c = 0; c < d; ++c) {
    std::uint32_t row = 0;
    for (int j = 0; j < d; ++j) {
      fe_t prod = field.mul(basis.elements[c], basis.elements[j]);
      if (subfield_trace(field, prod, d)) row |= 1u << j;
    }
    if (c == 0) row |= 1u << d;
    aug[c] = row;
  }
  int rank = 0;
  for (int col = 0; col < d; ++col) {
    int piv = -1;
    for (int r = rank; r < d; ++r) {
      if ((aug[r] >> col) & 1u) {
        piv = r;
        break;
      }
    }
    if (piv < 0) continue;
    std::swap(aug[rank], aug[piv]);
    for (int r = 0; r < d; ++r) {
      if (r != rank && ((aug[r] >> col) & 1u)) aug[r] ^= aug[rank];
    }
    ++rank;
  }
  if (rank != d) {
    throw std::runtime_error("singular trace system for a normal basis");
  }
  fe_t beta = 0;
  for (int c = 0; c < d; ++c) {
    if ((aug[c] >> d) & 1u) {
      // Row c is the reduced equation for exactly one variable; find it.
      int var = 0;
      while (((aug[c] >> var) & 1u) == 0) ++var;
      beta ^= basis.elements[var];
    }
  }
  NormalBasis dual{d, {}};
  fe_t c = beta;
  for (int j = 0; j < d; ++j) {
    dual.elements.push_back(c);
    c = field.mul(c, c);
  }
  // Orthonormality self-check: Tr(g^(2^a) beta^(2^b)) == [a == b].
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      int tr = subfield_trace(
          field, field.mul(basis.elements[a], dual.elements[b]), d);
      if (tr != (a == b ? 1 : 0)) {
        throw std::runtime_error("dual basis failed trace-orthonormality");
      }
    }
  }
  return dual;
}

CoordinateMap::CoordinateMap(const Field& field, const NormalBasis& basis)
    : degree_(basis.subfield_degree) {
  table_.assign(std::size_t{1} << field.m(), -1);
  const int count = 1 << degree_;
  for (int mask = 0; mask < count; ++mask) {
    fe_t e = 0;
    for (int j = 0; j < degree_; ++j) {
      if ((mask >> j) & 1) e ^= basis.elements[j];
    }
    if (table_[e] != -1) {
      throw std::invalid_argument("basis elements are linearly dependent");
    }
    table_[e] = mask;
  }
}

std::optional<std::uint32_t> CoordinateMap::coords_mask(fe_t e) const {
  std::int32_t v = e < table_.size() ? table_[e] : -1;
  if (v < 0) return std::nullopt;
  return static_cast<std::uint32_t>(v);
}

std::vector<int> coordinates(const Field& field, fe_t e, const NormalBasis& basis) {
  CoordinateMap map(field, basis);
  std::optional<std::uint32_t> mask = map.coords_mask(e);
  if (!mask) {
    throw std::invalid_argument("element lies outside the basis span");
  }
  std::vector<int> out(basis.subfield_degree);
  for (int j = 0; j < basis.subfield_degree; ++j) out[j] = (*mask >> j) & 1u;
  return out;
}

}  // namespace cfft
