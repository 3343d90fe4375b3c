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

#include "cfft/plan.h"

#include <algorithm>
#include <random>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace cfft {
namespace {

// Inverts an n x n GF(2) matrix by Gauss-Jordan elimination on bitset rows.
// Throws std::runtime_error if singular (cannot happen for a well-formed
// coordinate matrix; treated as an internal error).
BinaryMatrix invert_gf2(const BinaryMatrix& a) {
  const int n = a.n_rows();
  if (a.n_cols() != n) throw std::runtime_error("invert_gf2: not square");
  // Augmented rows [A | I] as dynamic word arrays.
  const int words = (2 * n + 63) / 64;
  std::vector<std::vector<std::uint64_t>> rows(
      n, std::vector<std::uint64_t>(words, 0));
  const auto get_bit = [&](int r, int c) {
    return rows[r][c >> 6] >> (c & 63) & 1;
  };
  for (int r = 0; r < n; ++r) {
    for (int c : a.row(r)) rows[r][c >> 6] |= std::uint64_t{1} << (c & 63);
    const int c = n + r;
    rows[r][c >> 6] |= std::uint64_t{1} << (c & 63);
  }
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r) {
      if (get_bit(r, col)) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) throw std::runtime_error("invert_gf2: singular matrix");
    std::swap(rows[col], rows[pivot]);
    for (int r = 0; r < n; ++r) {
      if (r != col && get_bit(r, col)) {
        for (int w = 0; w < words; ++w) rows[r][w] ^= rows[col][w];
      }
    }
  }
  BinaryMatrix inv(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (get_bit(r, n + c)) inv.set(r, c);
    }
  }
  return inv;
}

NormalBasis basis_from_generator(const Field& field, int degree,
                                 fe_t generator) {
  if (!field.in_subfield(generator, degree)) {
    throw std::invalid_argument(
        "basis generator does not lie in the subfield of degree " +
        std::to_string(degree));
  }
  NormalBasis basis;
  basis.subfield_degree = degree;
  basis.elements.resize(degree);
  fe_t e = generator;
  for (int j = 0; j < degree; ++j) {
    basis.elements[j] = e;
    e = field.mul(e, e);
  }
  std::vector<fe_t> copy = basis.elements;
  std::sort(copy.begin(), copy.end());
  if (std::adjacent_find(copy.begin(), copy.end()) != copy.end() ||
      gf2_rank(basis.elements) != degree) {
    throw std::invalid_argument("element's conjugates do not form a basis");
  }
  return basis;
}

}  // namespace

std::string to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::kDcfft:
      return "dcfft";
    case TransformKind::kScfft:
      return "scfft";
    case TransformKind::kIcfft:
      return "icfft";
  }
  return "unknown";
}

std::optional<TransformKind> parse_kind(std::string_view name) {
  if (name == "dcfft") return TransformKind::kDcfft;
  if (name == "scfft") return TransformKind::kScfft;
  if (name == "icfft") return TransformKind::kIcfft;
  return std::nullopt;
}

std::vector<int> CosetDecomposition::leaders() const {
  std::vector<int> out;
  out.reserve(cosets.size());
  for (const auto& c : cosets) out.push_back(c.front());
  return out;
}

std::vector<int> CosetDecomposition::sizes() const {
  std::vector<int> out;
  out.reserve(cosets.size());
  for (const auto& c : cosets) out.push_back(static_cast<int>(c.size()));
  return out;
}

std::vector<int> CosetDecomposition::gather() const {
  std::vector<int> out;
  out.reserve(n);
  for (const auto& c : cosets) out.insert(out.end(), c.begin(), c.end());
  return out;
}

CosetDecomposition cyclotomic_cosets(int m) {
  if (m < 2 || m > 10) {
    throw std::invalid_argument("cyclotomic_cosets: m must be in [2, 10]");
  }
  CosetDecomposition dec;
  dec.m = m;
  dec.n = (1 << m) - 1;
  std::vector<bool> seen(dec.n, false);
  for (int k = 0; k < dec.n; ++k) {
    if (seen[k]) continue;
    std::vector<int> coset;
    int j = k;
    while (!seen[j]) {
      seen[j] = true;
      coset.push_back(j);
      j = 2 * j % dec.n;
    }
    dec.cosets.push_back(std::move(coset));
  }
  return dec;
}

CosetDecomposition reorder_cosets(const CosetDecomposition& dec,
                                  const std::vector<int>& order) {
  Permutation perm{order};
  if (perm.size() != static_cast<int>(dec.cosets.size()) || !perm.is_valid()) {
    throw std::invalid_argument(
        "reorder_cosets: order is not a permutation of the coset indices");
  }
  CosetDecomposition out;
  out.m = dec.m;
  out.n = dec.n;
  out.cosets.reserve(dec.cosets.size());
  for (int i : order) out.cosets.push_back(dec.cosets[i]);
  return out;
}

int CfftPlan::mult_count() const { return non_one_count(constants); }

BinaryMatrix build_coordinate_matrix(const Field& field,
                                     const CosetDecomposition& dec,
                                     const std::map<int, NormalBasis>& bases) {
  std::map<int, CoordinateMap> coord_maps;
  for (const auto& [size, basis] : bases) {
    coord_maps.emplace(size, CoordinateMap(field, basis));
  }
  const int n = dec.n;
  BinaryMatrix a(n, n);
  for (int j = 0; j < n; ++j) {
    int col_offset = 0;
    for (const auto& coset : dec.cosets) {
      const int size = static_cast<int>(coset.size());
      const auto it = coord_maps.find(size);
      if (it == coord_maps.end()) {
        throw std::invalid_argument(
            "build_coordinate_matrix: no basis for coset size " +
            std::to_string(size));
      }
      const fe_t e = field.alpha_pow(static_cast<long long>(j) * coset[0]);
      const std::optional<std::uint32_t> mask = it->second.coords_mask(e);
      if (!mask) {
        throw std::runtime_error(
            "build_coordinate_matrix: element outside basis span");
      }
      for (int u = 0; u < size; ++u) {
        if (*mask >> u & 1u) a.set(j, col_offset + u);
      }
      col_offset += size;
    }
  }
  return a;
}

std::vector<std::vector<fe_t>> build_kernel_matrix(
    const Field& field, const CosetDecomposition& dec,
    const std::map<int, NormalBasis>& bases) {
  (void)field;
  const int n = dec.n;
  std::vector<std::vector<fe_t>> l(n, std::vector<fe_t>(n, 0));
  int offset = 0;
  for (const auto& coset : dec.cosets) {
    const int size = static_cast<int>(coset.size());
    const auto it = bases.find(size);
    if (it == bases.end()) {
      throw std::invalid_argument("build_kernel_matrix: no basis for size " +
                                  std::to_string(size));
    }
    for (int r = 0; r < size; ++r) {
      for (int c = 0; c < size; ++c) {
        l[offset + r][offset + c] = it->second.elements[(r + c) % size];
      }
    }
    offset += size;
  }
  return l;
}

CfftPlan build_plan(const Field& field, TransformKind kind,
                    const CosetDecomposition& dec,
                    const std::map<int, NormalBasis>& bases,
                    const FormLibrary& library, const PlanOptions& options) {
  CfftPlan plan;
  plan.kind = kind;
  plan.m = field.m();
  plan.n = field.order();
  plan.field = field;
  plan.cosets = dec;
  plan.bases = bases;
  if (dec.m != field.m()) {
    throw std::invalid_argument("build_plan: decomposition does not match m");
  }

  const int n = plan.n;
  const std::vector<int> sigma = dec.gather();

  // One validated form and basis per coset size.
  std::map<int, BilinearForm> forms;
  for (const auto& coset : dec.cosets) {
    const int size = static_cast<int>(coset.size());
    if (forms.count(size)) continue;
    bool used_naive = false;
    forms.emplace(size,
                  library.get(size, options.allow_naive_forms, &used_naive));
    plan.used_naive_form = plan.used_naive_form || used_naive;
    if (!bases.count(size)) {
      throw std::invalid_argument("build_plan: no basis for coset size " +
                                  std::to_string(size));
    }
  }

  // Block layout: column offset (input slots) and product offset per coset.
  const int l = static_cast<int>(dec.cosets.size());
  std::vector<int> col_offset(l, 0);
  plan.block_offset.assign(l + 1, 0);
  {
    int coff = 0, toff = 0;
    for (int i = 0; i < l; ++i) {
      col_offset[i] = coff;
      plan.block_offset[i] = toff;
      const int size = static_cast<int>(dec.cosets[i].size());
      coff += size;
      toff += forms.at(size).t;
    }
    plan.block_offset[l] = toff;
    plan.t = toff;
  }
  const int t = plan.t;

  // Shared pieces: block-diagonal P and Q, the coordinate matrix A, and the
  // primal constants c (kernel = basis vector per block).
  BinaryMatrix p_block(t, n), q_block(n, t);
  std::vector<fe_t> primal_constants(t, 0);
  for (int i = 0; i < l; ++i) {
    const int size = static_cast<int>(dec.cosets[i].size());
    const BilinearForm& form = forms.at(size);
    const NormalBasis& basis = bases.at(size);
    for (int k = 0; k < form.t; ++k) {
      for (int c : form.P.row(k)) p_block.set(plan.block_offset[i] + k,
                                              col_offset[i] + c);
      fe_t acc = 0;
      for (int c : form.R.row(k)) acc ^= basis.elements[c];
      if (acc == 0) {
        throw std::runtime_error(
            "build_plan: zero constant; form and basis are incompatible");
      }
      primal_constants[plan.block_offset[i] + k] = acc;
    }
    for (int r = 0; r < size; ++r) {
      for (int k : form.Q.row(r)) q_block.set(col_offset[i] + r,
                                              plan.block_offset[i] + k);
    }
  }
  const BinaryMatrix a = build_coordinate_matrix(field, dec, bases);

  switch (kind) {
    case TransformKind::kDcfft: {
      plan.input_map = sigma;
      plan.pre = std::move(p_block);
      plan.constants = std::move(primal_constants);
      plan.post = a.multiplied(q_block);
      plan.output_map = Permutation::identity(n).map;
      break;
    }
    case TransformKind::kScfft: {
      const BinaryMatrix aq = a.multiplied(q_block);
      BinaryMatrix gathered(n, t);
      for (int j = 0; j < n; ++j) gathered.set_row(j, aq.row(sigma[j]));
      plan.input_map = sigma;
      plan.pre = gathered.transposed();
      plan.constants = std::move(primal_constants);
      plan.post = p_block.transposed();
      plan.output_map = sigma;
      break;
    }
    case TransformKind::kIcfft: {
      plan.input_map = Permutation::identity(n).map;
      plan.pre = q_block.transposed().multiplied(invert_gf2(a));
      plan.post = p_block.transposed();
      plan.output_map.resize(n);
      for (int j = 0; j < n; ++j) plan.output_map[j] = (n - sigma[j]) % n;
      // Constants from the dual bases: the inverse kernel block is the
      // circulant generated by the dual-basis generator.
      plan.constants.assign(t, 0);
      std::map<int, NormalBasis> duals;
      for (const auto& [size, basis] : bases) {
        duals.emplace(size, dual_basis(field, basis));
      }
      for (int i = 0; i < l; ++i) {
        const int size = static_cast<int>(dec.cosets[i].size());
        const BilinearForm& form = forms.at(size);
        const NormalBasis& dual = duals.at(size);
        for (int k = 0; k < form.t; ++k) {
          fe_t acc = 0;
          for (int c : form.R.row(k)) acc ^= dual.elements[c];
          if (acc == 0) {
            throw std::runtime_error(
                "build_plan: zero constant; form and dual basis are "
                "incompatible");
          }
          plan.constants[plan.block_offset[i] + k] = acc;
        }
      }
      break;
    }
  }

  if (std::optional<std::string> failure =
          verify_plan(plan, options.verify_random_trials,
                      options.verify_seed)) {
    throw std::runtime_error("build_plan: oracle check failed: " + *failure);
  }
  return plan;
}

CfftPlan build_plan(int m, TransformKind kind, const FormLibrary& library,
                    const PlanOptions& options) {
  const Field field(m);
  CosetDecomposition dec = cyclotomic_cosets(m);
  if (!options.coset_order.empty()) {
    dec = reorder_cosets(dec, options.coset_order);
  }
  std::map<int, NormalBasis> bases;
  for (int size : dec.sizes()) {
    if (bases.count(size)) continue;
    const auto it = options.basis_generator.find(size);
    bases.emplace(size, it != options.basis_generator.end()
                            ? basis_from_generator(field, size, it->second)
                            : find_normal_basis(field, size));
  }
  return build_plan(field, kind, dec, bases, library, options);
}

std::vector<fe_t> naive_dft(const Field& field, const std::vector<fe_t>& f) {
  const int n = field.order();
  if (static_cast<int>(f.size()) != n) {
    throw std::invalid_argument("naive_dft: input length mismatch");
  }
  std::vector<fe_t> out(n, 0);
  for (int j = 0; j < n; ++j) {
    fe_t acc = 0;
    for (int i = 0; i < n; ++i) {
      acc ^= field.mul(f[i], field.alpha_pow(static_cast<long long>(i) * j));
    }
    out[j] = acc;
  }
  return out;
}

std::vector<fe_t> naive_inverse_dft(const Field& field,
                                    const std::vector<fe_t>& F) {
  const int n = field.order();
  if (static_cast<int>(F.size()) != n) {
    throw std::invalid_argument("naive_inverse_dft: input length mismatch");
  }
  std::vector<fe_t> out(n, 0);
  for (int i = 0; i < n; ++i) {
    fe_t acc = 0;
    for (int j = 0; j < n; ++j) {
      acc ^= field.mul(F[j], field.alpha_pow(static_cast<long long>(n - i) * j));
    }
    out[i] = acc;
  }
  return out;
}

std::vector<fe_t> eval_plan(const CfftPlan& plan, const std::vector<fe_t>& x) {
  if (static_cast<int>(x.size()) != plan.n) {
    throw std::invalid_argument("eval_plan: input length mismatch");
  }
  std::vector<fe_t> gathered(plan.n);
  for (int p = 0; p < plan.n; ++p) gathered[p] = x[plan.input_map[p]];
  const auto xor_add = [](fe_t a, fe_t b) { return a ^ b; };
  std::vector<fe_t> products =
      mat_vec<fe_t>(plan.pre, gathered, fe_t{0}, xor_add);
  for (int k = 0; k < plan.t; ++k) {
    products[k] = plan.field.mul(plan.constants[k], products[k]);
  }
  return mat_vec<fe_t>(plan.post, products, fe_t{0}, xor_add);
}

std::vector<fe_t> scatter_output(const CfftPlan& plan,
                                 const std::vector<fe_t>& y) {
  std::vector<fe_t> out(plan.n, 0);
  for (int p = 0; p < plan.n; ++p) out[plan.output_map[p]] = y[p];
  return out;
}

std::optional<std::string> verify_plan(const CfftPlan& plan, int random_trials,
                                       std::uint64_t seed) {
  const int n = plan.n;
  const Field& field = plan.field;
  // Unit vectors, with the closed-form expectation F_j = alpha^(i j).
  std::vector<fe_t> x(n, 0);
  for (int i = 0; i < n; ++i) {
    x.assign(n, 0);
    x[i] = 1;
    const std::vector<fe_t> y = eval_plan(plan, x);
    for (int p = 0; p < n; ++p) {
      const fe_t want = field.alpha_pow(static_cast<long long>(i) *
                                        plan.output_map[p]);
      if (y[p] != want) {
        std::ostringstream os;
        os << "unit vector " << i << ": output slot " << p << " is " << y[p]
           << ", want " << want;
        return os.str();
      }
    }
  }
  // Random vectors against the full naive transform.
  std::mt19937_64 rng(seed);
  for (int trial = 0; trial < random_trials; ++trial) {
    for (int i = 0; i < n; ++i) x[i] = static_cast<fe_t>(rng() % field.order());
    const std::vector<fe_t> y = eval_plan(plan, x);
    const std::vector<fe_t> want = naive_dft(field, x);
    for (int p = 0; p < n; ++p) {
      if (y[p] != want[plan.output_map[p]]) {
        std::ostringstream os;
        os << "random trial " << trial << ": output slot " << p << " is "
           << y[p] << ", want " << want[plan.output_map[p]];
        return os.str();
      }
    }
  }
  return std::nullopt;
}

ComplexityReport complexity_report(const CfftPlan& plan) {
  ComplexityReport report;
  report.n = plan.n;
  report.t = plan.t;
  report.mult = plan.mult_count();
  report.pre_direct_adds = plan.pre.direct_add_count();
  report.post_direct_adds = plan.post.direct_add_count();
  report.direct_adds = report.pre_direct_adds + report.post_direct_adds;
  return report;
}

long long total_complexity(int m, long long adds, long long mult) {
  return adds + (2LL * m - 1) * mult;
}

std::string plan_to_json(const CfftPlan& plan) {
  nlohmann::json j;
  j["kind"] = to_string(plan.kind);
  j["m"] = plan.m;
  j["n"] = plan.n;
  j["t"] = plan.t;
  j["primitive_poly"] = plan.field.primitive_poly();
  j["cosets"] = plan.cosets.cosets;
  j["input_map"] = plan.input_map;
  j["output_map"] = plan.output_map;
  j["pre"] = plan.pre.rows();
  j["post"] = plan.post.rows();
  std::vector<int> exps;
  exps.reserve(plan.constants.size());
  for (fe_t c : plan.constants) exps.push_back(plan.field.log_alpha(c));
  j["constants_alpha_exp"] = exps;
  nlohmann::json basis_json = nlohmann::json::object();
  for (const auto& [size, basis] : plan.bases) {
    basis_json[std::to_string(size)] =
        plan.field.log_alpha(basis.generator());
  }
  j["basis_generator_alpha_exp"] = basis_json;
  return j.dump(2);
}

}  // namespace cfft
