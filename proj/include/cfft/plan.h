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

#ifndef CFFT_PLAN_H_
#define CFFT_PLAN_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cfft/bilinear.h"
#include "cfft/binary_matrix.h"
#include "cfft/gf2m.h"

namespace cfft {

// The three transform shapes sharing one pipeline
//   x --gather--> pre (t x n) --constants--> post (n x t) --scatter--> result.
// kDcfft evaluates a polynomial at all nonzero field points; kScfft is its
// transpose; kIcfft recovers the polynomial from its evaluations.
enum class TransformKind { kDcfft, kScfft, kIcfft };

std::string to_string(TransformKind kind);
std::optional<TransformKind> parse_kind(std::string_view name);

// Partition of {0..2^m-2} into orbits under doubling mod 2^m-1.  Each coset
// is listed from its smallest member (the leader) in doubling order;
// cosets are sorted by leader.
struct CosetDecomposition {
  int m = 0;
  int n = 0;
  std::vector<std::vector<int>> cosets;

  std::vector<int> leaders() const;
  std::vector<int> sizes() const;
  // The input gather: concatenation of all coset members in order.
  std::vector<int> gather() const;
};

CosetDecomposition cyclotomic_cosets(int m);

// The same decomposition with cosets rearranged; `order[i]` names the source
// coset placed at position i.  Throws std::invalid_argument on a non-perm.
CosetDecomposition reorder_cosets(const CosetDecomposition& dec,
                                  const std::vector<int>& order);

struct PlanOptions {
  // Optional normal-basis generator per coset size (degree); conjugates of
  // the given element form the basis.  Degrees not listed use the default
  // (smallest alpha power whose conjugates are a basis).
  std::map<int, fe_t> basis_generator;
  // Optional coset rearrangement (see reorder_cosets).
  std::vector<int> coset_order;
  // Fall back to the schoolbook convolution form for lengths the library
  // lacks (multiplication counts then exceed the efficient references).
  bool allow_naive_forms = false;
  // Every constructed plan is checked against the independent transform
  // oracle (all unit vectors plus this many random vectors); construction
  // throws std::runtime_error on any mismatch.
  int verify_random_trials = 40;
  std::uint64_t verify_seed = 0xcff7;
};

struct CfftPlan {
  TransformKind kind = TransformKind::kDcfft;
  int m = 0;
  int n = 0;  // 2^m - 1
  int t = 0;  // total product count
  Field field{2};
  CosetDecomposition cosets;
  std::map<int, NormalBasis> bases;  // per coset size
  // Pipeline: slot p of the pre input reads x[input_map[p]].
  std::vector<int> input_map;
  BinaryMatrix pre;                // t x n
  std::vector<fe_t> constants;     // t entries, none zero
  BinaryMatrix post;               // n x t
  // The forward transform F (naive_dft of x) satisfies
  // F[output_map[p]] = y[p] for the post output y, for every kind.
  std::vector<int> output_map;
  // Product-row offset of each coset block within pre/constants (plus a
  // final sentinel equal to t).
  std::vector<int> block_offset;
  bool used_naive_form = false;

  // Number of constants different from 1 (the multiplication count).
  int mult_count() const;
};

// Assembles and verifies a plan.  Throws FormUnavailableError when a coset
// size has no form (and naive fallback is off), std::invalid_argument on bad
// options, std::runtime_error if the internal oracle check fails.
CfftPlan build_plan(int m, TransformKind kind, const FormLibrary& library,
                    const PlanOptions& options = {});
// Same, with an explicit decomposition and basis choice per coset size.
CfftPlan build_plan(const Field& field, TransformKind kind,
                    const CosetDecomposition& dec,
                    const std::map<int, NormalBasis>& bases,
                    const FormLibrary& library, const PlanOptions& options = {});

// F_j = sum_i f_i alpha^(i j), j = 0..n-1.
std::vector<fe_t> naive_dft(const Field& field, const std::vector<fe_t>& f);
// f_i = sum_j F_j alpha^(-i j); inverse of naive_dft.
std::vector<fe_t> naive_inverse_dft(const Field& field,
                                    const std::vector<fe_t>& F);

// Runs the full pipeline; returns the post output y in slot order (use
// output_map to place results, or scatter_output for natural order).
std::vector<fe_t> eval_plan(const CfftPlan& plan, const std::vector<fe_t>& x);
// result[output_map[p]] = y[p]; equals naive_dft(x) for a correct plan.
std::vector<fe_t> scatter_output(const CfftPlan& plan,
                                 const std::vector<fe_t>& y);

// Checks the plan against the naive transform on all n unit vectors (via the
// closed form F_j = alpha^(i j)) and `random_trials` random vectors.
// Returns a description of the first mismatch, or nullopt if correct.
std::optional<std::string> verify_plan(const CfftPlan& plan,
                                       int random_trials = 40,
                                       std::uint64_t seed = 0xcff7);

// The n x n binary coordinate matrix: row j, block i holds the coordinates
// of alpha^(j * leader_i) in the basis for that coset's size.
BinaryMatrix build_coordinate_matrix(const Field& field,
                                     const CosetDecomposition& dec,
                                     const std::map<int, NormalBasis>& bases);

// Block-diagonal kernel matrix over the field: block i is the circulant
// M[r][c] = basis.elements[(r + c) mod size_i].  The product of this matrix
// for a basis and for its dual basis is the identity.
std::vector<std::vector<fe_t>> build_kernel_matrix(
    const Field& field, const CosetDecomposition& dec,
    const std::map<int, NormalBasis>& bases);

struct ComplexityReport {
  int n = 0;
  int t = 0;
  int mult = 0;
  long long pre_direct_adds = 0;
  long long post_direct_adds = 0;
  long long direct_adds = 0;
};

ComplexityReport complexity_report(const CfftPlan& plan);

// adds + (2m - 1) * mult: one field multiplication costs 2m - 1 two-input
// GF(2) gate-equivalents in the accounting used throughout.
long long total_complexity(int m, long long adds, long long mult);

// JSON text: dimensions, gather/scatter index arrays, pre/post rows as
// column-index lists, constants as alpha exponents (0 encodes the element 1).
std::string plan_to_json(const CfftPlan& plan);

}  // namespace cfft

#endif  // CFFT_PLAN_H_
