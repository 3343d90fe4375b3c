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

#ifndef CFFT_BILINEAR_H_
#define CFFT_BILINEAR_H_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfft/binary_matrix.h"
#include "cfft/gf2m.h"

namespace cfft {

// A bilinear cyclic-correlation algorithm of length N with t products:
//
//   Q ((R u) .* (P f))  ==  L(u) f      for every u, f over any
//                                       characteristic-2 field,
//
// where L(u) is the N x N matrix with L[r][c] = u[(r+c) mod N].  P and R are
// t x N, Q is N x t.  In a transform plan, u is instantiated with a normal
// basis vector, making c = R u the constant vector.
struct BilinearForm {
  int length = 0;
  int t = 0;
  BinaryMatrix P;  // applied to the data vector f
  BinaryMatrix R;  // applied to the kernel vector u
  BinaryMatrix Q;
};

// First failing instance found by the concrete validation pass.
struct BilinearCounterexample {
  std::vector<fe_t> u;
  std::vector<fe_t> f;
  int output_index = 0;
  std::string detail;
};

// Reference evaluation of the form over a field.
std::vector<fe_t> apply_bilinear(const BilinearForm& form, const Field& field,
                                 const std::vector<fe_t>& u,
                                 const std::vector<fe_t>& f);

// Reference circulant product: out[r] = sum_c u[(r+c) mod N] * f[c].
std::vector<fe_t> cyclic_correlation(const Field& field,
                                     const std::vector<fe_t>& u,
                                     const std::vector<fe_t>& f);

// Validates the form: dimension sanity, the exact bilinear-coefficient
// identity (equivalent to checking all pairs of unit vectors symbolically,
// hence independent of any particular field), and `random_trials` random
// concrete (u, f) pairs over `field`.  Returns the first counterexample, or
// nullopt if the form is correct.
std::optional<BilinearCounterexample> validate_bilinear(
    const BilinearForm& form, const Field& field, int random_trials = 128,
    std::uint64_t seed = 0x5eed);

// The schoolbook form with t = length^2 products; always valid.
BilinearForm naive_bilinear(int length);

// Composes two coprime-length forms into a form of the product length via the
// Chinese-remainder index map.  Throws std::invalid_argument if the lengths
// share a factor.
BilinearForm agarwal_cooley(const BilinearForm& a, const BilinearForm& b);

// c = R u with u the basis vector.  Requires form.length ==
// basis.subfield_degree.  Throws std::invalid_argument if any entry is zero
// (an invalid form/basis pairing).
std::vector<fe_t> constant_vector(const BilinearForm& form, const Field& field,
                                  const NormalBasis& basis);

// Number of entries different from 1 (the multiplicative cost of the form
// instantiated with any normal basis).
int non_one_count(const std::vector<fe_t>& c);

// Number of all-one rows of R; for a normal-basis kernel, exactly the number
// of 1-entries of the constant vector, for every basis choice.
int all_one_row_count(const BilinearForm& form);

// Text format: line 1 "cyclic <length> <t>", then t rows of P, t rows of R
// (0/1 strings of width `length`), then `length` rows of Q (width t).
std::string form_to_text(const BilinearForm& form);
BilinearForm form_from_text(const std::string& text);

// Raised when a required convolution length has no efficient form and the
// naive fallback was not allowed.
struct FormUnavailableError : std::runtime_error {
  explicit FormUnavailableError(const std::string& what)
      : std::runtime_error(what) {}
};

// A registry of one form per convolution length.  Lengths 1-3 are built in;
// longer forms are loaded from files; missing composite lengths are composed
// from coprime parts where possible.
class FormLibrary {
 public:
  // Library holding the built-in forms (lengths 1, 2, 3).
  static FormLibrary builtins();

  // Validates and stores a form (replacing any previous one for that length).
  // Throws std::invalid_argument if validation fails.
  void add(BilinearForm form);
  // Loads and validates every *.txt file in the directory.  Throws on any
  // malformed or invalid file; missing directory is an error.
  void load_directory(const std::string& dir);
  // Fills in composite lengths up to max_length (inclusive) by Agarwal-Cooley
  // composition of coprime stored parts, smallest lengths first.
  void compose_missing(int max_length = 10);

  const BilinearForm* find(int length) const;
  // Stored form for the length, or the naive fallback when allowed; throws
  // FormUnavailableError otherwise.  *used_naive (optional) reports fallback.
  BilinearForm get(int length, bool allow_naive = false,
                   bool* used_naive = nullptr) const;

  std::vector<int> available_lengths() const;

 private:
  std::map<int, BilinearForm> forms_;
};

}  // namespace cfft

#endif  // CFFT_BILINEAR_H_
