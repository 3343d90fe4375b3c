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

#ifndef CFFT_BINARY_MATRIX_H_
#define CFFT_BINARY_MATRIX_H_

#include <string>
#include <vector>

namespace cfft {

// A bijection on {0..n-1}.
struct Permutation {
  std::vector<int> map;  // map[i] = image of i

  int size() const { return static_cast<int>(map.size()); }
  bool is_valid() const;
  Permutation inverse() const;
  static Permutation identity(int n);
};

// Symmetric difference of two strictly increasing index lists (characteristic-2
// row addition).
std::vector<int> row_xor(const std::vector<int>& a, const std::vector<int>& b);

// A sparse 0/1 matrix; each row stores the sorted column indices of its 1
// entries.
class BinaryMatrix {
 public:
  BinaryMatrix() = default;
  BinaryMatrix(int n_rows, int n_cols);
  static BinaryMatrix identity(int n);
  // Validates that rows are strictly increasing and in range.
  static BinaryMatrix from_rows(int n_cols, std::vector<std::vector<int>> rows);

  int n_rows() const { return static_cast<int>(rows_.size()); }
  int n_cols() const { return n_cols_; }
  const std::vector<int>& row(int r) const { return rows_[r]; }
  const std::vector<std::vector<int>>& rows() const { return rows_; }

  bool get(int r, int c) const;
  void set(int r, int c);                          // idempotent insert
  void set_row(int r, std::vector<int> cols);      // validated replacement
  void append_row(std::vector<int> cols);
  void resize_cols(int n_cols);                    // may only grow

  long long weight() const;
  // Additions for the direct row-by-row evaluation: sum over rows of
  // max(0, ones - 1).  Rows with zero 1s are degenerate (they contribute no
  // additions but make the W(M) - n formula invalid); degenerate_rows reports
  // them.
  long long direct_add_count() const;
  std::vector<int> degenerate_rows() const;

  BinaryMatrix transposed() const;
  // M' = row_perm . M . col_perm: entry (i, j) of M lands at row
  // row_perm[i], column col_perm[j].
  BinaryMatrix permuted(const Permutation& row_perm,
                        const Permutation& col_perm) const;
  // GF(2) matrix product (this . other).
  BinaryMatrix multiplied(const BinaryMatrix& other) const;

  bool operator==(const BinaryMatrix& other) const = default;

  // Text format: first line "rows cols", then one 0/1 string per row.
  std::string to_text() const;
  static BinaryMatrix from_text(const std::string& text);

 private:
  int n_cols_ = 0;
  std::vector<std::vector<int>> rows_;
};

// Y = M X over any commutative XOR-monoid: Y_i is the fold of add over the
// X_j with j in row i, starting from zero.
template <typename T, typename AddFn>
std::vector<T> mat_vec(const BinaryMatrix& m, const std::vector<T>& x,
                       const T& zero, AddFn add) {
  std::vector<T> y;
  y.reserve(m.n_rows());
  for (int r = 0; r < m.n_rows(); ++r) {
    T acc = zero;
    for (int c : m.row(r)) acc = add(acc, x[c]);
    y.push_back(acc);
  }
  return y;
}

}  // namespace cfft

#endif  // CFFT_BINARY_MATRIX_H_
