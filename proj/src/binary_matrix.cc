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

#include "cfft/binary_matrix.h"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace cfft {

bool Permutation::is_valid() const {
  std::vector<bool> seen(map.size(), false);
  for (int v : map) {
    if (v < 0 || v >= size() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

Permutation Permutation::inverse() const {
  Permutation inv;
  inv.map.assign(map.size(), 0);
  for (int i = 0; i < size(); ++i) inv.map[map[i]] = i;
  return inv;
}

Permutation Permutation::identity(int n) {
  Permutation p;
  p.map.resize(n);
  for (int i = 0; i < n; ++i) p.map[i] = i;
  return p;
}

std::vector<int> row_xor(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      out.push_back(a[i++]);
    } else if (b[j] < a[i]) {
      out.push_back(b[j++]);
    } else {
      ++i;
      ++j;
    }
  }
  out.insert(out.end(), a.begin() + i, a.end());
  out.insert(out.end(), b.begin() + j, b.end());
  return out;
}

namespace {

void check_row(const std::vector<int>& cols, int n_cols) {
  int prev = -1;
  for (int c : cols) {
    if (c <= prev || c >= n_cols) {
      throw std::invalid_argument("row indices must be strictly increasing and in range");
    }
    prev = c;
  }
}

}  // namespace

BinaryMatrix::BinaryMatrix(int n_rows, int n_cols) : n_cols_(n_cols) {
  if (n_rows < 0 || n_cols < 0) {
    throw std::invalid_argument("matrix dimensions must be nonnegative");
  }
  rows_.resize(n_rows);
}

BinaryMatrix BinaryMatrix::identity(int n) {
  BinaryMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.rows_[i] = {i};
  return m;
}

BinaryMatrix BinaryMatrix::from_rows(int n_cols,
                                     std::vector<std::vector<int>> rows) {
  BinaryMatrix m(static_cast<int>(rows.size()), n_cols);
  for (const auto& r : rows) check_row(r, n_cols);
  m.rows_ = std::move(rows);
  return m;
}

bool BinaryMatrix::get(int r, int c) const {
  const auto& row = rows_[r];
  return std::binary_search(row.begin(), row.end(), c);
}

void BinaryMatrix::set(int r, int c) {
  if (c < 0 || c >= n_cols_) throw std::invalid_argument("column out of range");
  auto& row = rows_[r];
  auto it = std::lower_bound(row.begin(), row.end(), c);
  if (it == row.end() || *it != c) row.insert(it, c);
}

void BinaryMatrix::set_row(int r, std::vector<int> cols) {
  check_row(cols, n_cols_);
  rows_[r] = std::move(cols);
}

void BinaryMatrix::append_row(std::vector<int> cols) {
  check_row(cols, n_cols_);
  rows_.push_back(std::move(cols));
}

void BinaryMatrix::resize_cols(int n_cols) {
  if (n_cols < n_cols_) throw std::invalid_argument("column count may only grow");
  n_cols_ = n_cols;
}

long long BinaryMatrix::weight() const {
  long long w = 0;
  for (const auto& r : rows_) w += static_cast<long long>(r.size());
  return w;
}

long long BinaryMatrix::direct_add_count() const {
  long long adds = 0;
  for (const auto& r : rows_) {
    if (!r.empty()) adds += static_cast<long long>(r.size()) - 1;
  }
  return adds;
}

std::vector<int> BinaryMatrix::degenerate_rows() const {
  std::vector<int> out;
  for (int r = 0; r < n_rows(); ++r) {
    if (rows_[r].empty()) out.push_back(r);
  }
  return out;
}

BinaryMatrix BinaryMatrix::transposed() const {
  BinaryMatrix t(n_cols_, n_rows());
  for (int r = 0; r < n_rows(); ++r) {
    for (int c : rows_[r]) t.rows_[c].push_back(r);
  }
  return t;
}

BinaryMatrix BinaryMatrix::permuted(const Permutation& row_perm,
                                    const Permutation& col_perm) const {
  if (row_perm.size() != n_rows() || col_perm.size() != n_cols_) {
    throw std::invalid_argument("permutation sizes must match matrix dimensions");
  }
  BinaryMatrix out(n_rows(), n_cols_);
  for (int r = 0; r < n_rows(); ++r) {
    auto& dst = out.rows_[row_perm.map[r]];
    for (int c : rows_[r]) dst.push_back(col_perm.map[c]);
    std::sort(dst.begin(), dst.end());
  }
  return out;
}

BinaryMatrix BinaryMatrix::multiplied(const BinaryMatrix& other) const {
  if (n_cols_ != other.n_rows()) {
    throw std::invalid_argument("inner dimensions must match");
  }
  BinaryMatrix out(n_rows(), other.n_cols());
  for (int r = 0; r < n_rows(); ++r) {
    std::vector<int> acc;
    for (int c : rows_[r]) acc = row_xor(acc, other.rows_[c]);
    out.rows_[r] = std::move(acc);
  }
  return out;
}

std::string BinaryMatrix::to_text() const {
  std::ostringstream os;
  os << n_rows() << ' ' << n_cols_ << '\n';
  for (int r = 0; r < n_rows(); ++r) {
    std::string line(n_cols_, '0');
    for (int c : rows_[r]) line[c] = '1';
    os << line << '\n';
  }
  return os.str();
}

BinaryMatrix BinaryMatrix::from_text(const std::string& text) {
  std::istringstream is(text);
  int n_rows = 0, n_cols = 0;
  if (!(is >> n_rows >> n_cols)) {
    throw std::invalid_argument("matrix text must start with \"rows cols\"");
  }
  BinaryMatrix m(n_rows, n_cols);
  std::string line;
  for (int r = 0; r < n_rows; ++r) {
    if (!(is >> line) || static_cast<int>(line.size()) != n_cols) {
      throw std::invalid_argument("matrix text row has wrong length");
    }
    for (int c = 0; c < n_cols; ++c) {
      if (line[c] == '1') {
        m.rows_[r].push_back(c);
      } else if (line[c] != '0') {
        throw std::invalid_argument("matrix text rows must be 0/1 strings");
      }
    }
  }
  return m;
}

}  // namespace cfft
