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

#include "cfft/bilinear.h"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace cfft {
namespace {

// Reverses the cyclic index of every column: c -> (N - c) mod N.  Mapping a
// correlation form to the equivalent polynomial-product form (and back)
// reverses one of the two input operands this way.
BinaryMatrix reverse_columns(const BinaryMatrix& m) {
  const int n = m.n_cols();
  BinaryMatrix out(m.n_rows(), n);
  for (int r = 0; r < m.n_rows(); ++r) {
    for (int c : m.row(r)) out.set(r, c == 0 ? 0 : n - c);
  }
  return out;
}

std::uint64_t row_mask(const BinaryMatrix& m, int r) {
  std::uint64_t mask = 0;
  for (int c : m.row(r)) mask |= std::uint64_t{1} << c;
  return mask;
}

std::string dims_error(const BilinearForm& form) {
  std::ostringstream os;
  os << "bilinear form dimensions inconsistent: length=" << form.length
     << " t=" << form.t << " P=" << form.P.n_rows() << "x" << form.P.n_cols()
     << " R=" << form.R.n_rows() << "x" << form.R.n_cols()
     << " Q=" << form.Q.n_rows() << "x" << form.Q.n_cols();
  return os.str();
}

}  // namespace

std::vector<fe_t> apply_bilinear(const BilinearForm& form, const Field& field,
                                 const std::vector<fe_t>& u,
                                 const std::vector<fe_t>& f) {
  if (static_cast<int>(u.size()) != form.length ||
      static_cast<int>(f.size()) != form.length) {
    throw std::invalid_argument("apply_bilinear: input size mismatch");
  }
  const auto xor_add = [](fe_t a, fe_t b) { return a ^ b; };
  std::vector<fe_t> ru = mat_vec<fe_t>(form.R, u, fe_t{0}, xor_add);
  std::vector<fe_t> pf = mat_vec<fe_t>(form.P, f, fe_t{0}, xor_add);
  std::vector<fe_t> products(form.t);
  for (int k = 0; k < form.t; ++k) products[k] = field.mul(ru[k], pf[k]);
  return mat_vec<fe_t>(form.Q, products, fe_t{0}, xor_add);
}

std::vector<fe_t> cyclic_correlation(const Field& field,
                                     const std::vector<fe_t>& u,
                                     const std::vector<fe_t>& f) {
  if (u.size() != f.size()) {
    throw std::invalid_argument("cyclic_correlation: input size mismatch");
  }
  const int n = static_cast<int>(u.size());
  std::vector<fe_t> out(n, 0);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      out[r] ^= field.mul(u[(r + c) % n], f[c]);
    }
  }
  return out;
}

std::optional<BilinearCounterexample> validate_bilinear(
    const BilinearForm& form, const Field& field, int random_trials,
    std::uint64_t seed) {
  const int n = form.length;
  const int t = form.t;
  BilinearCounterexample ce;
  if (n < 1 || n > 63 || t < n || form.P.n_rows() != t ||
      form.P.n_cols() != n || form.R.n_rows() != t || form.R.n_cols() != n ||
      form.Q.n_rows() != n || form.Q.n_cols() != t) {
    ce.detail = dims_error(form);
    return ce;
  }

  // Exact coefficient identity: for every output r and kernel index i, the
  // GF(2) polynomial sum_k Q[r][k] R[k][i] P[k][j] over data indices j must
  // equal the single monomial f[(i - r) mod n].  This is the all-pairs
  // unit-vector check done symbolically, so it holds over every
  // characteristic-2 field at once.
  std::vector<std::uint64_t> p_mask(t), r_mask(t);
  for (int k = 0; k < t; ++k) {
    p_mask[k] = row_mask(form.P, k);
    r_mask[k] = row_mask(form.R, k);
  }
  for (int r = 0; r < n; ++r) {
    std::vector<std::uint64_t> coeff(n, 0);
    for (int k : form.Q.row(r)) {
      for (int i = 0; i < n; ++i) {
        if (r_mask[k] >> i & 1) coeff[i] ^= p_mask[k];
      }
    }
    for (int i = 0; i < n; ++i) {
      const std::uint64_t expected = std::uint64_t{1} << ((i - r + n) % n);
      if (coeff[i] != expected) {
        ce.u.assign(n, 0);
        ce.f.assign(n, 0);
        ce.u[i] = 1;
        ce.output_index = r;
        std::ostringstream os;
        os << "coefficient mismatch at output " << r << ", kernel index " << i
           << ": got mask " << coeff[i] << ", want " << expected;
        ce.detail = os.str();
        return ce;
      }
    }
  }

  // Concrete spot checks against the reference correlation.
  std::mt19937_64 rng(seed);
  for (int trial = 0; trial < random_trials; ++trial) {
    std::vector<fe_t> u(n), f(n);
    for (int i = 0; i < n; ++i) {
      u[i] = static_cast<fe_t>(rng() % field.order());
      f[i] = static_cast<fe_t>(rng() % field.order());
    }
    std::vector<fe_t> got = apply_bilinear(form, field, u, f);
    std::vector<fe_t> want = cyclic_correlation(field, u, f);
    for (int r = 0; r < n; ++r) {
      if (got[r] != want[r]) {
        ce.u = u;
        ce.f = f;
        ce.output_index = r;
        std::ostringstream os;
        os << "random trial " << trial << " output " << r << ": got " << got[r]
           << ", want " << want[r];
        ce.detail = os.str();
        return ce;
      }
    }
  }
  return std::nullopt;
}

BilinearForm naive_bilinear(int length) {
  if (length < 1) throw std::invalid_argument("naive_bilinear: bad length");
  const int n = length;
  BilinearForm form;
  form.length = n;
  form.t = n * n;
  form.P = BinaryMatrix(n * n, n);
  form.R = BinaryMatrix(n * n, n);
  form.Q = BinaryMatrix(n, n * n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const int k = r * n + c;
      form.P.set(k, c);
      form.R.set(k, (r + c) % n);
      form.Q.set(r, k);
    }
  }
  return form;
}

BilinearForm agarwal_cooley(const BilinearForm& a, const BilinearForm& b) {
  const int n1 = a.length;
  const int n2 = b.length;
  if (std::gcd(n1, n2) != 1) {
    throw std::invalid_argument(
        "agarwal_cooley: lengths must be coprime, got " + std::to_string(n1) +
        " and " + std::to_string(n2));
  }
  const int n = n1 * n2;
  const int t = a.t * b.t;

  // Work in the polynomial-product orientation, where the splitting is the
  // Chinese-remainder map i -> (i mod n1, i mod n2) on both operands: a
  // product of cyclic convolutions of coprime lengths is the cyclic
  // convolution of the product length.  A correlation form is a product form
  // with the kernel operand index-reversed, so convert, tensor, convert back.
  const BinaryMatrix pu1 = a.R;
  const BinaryMatrix pv1 = reverse_columns(a.P);
  const BinaryMatrix pu2 = b.R;
  const BinaryMatrix pv2 = reverse_columns(b.P);

  BilinearForm out;
  out.length = n;
  out.t = t;
  BinaryMatrix pu(t, n), pv(t, n), q(n, t);
  for (int k1 = 0; k1 < a.t; ++k1) {
    const std::uint64_t u1 = row_mask(pu1, k1);
    const std::uint64_t v1 = row_mask(pv1, k1);
    for (int k2 = 0; k2 < b.t; ++k2) {
      const std::uint64_t u2 = row_mask(pu2, k2);
      const std::uint64_t v2 = row_mask(pv2, k2);
      const int k = k1 * b.t + k2;
      for (int i = 0; i < n; ++i) {
        if ((u1 >> (i % n1) & 1) && (u2 >> (i % n2) & 1)) pu.set(k, i);
        if ((v1 >> (i % n1) & 1) && (v2 >> (i % n2) & 1)) pv.set(k, i);
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    const std::uint64_t q1 = row_mask(a.Q, i % n1);
    const std::uint64_t q2 = row_mask(b.Q, i % n2);
    for (int k1 = 0; k1 < a.t; ++k1) {
      if (!(q1 >> k1 & 1)) continue;
      for (int k2 = 0; k2 < b.t; ++k2) {
        if (q2 >> k2 & 1) q.set(i, k1 * b.t + k2);
      }
    }
  }
  out.R = std::move(pu);
  out.P = reverse_columns(pv);
  out.Q = std::move(q);
  return out;
}

std::vector<fe_t> constant_vector(const BilinearForm& form, const Field& field,
                                  const NormalBasis& basis) {
  if (form.length != basis.subfield_degree) {
    throw std::invalid_argument(
        "constant_vector: form length " + std::to_string(form.length) +
        " does not match basis degree " +
        std::to_string(basis.subfield_degree));
  }
  std::vector<fe_t> c(form.t, 0);
  for (int k = 0; k < form.t; ++k) {
    fe_t acc = 0;
    for (int i : form.R.row(k)) acc ^= basis.elements[i];
    if (acc == 0) {
      throw std::invalid_argument(
          "constant_vector: zero constant at product " + std::to_string(k) +
          "; form and basis are incompatible");
    }
    c[k] = acc;
  }
  (void)field;
  return c;
}

int non_one_count(const std::vector<fe_t>& c) {
  return static_cast<int>(std::count_if(c.begin(), c.end(),
                                        [](fe_t e) { return e != 1; }));
}

int all_one_row_count(const BilinearForm& form) {
  int count = 0;
  for (int k = 0; k < form.t; ++k) {
    if (static_cast<int>(form.R.row(k).size()) == form.length) ++count;
  }
  return count;
}

std::string form_to_text(const BilinearForm& form) {
  std::ostringstream os;
  os << "cyclic " << form.length << " " << form.t << "\n";
  const auto emit_rows = [&os](const BinaryMatrix& m) {
    for (int r = 0; r < m.n_rows(); ++r) {
      std::string line(m.n_cols(), '0');
      for (int c : m.row(r)) line[c] = '1';
      os << line << "\n";
    }
  };
  emit_rows(form.P);
  emit_rows(form.R);
  emit_rows(form.Q);
  return os.str();
}

BilinearForm form_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string tag;
  int length = 0, t = 0;
  if (!(is >> tag >> length >> t) || tag != "cyclic" || length < 1 || t < 1) {
    throw std::invalid_argument("form_from_text: bad header, expected "
                                "\"cyclic <length> <t>\"");
  }
  const auto read_rows = [&is](int rows, int cols, const char* what) {
    std::vector<std::vector<int>> out;
    out.reserve(rows);
    for (int r = 0; r < rows; ++r) {
      std::string line;
      if (!(is >> line) || static_cast<int>(line.size()) != cols) {
        throw std::invalid_argument(std::string("form_from_text: bad ") +
                                    what + " row " + std::to_string(r));
      }
      std::vector<int> row;
      for (int c = 0; c < cols; ++c) {
        if (line[c] == '1') {
          row.push_back(c);
        } else if (line[c] != '0') {
          throw std::invalid_argument(std::string("form_from_text: bad ") +
                                      what + " row " + std::to_string(r));
        }
      }
      out.push_back(std::move(row));
    }
    return out;
  };
  BilinearForm form;
  form.length = length;
  form.t = t;
  form.P = BinaryMatrix::from_rows(length, read_rows(t, length, "P"));
  form.R = BinaryMatrix::from_rows(length, read_rows(t, length, "R"));
  form.Q = BinaryMatrix::from_rows(t, read_rows(length, t, "Q"));
  return form;
}

FormLibrary FormLibrary::builtins() {
  FormLibrary lib;
  {
    BilinearForm f;
    f.length = 1;
    f.t = 1;
    f.P = BinaryMatrix::from_rows(1, {{0}});
    f.R = BinaryMatrix::from_rows(1, {{0}});
    f.Q = BinaryMatrix::from_rows(1, {{0}});
    lib.add(std::move(f));
  }
  {
    // Length 2 with 3 products, one product constant-free (R row not all-one).
    BilinearForm f;
    f.length = 2;
    f.t = 3;
    f.P = BinaryMatrix::from_rows(2, {{0, 1}, {1}, {0, 1}});
    f.R = BinaryMatrix::from_rows(2, {{0, 1}, {0, 1}, {1}});
    f.Q = BinaryMatrix::from_rows(3, {{0, 1, 2}, {1, 2}});
    lib.add(std::move(f));
  }
  {
    // Length 3 with 4 products, three of them constant-free.
    BilinearForm f;
    f.length = 3;
    f.t = 4;
    f.P = BinaryMatrix::from_rows(3, {{0, 1, 2}, {1, 2}, {0, 1}, {0, 2}});
    f.R = BinaryMatrix::from_rows(3, {{0, 1, 2}, {1, 2}, {0, 2}, {0, 1}});
    f.Q = BinaryMatrix::from_rows(4, {{0, 2, 3}, {0, 1, 2}, {0, 1, 3}});
    lib.add(std::move(f));
  }
  return lib;
}

void FormLibrary::add(BilinearForm form) {
  static const Field validation_field(8);
  if (auto ce = validate_bilinear(form, validation_field)) {
    throw std::invalid_argument("FormLibrary::add: invalid form of length " +
                                std::to_string(form.length) + ": " +
                                ce->detail);
  }
  forms_[form.length] = std::move(form);
}

void FormLibrary::load_directory(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw FormUnavailableError("form directory not found: " + dir);
  }
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& path : paths) {
    std::ifstream in(path);
    std::ostringstream text;
    text << in.rdbuf();
    try {
      add(form_from_text(text.str()));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("while loading " + path.string() + ": " +
                                  e.what());
    }
  }
}

void FormLibrary::compose_missing(int max_length) {
  for (int length = 4; length <= max_length; ++length) {
    if (forms_.count(length)) continue;
    for (int a = 2; a * a <= length; ++a) {
      if (length % a != 0) continue;
      const int b = length / a;
      if (std::gcd(a, b) != 1) continue;
      auto ia = forms_.find(a);
      auto ib = forms_.find(b);
      if (ia == forms_.end() || ib == forms_.end()) continue;
      add(agarwal_cooley(ia->second, ib->second));
      break;
    }
  }
}

const BilinearForm* FormLibrary::find(int length) const {
  auto it = forms_.find(length);
  return it == forms_.end() ? nullptr : &it->second;
}

BilinearForm FormLibrary::get(int length, bool allow_naive,
                              bool* used_naive) const {
  if (used_naive != nullptr) *used_naive = false;
  if (const BilinearForm* form = find(length)) return *form;
  if (allow_naive) {
    if (used_naive != nullptr) *used_naive = true;
    return naive_bilinear(length);
  }
  throw FormUnavailableError("no convolution form of length " +
                             std::to_string(length) +
                             " is available (naive fallback disabled)");
}

std::vector<int> FormLibrary::available_lengths() const {
  std::vector<int> lengths;
  lengths.reserve(forms_.size());
  for (const auto& [length, form] : forms_) lengths.push_back(length);
  return lengths;
}

}  // namespace cfft
