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

#include "cfft/cse.h"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace cfft {
namespace {

// Flips membership of col in a sorted column list.
std::vector<int> toggle(std::vector<int> cols, int col) {
  auto it = std::lower_bound(cols.begin(), cols.end(), col);
  if (it != cols.end() && *it == col) {
    cols.erase(it);
  } else {
    cols.insert(it, col);
  }
  return cols;
}

bool contains(const std::vector<int>& cols, int col) {
  return std::binary_search(cols.begin(), cols.end(), col);
}

}  // namespace

int differential_saving(const std::vector<int>& parent,
                        const std::vector<int>& child) {
  int w_d = static_cast<int>(row_xor(parent, child).size());
  int saving = static_cast<int>(child.size()) - w_d - 1;
  return std::max(0, saving);
}

CseOptimizer::CseOptimizer(BinaryMatrix matrix, CseOptions options)
    : rows_(std::move(matrix)), options_(options), rng_(options.seed) {
  original_cols_ = rows_.n_cols();
  columns_.resize(original_cols_);
  row_sum_col_.assign(rows_.n_rows(), -1);
  edges_.assign(rows_.n_rows(), {});
  ld_ = options_.ld > 0 ? options_.ld : default_window();
  lr_ = options_.lr > 0 ? options_.lr : default_window();
}

int CseOptimizer::default_window() const {
  return std::max(rows_.n_rows(), original_cols_) <= 63 ? 2 : 1;
}

void CseOptimizer::run() {
  if (options_.recurrence_only) {
    begin_recurrence_phase();
    for (;;) {
      if (recurrence_step()) continue;
      if (reversal_step()) continue;
      break;
    }
    return;
  }
  if (options_.strategy == CseStrategy::kGreedy) {
    for (;;) {
      std::vector<Candidate> diff = classic_differential_candidates();
      std::vector<Candidate> rec = recurrence_candidates();
      int s_d = diff.empty() ? 0 : diff.front().saving;
      int s_r = rec.empty() ? 0 : rec.front().saving;
      if (s_d <= 0 && s_r <= 0) {
        if (reversal_step()) continue;
        break;
      }
      if (s_d > s_r) {
        int window =
            std::min<int>(ld_, static_cast<int>(diff.size()));
        const Candidate& pick = diff[rng_() % window];
        apply_differential(pick.a, pick.b, rows_.row(pick.a));
      } else {
        int window = std::min<int>(lr_, static_cast<int>(rec.size()));
        const Candidate& pick = rec[rng_() % window];
        apply_recurrence(pick.a, pick.b);
      }
    }
    return;
  }
  if (options_.algorithm == CseAlgorithm::kFast) {
    begin_differential_phase();
    while (differential_step()) {
    }
    begin_recurrence_phase();
    for (;;) {
      if (recurrence_step()) continue;
      if (reversal_step()) continue;
      break;
    }
    return;
  }
  // Classic: exhaust differentials, take one recurrence, repeat; when both
  // families are dry, reversals may unlock further recurrences.
  for (;;) {
    while (differential_step()) {
    }
    if (recurrence_step()) continue;
    bool resumed = false;
    while (reversal_step()) {
      if (recurrence_step()) {
        resumed = true;
        break;
      }
    }
    if (!resumed) break;
  }
}

// ---------------------------------------------------------------------------
// Shared plumbing.

int CseOptimizer::append_column(OptimizerColumn column) {
  columns_.push_back(std::move(column));
  rows_.resize_cols(static_cast<int>(columns_.size()));
  return static_cast<int>(columns_.size()) - 1;
}

int CseOptimizer::ensure_row_sum_column(int row) {
  if (row_sum_col_[row] < 0) {
    OptimizerColumn column;
    column.kind = ColumnKind::kRowSum;
    column.source_row = row;
    row_sum_col_[row] = append_column(std::move(column));
  }
  return row_sum_col_[row];
}

void CseOptimizer::mutate_row(int row, std::vector<int> cols) {
  if (registry_ready_) {
    registry_add(rows_.row(row), -1);
    registry_add(cols, +1);
  }
  rows_.set_row(row, std::move(cols));
}

std::vector<char> CseOptimizer::reachable_set(int start, bool reverse) const {
  std::vector<char> seen(rows_.n_rows(), 0);
  std::vector<int> stack = {start};
  seen[start] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (!reverse) {
      for (int w : edges_[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    } else {
      for (int u = 0; u < rows_.n_rows(); ++u) {
        if (!seen[u] && edges_[u].count(v)) {
          seen[u] = 1;
          stack.push_back(u);
        }
      }
    }
  }
  return seen;
}

bool CseOptimizer::is_cycle_inducing(int parent, int child) const {
  if (parent == child) return true;
  // The new edge parent -> child closes a cycle iff child already reaches
  // parent.
  return reachable_set(child, /*reverse=*/false)[parent] != 0;
}

bool CseOptimizer::dependency_graph_acyclic() const {
  // Kahn count over the row dependency graph.
  int n = rows_.n_rows();
  std::vector<int> indegree(n, 0);
  for (int u = 0; u < n; ++u) {
    for (int v : edges_[u]) ++indegree[v];
  }
  std::vector<int> ready;
  for (int v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push_back(v);
  }
  int emitted = 0;
  while (!ready.empty()) {
    int v = ready.back();
    ready.pop_back();
    ++emitted;
    for (int w : edges_[v]) {
      if (--indegree[w] == 0) ready.push_back(w);
    }
  }
  return emitted == n;
}

long long CseOptimizer::cost() const {
  std::vector<char> needed(columns_.size(), 0);
  std::vector<int> stack;
  long long total = 0;
  for (int r = 0; r < rows_.n_rows(); ++r) {
    total += std::max<long long>(
        0, static_cast<long long>(rows_.row(r).size()) - 1);
    for (int c : rows_.row(r)) {
      if (!needed[c]) {
        needed[c] = 1;
        stack.push_back(c);
      }
    }
  }
  while (!stack.empty()) {
    int c = stack.back();
    stack.pop_back();
    for (int op : columns_[c].operands) {
      if (!needed[op]) {
        needed[op] = 1;
        stack.push_back(op);
      }
    }
  }
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (needed[c]) total += columns_[c].add_cost();
  }
  return total;
}

std::set<int> CseOptimizer::column_row_dependencies(int col) const {
  std::set<int> deps;
  std::vector<int> stack = {col};
  std::set<int> seen = {col};
  while (!stack.empty()) {
    int c = stack.back();
    stack.pop_back();
    if (columns_[c].kind == ColumnKind::kRowSum) {
      deps.insert(columns_[c].source_row);
      continue;
    }
    for (int op : columns_[c].operands) {
      if (seen.insert(op).second) stack.push_back(op);
    }
  }
  return deps;
}

// Replaces row's columns only if every newly required row dependency can be
// added without closing a cycle; returns whether the change was committed.
bool CseOptimizer::commit_row_with_edges(int row, std::vector<int> new_cols) {
  std::set<int> before;
  for (int c : rows_.row(row)) {
    for (int dep : column_row_dependencies(c)) before.insert(dep);
  }
  std::set<int> needed;
  for (int c : new_cols) {
    for (int dep : column_row_dependencies(c)) {
      if (!before.count(dep) && !edges_[dep].count(row)) needed.insert(dep);
    }
  }
  if (!needed.empty()) {
    std::vector<char> reach = reachable_set(row, /*reverse=*/false);
    for (int dep : needed) {
      if (dep == row || reach[dep]) return false;
    }
    for (int dep : needed) edges_[dep].insert(row);
  }
  mutate_row(row, std::move(new_cols));
  return true;
}

// ---------------------------------------------------------------------------
// Differential transforms.

int CseOptimizer::exact_differential_saving(
    const std::vector<int>& parent_content, int parent_row,
    int child_row) const {
  const std::vector<int>& child = rows_.row(child_row);
  std::vector<int> diff = row_xor(parent_content, child);
  int y = row_sum_col_[parent_row];
  int w_new;
  if (y >= 0) {
    w_new = static_cast<int>(toggle(std::move(diff), y).size());
  } else {
    w_new = static_cast<int>(diff.size()) + 1;
  }
  return static_cast<int>(child.size()) - w_new;
}

void CseOptimizer::apply_differential(int parent, int child,
                                      const std::vector<int>& parent_content) {
  std::vector<int> content = parent_content;  // copy before columns grow
  std::vector<int> old_child = rows_.row(child);
  int y = ensure_row_sum_column(parent);
  std::vector<int> new_child = toggle(row_xor(content, old_child), y);
  long long drop = static_cast<long long>(old_child.size()) -
                   static_cast<long long>(new_child.size());
  mutate_row(child, std::move(new_child));
  edges_[parent].insert(child);
  history_.push_back(
      {StepInfo::kDifferential, parent, child, drop});
  if (d_ready_) {
    // The applied direction is retired for good; the reverse direction is
    // left to the regular update below, which cycle-kills it only if it
    // would otherwise stay positive.
    set_d(parent, child, -1);
    k_.erase({parent, child});
    update_d_after_child_change(child, old_child);
  }
}

void CseOptimizer::set_d(int parent, int child, int value) {
  int old = d_[parent][child];
  if (old > 0) d_buckets_[old].erase({parent, child});
  if (old > 0 && d_buckets_[old].empty()) d_buckets_.erase(old);
  d_[parent][child] = value;
  if (value > 0) d_buckets_[value].insert({parent, child});
}

void CseOptimizer::begin_differential_phase() {
  if (options_.algorithm != CseAlgorithm::kFast) return;
  int n = rows_.n_rows();
  d_.assign(n, std::vector<int>(n, -1));
  d_buckets_.clear();
  k_.clear();
  for (int p = 0; p < n; ++p) {
    for (int c = 0; c < n; ++c) {
      if (p == c) continue;
      int s = std::max(0, exact_differential_saving(rows_.row(p), p, c));
      if (s > 0 && is_cycle_inducing(p, c)) continue;
      set_d(p, c, s);
    }
  }
  d_ready_ = true;
}

void CseOptimizer::update_d_after_child_change(
    int child, const std::vector<int>& old_child_content) {
  int n = rows_.n_rows();
  // One forward and one reverse reachability pass replace per-pair cycle
  // probes: edge (child -> i) cycles iff i reaches child; edge (i -> child)
  // cycles iff child reaches i.
  std::vector<char> reaches_child = reachable_set(child, /*reverse=*/true);
  std::vector<char> reached_from_child =
      reachable_set(child, /*reverse=*/false);
  for (int i = 0; i < n; ++i) {
    if (i == child) continue;
    // Pair (child, i): the changed row is the parent.  The incumbent saving
    // may refer to the previous content, which the snapshot store preserves.
    // Cycle probes are spent only on entries that would stay positive; a
    // zero entry is never selected, so its cycle status does not matter.
    if (d_[child][i] >= 0) {
      int fresh = std::max(
          0, exact_differential_saving(rows_.row(child), child, i));
      int incumbent = d_[child][i];
      if (std::max(fresh, incumbent) > 0 && reaches_child[i]) {
        set_d(child, i, -1);
        k_.erase({child, i});
      } else if (fresh > incumbent) {
        set_d(child, i, fresh);
        k_.erase({child, i});
      } else if (fresh < incumbent) {
        if (!k_.count({child, i})) k_[{child, i}] = old_child_content;
      } else if (rng_() & 1) {
        k_.erase({child, i});
      } else if (!k_.count({child, i})) {
        k_[{child, i}] = old_child_content;
      }
    }
    // Pair (i, child): the changed row is the child; recompute against both
    // the live parent row and any snapshot, keeping whichever wins.
    if (d_[i][child] >= 0) {
      int cur =
          std::max(0, exact_differential_saving(rows_.row(i), i, child));
      auto it = k_.find({i, child});
      int snap = it != k_.end()
                     ? std::max(0, exact_differential_saving(it->second, i,
                                                             child))
                     : -1;
      if (std::max(cur, snap) > 0 && reached_from_child[i]) {
        set_d(i, child, -1);
        k_.erase({i, child});
      } else if (it == k_.end()) {
        set_d(i, child, cur);
      } else if (snap < cur) {
        k_.erase(it);
        set_d(i, child, cur);
      } else if (snap > cur) {
        set_d(i, child, snap);
      } else {
        set_d(i, child, cur);
        if (rng_() & 1) k_.erase(it);
      }
    }
  }
}

std::vector<CseOptimizer::Candidate>
CseOptimizer::classic_differential_candidates() const {
  std::vector<Candidate> out;
  int n = rows_.n_rows();
  // Precompute, per row, which rows reach it; edge p -> c cycles iff c
  // reaches p.
  std::vector<std::vector<char>> reaches(n);
  for (int c = 0; c < n; ++c) reaches[c] = reachable_set(c, /*reverse=*/false);
  for (int p = 0; p < n; ++p) {
    for (int c = 0; c < n; ++c) {
      if (p == c || reaches[c][p]) continue;
      int s = exact_differential_saving(rows_.row(p), p, c);
      if (s > 0) out.push_back({s, p, c});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<CseOptimizer::Candidate> CseOptimizer::fast_differential_candidates()
    const {
  std::vector<Candidate> out;
  for (const auto& [saving, pairs] : d_buckets_) {
    for (const auto& [p, c] : pairs) {
      out.push_back({saving, p, c});
      if (static_cast<int>(out.size()) >= ld_) return out;
    }
  }
  return out;
}

bool CseOptimizer::differential_step() {
  if (options_.recurrence_only) return false;
  bool fast = options_.algorithm == CseAlgorithm::kFast;
  if (fast && !d_ready_) begin_differential_phase();
  for (;;) {
    std::vector<Candidate> cands = fast ? fast_differential_candidates()
                                        : classic_differential_candidates();
    if (cands.empty()) return false;
    int window = std::min<int>(ld_, static_cast<int>(cands.size()));
    const Candidate pick = cands[rng_() % window];
    if (fast) {
      // Array entries not touching the last changed row can go stale with
      // respect to cycles; re-check before committing.
      if (is_cycle_inducing(pick.a, pick.b)) {
        set_d(pick.a, pick.b, -1);
        k_.erase({pick.a, pick.b});
        continue;
      }
      auto it = k_.find({pick.a, pick.b});
      const std::vector<int>& content =
          it != k_.end() ? it->second : rows_.row(pick.a);
      apply_differential(pick.a, pick.b, content);
    } else {
      apply_differential(pick.a, pick.b, rows_.row(pick.a));
    }
    return true;
  }
}

// ---------------------------------------------------------------------------
// Recurrence transforms.

void CseOptimizer::registry_add(const std::vector<int>& cols, int delta) {
  int w = static_cast<int>(cols.size());
  for (int i = 0; i < w; ++i) {
    for (int j = i + 1; j < w; ++j) {
      std::pair<int, int> key{cols[i], cols[j]};
      auto it = pair_freq_.find(key);
      int old = it == pair_freq_.end() ? 0 : it->second;
      int now = old + delta;
      if (old >= 2) {
        freq_buckets_[old].erase(key);
        if (freq_buckets_[old].empty()) freq_buckets_.erase(old);
      }
      if (now <= 0) {
        if (it != pair_freq_.end()) pair_freq_.erase(it);
      } else {
        pair_freq_[key] = now;
        if (now >= 2) freq_buckets_[now].insert(key);
      }
    }
  }
}

void CseOptimizer::begin_recurrence_phase() {
  if (options_.algorithm != CseAlgorithm::kFast) return;
  pair_freq_.clear();
  freq_buckets_.clear();
  registry_ready_ = true;
  for (int r = 0; r < rows_.n_rows(); ++r) {
    registry_add(rows_.row(r), +1);
  }
}

std::map<std::pair<int, int>, int> CseOptimizer::scan_pair_frequencies()
    const {
  std::map<std::pair<int, int>, int> freq;
  for (int r = 0; r < rows_.n_rows(); ++r) {
    const std::vector<int>& row = rows_.row(r);
    int w = static_cast<int>(row.size());
    for (int i = 0; i < w; ++i) {
      for (int j = i + 1; j < w; ++j) ++freq[{row[i], row[j]}];
    }
  }
  return freq;
}

std::vector<CseOptimizer::Candidate> CseOptimizer::recurrence_candidates()
    const {
  std::vector<Candidate> out;
  if (registry_ready_) {
    for (const auto& [freq, pairs] : freq_buckets_) {
      for (const auto& [a, b] : pairs) {
        out.push_back({freq - 1, a, b});
        if (static_cast<int>(out.size()) >= lr_) return out;
      }
    }
    return out;
  }
  for (const auto& [key, freq] : scan_pair_frequencies()) {
    if (freq >= 2) out.push_back({freq - 1, key.first, key.second});
  }
  std::sort(out.begin(), out.end());
  return out;
}

void CseOptimizer::apply_recurrence(int a, int b) {
  int col;
  auto it = pattern_col_.find({a, b});
  if (it != pattern_col_.end()) {
    col = it->second;
  } else {
    OptimizerColumn column;
    column.kind = ColumnKind::kPattern;
    column.operands = {a, b};
    col = append_column(std::move(column));
    pattern_col_[{a, b}] = col;
    patterns_.push_back({a, b, col});
  }
  std::vector<int> full_rows;
  for (int r = 0; r < rows_.n_rows(); ++r) {
    const std::vector<int>& row = rows_.row(r);
    if (contains(row, a) && contains(row, b)) full_rows.push_back(r);
  }
  long long drop = 0;
  for (int r : full_rows) {
    std::vector<int> now = rows_.row(r);
    now.erase(std::remove(now.begin(), now.end(), a), now.end());
    now.erase(std::remove(now.begin(), now.end(), b), now.end());
    now = toggle(std::move(now), col);
    drop += static_cast<long long>(rows_.row(r).size()) -
            static_cast<long long>(now.size());
    mutate_row(r, std::move(now));
  }
  history_.push_back({StepInfo::kRecurrence, a, b, drop});
  // Forced pass: rows holding exactly one operand may shrink once chained
  // pattern collapses are taken into account.
  for (int r = 0; r < rows_.n_rows(); ++r) {
    const std::vector<int>& row = rows_.row(r);
    if (contains(row, a) != contains(row, b)) {
      force_pattern(r, a, b, col);
    }
  }
}

bool CseOptimizer::force_pattern(int row, int a, int b, int pattern_col) {
  const std::vector<int>& original = rows_.row(row);
  int present = contains(original, a) ? a : b;
  int other = present == a ? b : a;
  std::vector<int> tentative = original;
  tentative.erase(std::remove(tentative.begin(), tentative.end(), present),
                  tentative.end());
  std::vector<int> inserted;
  tentative = toggle(std::move(tentative), other);
  inserted.push_back(other);
  bool pattern_added = !contains(tentative, pattern_col);
  tentative = toggle(std::move(tentative), pattern_col);
  if (pattern_added) inserted.push_back(pattern_col);
  // Chain: collapse known patterns touching any just-inserted summand,
  // newest pattern first, following whatever the collapse inserts in turn.
  while (!inserted.empty()) {
    int s = inserted.back();
    inserted.pop_back();
    if (!contains(tentative, s)) continue;
    for (int idx = static_cast<int>(patterns_.size()) - 1; idx >= 0; --idx) {
      const PatternEntry& entry = patterns_[idx];
      if (entry.a != s && entry.b != s) continue;
      int partner = entry.a == s ? entry.b : entry.a;
      if (!contains(tentative, partner)) continue;
      tentative.erase(
          std::remove(tentative.begin(), tentative.end(), entry.a),
          tentative.end());
      tentative.erase(
          std::remove(tentative.begin(), tentative.end(), entry.b),
          tentative.end());
      bool added = !contains(tentative, entry.col);
      tentative = toggle(std::move(tentative), entry.col);
      if (added) inserted.push_back(entry.col);
      break;  // s was consumed by the collapse
    }
  }
  if (tentative.size() >= original.size()) return false;
  long long drop = static_cast<long long>(original.size()) -
                   static_cast<long long>(tentative.size());
  if (!commit_row_with_edges(row, std::move(tentative))) return false;
  history_.push_back({StepInfo::kForced, a, b, drop});
  return true;
}

bool CseOptimizer::recurrence_step() {
  if (options_.algorithm == CseAlgorithm::kFast && !registry_ready_) {
    begin_recurrence_phase();
  }
  std::vector<Candidate> cands = recurrence_candidates();
  if (cands.empty() || cands.front().saving <= 0) return false;
  int window = std::min<int>(lr_, static_cast<int>(cands.size()));
  const Candidate pick = cands[rng_() % window];
  apply_recurrence(pick.a, pick.b);
  return true;
}

// ---------------------------------------------------------------------------
// Reversal transforms.

bool CseOptimizer::reversal_step() {
  int n = rows_.n_rows();
  for (int r = 0; r < n; ++r) {
    std::vector<int> row_r = rows_.row(r);
    for (int y : row_r) {
      if (columns_[y].kind != ColumnKind::kRowSum) continue;
      int i = columns_[y].source_row;
      std::vector<int> source = rows_.row(i);
      if (source.size() < 2) continue;
      for (int x : row_r) {
        if (x == y || !contains(source, x)) continue;
        // Row r uses both row i's output and row i's summand x; replace the
        // pair with the complement z = (row i) minus x, computed once.  The
        // user row may pick up dependencies on the rows feeding z; validate
        // those edges before mutating anything.
        std::set<int> z_deps;
        for (int c : source) {
          if (c == x) continue;
          for (int dep : column_row_dependencies(c)) z_deps.insert(dep);
        }
        std::set<int> before;
        for (int c : row_r) {
          for (int dep : column_row_dependencies(c)) before.insert(dep);
        }
        std::set<int> needed;
        for (int dep : z_deps) {
          if (!before.count(dep) && !edges_[dep].count(r)) needed.insert(dep);
        }
        bool feasible = true;
        if (!needed.empty()) {
          std::vector<char> reach = reachable_set(r, /*reverse=*/false);
          for (int dep : needed) {
            if (dep == r || reach[dep]) {
              feasible = false;
              break;
            }
          }
        }
        if (!feasible) continue;
        int z;
        if (source.size() == 2) {
          z = source[0] == x ? source[1] : source[0];
        } else {
          OptimizerColumn column;
          column.kind = ColumnKind::kSubexpr;
          for (int c : source) {
            if (c != x) column.operands.push_back(c);
          }
          z = append_column(std::move(column));
          // Splitting row i as x + z adds no row dependencies: z is built
          // from row i's own remaining summands.
          mutate_row(i, {x, z});
        }
        std::vector<int> user = row_r;
        user.erase(std::remove(user.begin(), user.end(), y), user.end());
        user.erase(std::remove(user.begin(), user.end(), x), user.end());
        user = toggle(std::move(user), z);
        for (int dep : needed) edges_[dep].insert(r);
        mutate_row(r, std::move(user));
        history_.push_back({StepInfo::kReversal, i, r, 1});
        return true;
      }
    }
  }
  return false;
}

std::optional<std::vector<int>> CseOptimizer::k_snapshot(int parent,
                                                         int child) const {
  auto it = k_.find({parent, child});
  if (it == k_.end()) return std::nullopt;
  return it->second;
}

int CseOptimizer::recurrence_saving(int a, int b) const {
  auto it = pair_freq_.find({std::min(a, b), std::max(a, b)});
  if (it == pair_freq_.end()) return 0;
  return std::max(0, it->second - 1);
}

}  // namespace cfft
