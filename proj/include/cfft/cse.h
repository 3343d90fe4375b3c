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

#ifndef CFFT_CSE_H_
#define CFFT_CSE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "cfft/binary_matrix.h"

namespace cfft {

// Addition-count minimizer for y = M x over GF(2)-linear combinations.
// Rows of M are outputs; columns are summands.  Three rewrite families:
//  - differential: rewrite row c as (row c xor row p) + the output of row p,
//    saving w_c - w_d - 1 additions (w_d the difference weight);
//  - recurrence: factor a two-summand pattern occurring in several rows into
//    a fresh summand, saving (frequency - 1), then force the pattern into
//    rows holding only half of it when chained collapses shrink them;
//  - reversal: when a row uses another row's output alongside one of that
//    row's own summands, split off the complementary subexpression, saving 1.

enum class CseAlgorithm {
  kClassic,  // exhaustive candidate scans each step
  kFast,     // incremental saving arrays; differentials fully precede
             // recurrences
};

enum class CseStrategy {
  kDifferentialFirst,  // exhaust differentials before each recurrence
  kGreedy,             // per step, apply whichever family saves more
};

struct CseOptions {
  CseAlgorithm algorithm = CseAlgorithm::kClassic;
  CseStrategy strategy = CseStrategy::kDifferentialFirst;
  // Skip differential transforms entirely (plain pattern CSE baseline).
  bool recurrence_only = false;
  // Candidate-window widths; one candidate is drawn uniformly from the
  // best ld (or lr) candidates.  0 selects the default: 2 when both matrix
  // dimensions are at most 63, 1 otherwise.
  int ld = 0;
  int lr = 0;
  std::uint64_t seed = 0;
};

enum class ColumnKind {
  kInput,    // an original summand; free
  kRowSum,   // the output value of a row; free (already computed)
  kPattern,  // XOR of two earlier columns; costs 1 addition
  kSubexpr,  // XOR of several earlier columns; costs arity - 1 additions
};

struct OptimizerColumn {
  ColumnKind kind = ColumnKind::kInput;
  std::vector<int> operands;  // column ids (kPattern, kSubexpr)
  int source_row = -1;        // row id (kRowSum)

  int add_cost() const {
    switch (kind) {
      case ColumnKind::kPattern:
        return 1;
      case ColumnKind::kSubexpr:
        return static_cast<int>(operands.size()) - 1;
      default:
        return 0;
    }
  }
};

// The plain differential-saving formula max(0, w_c - |child xor parent| - 1)
// on explicit rows.  The engine refines this when the parent's output column
// already occurs in the child (the insertion then cancels instead of adding).
int differential_saving(const std::vector<int>& parent,
                        const std::vector<int>& child);

class CseOptimizer {
 public:
  explicit CseOptimizer(BinaryMatrix matrix, CseOptions options = {});

  // Runs the configured pipeline to a fixed point.
  void run();

  // Granular phase control; run() composes exactly these.
  void begin_differential_phase();  // fast mode: fills the saving array
  bool differential_step();         // false when no positive saving remains
  void begin_recurrence_phase();    // fast mode: fills the frequency registry
  bool recurrence_step();           // one factor + forced-pattern pass
  bool reversal_step();

  // Reachability-pruned addition count: per-row (weight - 1) plus the build
  // cost of every column still referenced (directly or through operands).
  long long cost() const;

  const BinaryMatrix& matrix() const { return rows_; }
  const std::vector<OptimizerColumn>& columns() const { return columns_; }
  int original_columns() const { return original_cols_; }
  // Column id of a row's output summand, or -1 if never materialized.
  int row_sum_column(int row) const { return row_sum_col_[row]; }

  // True iff adding the edge parent -> child would close a dependency cycle.
  bool is_cycle_inducing(int parent, int child) const;
  bool dependency_graph_acyclic() const;
  const std::vector<std::set<int>>& dependency_edges() const { return edges_; }

  // Saving-array introspection (fast mode; valid after the matching begin_*).
  const std::vector<std::vector<int>>& d_array() const { return d_; }
  std::optional<std::vector<int>> k_snapshot(int parent, int child) const;
  // Registry saving (frequency - 1, floored at 0) for a summand pair.
  int recurrence_saving(int a, int b) const;

  struct StepInfo {
    enum Kind { kDifferential, kRecurrence, kForced, kReversal } kind;
    int a = 0;  // parent row / pattern operand a / reversal source row
    int b = 0;  // child row / pattern operand b / reversal user row
    long long weight_drop = 0;
  };
  const std::vector<StepInfo>& history() const { return history_; }

 private:
  struct Candidate {
    int saving = 0;
    int a = 0;
    int b = 0;
    bool operator<(const Candidate& other) const {
      if (saving != other.saving) return saving > other.saving;
      if (a != other.a) return a < other.a;
      return b < other.b;
    }
  };

  int default_window() const;
  int append_column(OptimizerColumn column);
  int ensure_row_sum_column(int row);
  void mutate_row(int row, std::vector<int> cols);
  std::vector<char> reachable_set(int start, bool reverse) const;

  int exact_differential_saving(const std::vector<int>& parent_content,
                                int parent_row, int child_row) const;
  void apply_differential(int parent, int child,
                          const std::vector<int>& parent_content);
  void set_d(int parent, int child, int value);
  void update_d_after_child_change(int child,
                                   const std::vector<int>& old_child_content);
  std::vector<Candidate> classic_differential_candidates() const;
  std::vector<Candidate> fast_differential_candidates() const;

  std::map<std::pair<int, int>, int> scan_pair_frequencies() const;
  std::vector<Candidate> recurrence_candidates() const;
  void apply_recurrence(int a, int b);
  bool force_pattern(int row, int a, int b, int pattern_col);
  void registry_add(const std::vector<int>& cols, int delta);

  std::set<int> column_row_dependencies(int col) const;
  bool commit_row_with_edges(int row, std::vector<int> new_cols);

  BinaryMatrix rows_;
  int original_cols_ = 0;
  CseOptions options_;
  int ld_ = 1;
  int lr_ = 1;
  std::mt19937_64 rng_;

  std::vector<OptimizerColumn> columns_;
  std::vector<int> row_sum_col_;         // row -> column id or -1
  std::vector<std::set<int>> edges_;     // parent row -> child rows
  std::vector<StepInfo> history_;

  // Pattern registry: creation-ordered (a, b, column) triples plus lookup.
  struct PatternEntry {
    int a = 0;
    int b = 0;
    int col = 0;
  };
  std::vector<PatternEntry> patterns_;
  std::map<std::pair<int, int>, int> pattern_col_;

  // Fast-mode differential arrays.
  bool d_ready_ = false;
  std::vector<std::vector<int>> d_;
  std::map<int, std::set<std::pair<int, int>>, std::greater<int>> d_buckets_;
  std::map<std::pair<int, int>, std::vector<int>> k_;

  // Fast-mode recurrence registry.
  bool registry_ready_ = false;
  std::map<std::pair<int, int>, int> pair_freq_;
  std::map<int, std::set<std::pair<int, int>>, std::greater<int>>
      freq_buckets_;
};

}  // namespace cfft

#endif  // CFFT_CSE_H_
