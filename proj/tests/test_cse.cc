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
#include <random>

#include "cfft/plan.h"
#include "doctest.h"

#ifndef CFFT_DATA_DIR
#error "CFFT_DATA_DIR must point at the shipped data directory"
#endif

namespace cfft {
namespace {

// The 4x5 reference instance used throughout: 12 direct additions.
BinaryMatrix example_matrix() {
  return BinaryMatrix::from_rows(
      5, {{0, 2, 3, 4}, {0, 1, 2, 3, 4}, {0, 1, 3, 4}, {1, 2, 3}});
}

FormLibrary full_library() {
  FormLibrary lib = FormLibrary::builtins();
  lib.load_directory(std::string(CFFT_DATA_DIR) + "/forms");
  lib.compose_missing();
  return lib;
}

// Independent correctness check: expand every column to a mask over the
// original inputs (row-sum columns expand to the original row, whose value
// all transforms preserve), then compare each row's XOR against the original.
void check_equivalent(const BinaryMatrix& original, const CseOptimizer& cse) {
  const std::vector<OptimizerColumn>& cols = cse.columns();
  std::vector<std::vector<int>> mask(cols.size());
  for (size_t i = 0; i < cols.size(); ++i) {
    switch (cols[i].kind) {
      case ColumnKind::kInput:
        mask[i] = {static_cast<int>(i)};
        break;
      case ColumnKind::kRowSum:
        mask[i] = original.row(cols[i].source_row);
        break;
      case ColumnKind::kPattern:
      case ColumnKind::kSubexpr:
        for (int op : cols[i].operands) mask[i] = row_xor(mask[i], mask[op]);
        break;
    }
  }
  for (int r = 0; r < original.n_rows(); ++r) {
    std::vector<int> acc;
    for (int col : cse.matrix().row(r)) acc = row_xor(acc, mask[col]);
    CHECK(acc == original.row(r));
  }
}

TEST_CASE("differential saving formula") {
  CHECK(differential_saving({0, 2, 3, 4}, {0, 1, 2, 3, 4}) == 3);
  CHECK(differential_saving({0, 1, 2, 3, 4}, {0, 1, 3, 4}) == 2);
  CHECK(differential_saving({1, 2, 3}, {0, 2, 3, 4}) == 0);
  CHECK(differential_saving({0, 1}, {2, 3}) == 0);  // clamped, never negative
  CHECK(differential_saving({}, {0, 1}) == 0);
}

TEST_CASE("reference instance: full fast-mode trace") {
  CseOptions o;
  o.algorithm = CseAlgorithm::kFast;
  o.ld = 2;
  o.lr = 2;
  o.seed = 1;  // draws the documented choices from the candidate windows
  CseOptimizer cse(example_matrix(), o);

  cse.begin_differential_phase();
  CHECK(cse.matrix().weight() == 16);
  CHECK(cse.d_array() ==
        std::vector<std::vector<int>>{{-1, 3, 1, 0},
                                      {2, -1, 2, 0},
                                      {1, 3, -1, 0},
                                      {0, 2, 0, -1}});

  // Rewrite row 1 through row 0: the remainder is X1 plus row 0's output.
  REQUIRE(cse.differential_step());
  REQUIRE(cse.history().size() == 1);
  CHECK(cse.history()[0].kind == CseOptimizer::StepInfo::kDifferential);
  CHECK(cse.history()[0].a == 0);
  CHECK(cse.history()[0].b == 1);
  CHECK(cse.matrix().rows() ==
        std::vector<std::vector<int>>{
            {0, 2, 3, 4}, {1, 5}, {0, 1, 3, 4}, {1, 2, 3}});
  CHECK(cse.matrix().weight() == 13);
  CHECK(cse.columns()[5].kind == ColumnKind::kRowSum);
  CHECK(cse.columns()[5].source_row == 0);
  // The reverse edge would close a cycle, so its saving is pinned at -1;
  // rewriting row 2 through row 1 stays worth 2 via the snapshot of row 1's
  // pre-transform content.
  CHECK(cse.is_cycle_inducing(1, 0));
  CHECK(cse.d_array() ==
        std::vector<std::vector<int>>{{-1, -1, 1, 0},
                                      {-1, -1, 2, 0},
                                      {1, 0, -1, 0},
                                      {0, 0, 0, -1}});
  CHECK(cse.k_snapshot(1, 2) == std::vector<int>{0, 1, 2, 3, 4});

  REQUIRE(cse.differential_step());
  CHECK(cse.history()[1].a == 1);
  CHECK(cse.history()[1].b == 2);
  CHECK(cse.matrix().rows() ==
        std::vector<std::vector<int>>{{0, 2, 3, 4}, {1, 5}, {2, 6}, {1, 2, 3}});
  CHECK(cse.matrix().weight() == 11);
  CHECK(cse.columns()[6].kind == ColumnKind::kRowSum);
  CHECK(cse.columns()[6].source_row == 1);
  CHECK(cse.is_cycle_inducing(2, 0));
  CHECK(cse.d_array() ==
        std::vector<std::vector<int>>{{-1, -1, 0, 0},
                                      {-1, -1, -1, 0},
                                      {-1, 0, -1, 0},
                                      {0, 0, 0, -1}});

  // No positive differential saving is left.
  CHECK_FALSE(cse.differential_step());

  // Exactly one two-summand pattern repeats: X2 + X3 in rows 0 and 3.
  cse.begin_recurrence_phase();
  CHECK(cse.recurrence_saving(2, 3) == 1);
  int positive = 0;
  for (int a = 0; a < 7; ++a)
    for (int b = a + 1; b < 7; ++b) positive += cse.recurrence_saving(a, b) > 0;
  CHECK(positive == 1);

  REQUIRE(cse.recurrence_step());
  CHECK(cse.matrix().rows() ==
        std::vector<std::vector<int>>{{0, 4, 7}, {1, 5}, {2, 6}, {1, 7}});
  CHECK(cse.columns()[7].kind == ColumnKind::kPattern);
  CHECK(cse.columns()[7].operands == std::vector<int>{2, 3});

  CHECK_FALSE(cse.recurrence_step());
  CHECK_FALSE(cse.reversal_step());

  // Five additions for the remaining rows plus one for the pattern.
  CHECK(cse.cost() == 6);
  CHECK(cse.dependency_graph_acyclic());
  check_equivalent(example_matrix(), cse);
}

TEST_CASE("reference instance: both algorithms reach six additions") {
  for (CseAlgorithm algorithm : {CseAlgorithm::kClassic, CseAlgorithm::kFast}) {
    long long best = 1 << 20;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      CseOptions o;
      o.algorithm = algorithm;
      o.ld = 2;
      o.lr = 2;
      o.seed = seed;
      CseOptimizer cse(example_matrix(), o);
      cse.run();
      best = std::min(best, cse.cost());
      check_equivalent(example_matrix(), cse);
    }
    CHECK(best == 6);
  }
}

TEST_CASE("reference instance: recurrence-only settles at seven additions") {
  for (CseAlgorithm algorithm : {CseAlgorithm::kClassic, CseAlgorithm::kFast})
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      CseOptions o;
      o.algorithm = algorithm;
      o.recurrence_only = true;
      o.seed = seed;
      CseOptimizer cse(example_matrix(), o);
      cse.run();
      CHECK(cse.cost() == 7);
      for (const auto& step : cse.history())
        CHECK(step.kind != CseOptimizer::StepInfo::kDifferential);
      check_equivalent(example_matrix(), cse);
    }
}

TEST_CASE("random matrices: equivalence, cost bound, determinism") {
  std::mt19937 mrng(4242);
  for (int trial = 0; trial < 12; ++trial) {
    int n_rows = 4 + mrng() % 12;
    int n_cols = 4 + mrng() % 12;
    double density = 0.25 + 0.25 * (trial % 3);
    BinaryMatrix m(n_rows, n_cols);
    std::bernoulli_distribution bit(density);
    for (int r = 0; r < n_rows; ++r)
      for (int c = 0; c < n_cols; ++c)
        if (bit(mrng)) m.set(r, c);

    for (CseAlgorithm algorithm :
         {CseAlgorithm::kClassic, CseAlgorithm::kFast}) {
      CseOptions o;
      o.algorithm = algorithm;
      o.seed = trial;
      CseOptimizer cse(m, o);
      cse.run();
      CHECK(cse.cost() <= m.direct_add_count());
      CHECK(cse.dependency_graph_acyclic());
      check_equivalent(m, cse);

      // Same seed, same result; the history replays identically.
      CseOptimizer again(m, o);
      again.run();
      CHECK(again.cost() == cse.cost());
      CHECK(again.history().size() == cse.history().size());
      CHECK(again.matrix() == cse.matrix());
    }
  }
}

TEST_CASE("greedy strategy is valid and deterministic") {
  BinaryMatrix m = example_matrix();
  CseOptions o;
  o.strategy = CseStrategy::kGreedy;
  o.seed = 3;
  CseOptimizer cse(m, o);
  cse.run();
  CHECK(cse.cost() <= m.direct_add_count());
  check_equivalent(m, cse);
}

TEST_CASE("length-7 evaluation matrices reach the frozen best counts") {
  FormLibrary lib = full_library();
  CfftPlan plan = build_plan(3, TransformKind::kDcfft, lib);
  long long best_pre = 1 << 20, best_post = 1 << 20;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    CseOptions o;
    o.ld = 3;
    o.lr = 3;
    o.seed = seed;
    CseOptimizer pre(plan.pre, o);
    pre.run();
    best_pre = std::min(best_pre, pre.cost());
    CseOptimizer post(plan.post, o);
    post.run();
    best_post = std::min(best_post, post.cost());
  }
  CHECK(best_pre == 8);
  CHECK(best_post == 17);
}

TEST_CASE("all four transform families fire on a large instance") {
  FormLibrary lib = full_library();
  CfftPlan plan = build_plan(5, TransformKind::kDcfft, lib);
  for (CseAlgorithm algorithm : {CseAlgorithm::kClassic, CseAlgorithm::kFast}) {
    bool seen[4] = {false, false, false, false};
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      CseOptions o;
      o.algorithm = algorithm;
      o.seed = seed;
      CseOptimizer cse(plan.post, o);
      cse.run();
      for (const auto& step : cse.history()) seen[step.kind] = true;
      check_equivalent(plan.post, cse);
    }
    CHECK(seen[CseOptimizer::StepInfo::kDifferential]);
    CHECK(seen[CseOptimizer::StepInfo::kRecurrence]);
    CHECK(seen[CseOptimizer::StepInfo::kForced]);
    CHECK(seen[CseOptimizer::StepInfo::kReversal]);
  }
}

}  // namespace
}  // namespace cfft
