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

#ifndef CFFT_SCHEDULE_H_
#define CFFT_SCHEDULE_H_

#include <string>
#include <string_view>
#include <vector>

#include "cfft/binary_matrix.h"
#include "cfft/gf2m.h"
#include "cfft/plan.h"

namespace cfft {

class CseOptimizer;

// One straight-line step.  Slots are numbered 0..n_in-1 for inputs, then one
// new slot per step in order (no register reuse; dest always equals
// n_in + step index).
struct ScheduleStep {
  enum class Op { kAdd, kMul };
  Op op = Op::kAdd;
  int dest = 0;
  int src1 = 0;
  int src2 = 0;       // kAdd only
  int constant = -1;  // kMul only: index into Schedule::constants
};

// A verified straight-line program: two-operand GF(2^m) additions plus
// constant multiplications, with named outputs.  The output slot -1 denotes
// the constant zero (a degenerate all-zero target row).
struct Schedule {
  int n_in = 0;
  std::vector<ScheduleStep> steps;
  std::vector<int> outputs;     // output index -> slot (or -1 for zero)
  std::vector<fe_t> constants;  // table referenced by MUL steps

  int additions = 0;
  int multiplications = 0;

  int n_out() const { return static_cast<int>(outputs.size()); }
  int slot_count() const { return n_in + static_cast<int>(steps.size()); }
  // Checks dest numbering, operand definition before use, count consistency.
  // Returns a description of the first violation, or empty if valid.
  std::string validate() const;
};

// Builds the straight-line program realizing the optimizer's final state:
// ready pattern/subexpression columns are emitted in creation order, then
// ready rows in index order (a prioritized topological sweep; columns can
// depend on row outputs through forced patterns and reversals).  The
// schedule's addition count equals optimizer.cost().
Schedule schedule_from_state(const CseOptimizer& optimizer);

// Glues optimized pre/post programs into the full pipeline
//   x -> gather -> pre -> constant products -> post -> scatter.
// `pre` must compute plan.pre and `post` plan.post (checked by slot counts
// only; use verify_schedule for semantic checks).  Multiplications by the
// constant 1 are skipped.
Schedule full_plan_schedule(const CfftPlan& plan, const Schedule& pre,
                            const Schedule& post);

// Runs the program over the field.
std::vector<fe_t> execute(const Schedule& schedule, const Field& field,
                          const std::vector<fe_t>& x);

// Symbolic execution over XOR-sets of input indices: returns the n_out x n_in
// matrix the program computes.  Throws std::invalid_argument if the schedule
// contains multiplications.
BinaryMatrix symbolic_matrix(const Schedule& schedule);

// additions + (2m - 1) * multiplications.
long long schedule_total_complexity(const Schedule& schedule, int m);

// Checks `schedule` against the plan's transform oracle: executing on all
// unit vectors plus `random_trials` random vectors must scatter to exactly
// naive_dft of the (kind-appropriate) argument.  Returns the first mismatch
// description, or empty if correct.
std::string verify_schedule(const Schedule& schedule, const CfftPlan& plan,
                            int random_trials = 200,
                            std::uint64_t seed = 0x5eed);

enum class ScheduleFormat { kText, kPseudoCode };

// kText round-trips through parse_schedule; kPseudoCode substitutes output
// names inline for readability.
std::string emit_schedule(const Schedule& schedule,
                          ScheduleFormat format = ScheduleFormat::kText);
// Parses the kText format.  Throws std::invalid_argument on malformed input.
Schedule parse_schedule(std::string_view text);

}  // namespace cfft

#endif  // CFFT_SCHEDULE_H_
