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

#include "cfft/schedule.h"

#include <random>
#include <stdexcept>

#include "cfft/cse.h"
#include "cfft/plan.h"
#include "doctest.h"

#ifndef CFFT_DATA_DIR
#error "CFFT_DATA_DIR must point at the shipped data directory"
#endif

namespace cfft {
namespace {

FormLibrary full_library() {
  FormLibrary lib = FormLibrary::builtins();
  lib.load_directory(std::string(CFFT_DATA_DIR) + "/forms");
  lib.compose_missing();
  return lib;
}

BinaryMatrix random_matrix(int rows, int cols, double density,
                           std::mt19937& rng) {
  BinaryMatrix m(rows, cols);
  std::bernoulli_distribution bit(density);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (bit(rng)) m.set(r, c);
  return m;
}

TEST_CASE("schedule_from_state: add count equals optimizer cost, matrix "
          "reproduced exactly") {
  std::mt19937 mrng(555);
  for (int trial = 0; trial < 10; ++trial) {
    BinaryMatrix m = random_matrix(6 + mrng() % 10, 6 + mrng() % 10,
                                   0.3 + 0.2 * (trial % 3), mrng);
    for (CseAlgorithm algorithm :
         {CseAlgorithm::kClassic, CseAlgorithm::kFast}) {
      CseOptions o;
      o.algorithm = algorithm;
      o.seed = trial;
      CseOptimizer cse(m, o);
      cse.run();
      Schedule s = schedule_from_state(cse);
      CHECK(s.validate().empty());
      CHECK(s.additions == cse.cost());
      CHECK(s.multiplications == 0);
      CHECK(static_cast<int>(s.steps.size()) == s.additions);
      CHECK(symbolic_matrix(s) == m);
    }
  }
}

TEST_CASE("degenerate all-zero rows map to the zero slot") {
  BinaryMatrix m = BinaryMatrix::from_rows(4, {{0, 1}, {}, {2, 3}});
  CseOptimizer cse(m, {});
  cse.run();
  Schedule s = schedule_from_state(cse);
  REQUIRE(s.validate().empty());
  CHECK(s.outputs[1] == -1);
  Field f(4);
  std::vector<fe_t> out = execute(s, f, {7, 9, 3, 14});
  CHECK(out[0] == (7 ^ 9));
  CHECK(out[1] == 0);
  CHECK(out[2] == (3 ^ 14));
  CHECK(symbolic_matrix(s) == m);
}

TEST_CASE("identity rows need no steps") {
  BinaryMatrix m = BinaryMatrix::identity(3);
  CseOptimizer cse(m, {});
  cse.run();
  Schedule s = schedule_from_state(cse);
  CHECK(s.additions == 0);
  CHECK(s.steps.empty());
  CHECK(s.outputs == std::vector<int>{0, 1, 2});
}

TEST_CASE("full plans verify against the transform oracle for every kind") {
  FormLibrary lib = full_library();
  for (int m : {2, 3, 4, 5}) {
    for (TransformKind kind : {TransformKind::kDcfft, TransformKind::kScfft,
                               TransformKind::kIcfft}) {
      CAPTURE(m);
      CfftPlan plan = build_plan(m, kind, lib);
      CseOptions o;
      o.seed = 11;
      CseOptimizer pre(plan.pre, o);
      pre.run();
      CseOptimizer post(plan.post, o);
      post.run();
      Schedule full =
          full_plan_schedule(plan, schedule_from_state(pre),
                             schedule_from_state(post));
      CHECK(full.validate().empty());
      CHECK(full.additions == pre.cost() + post.cost());
      CHECK(full.multiplications == plan.mult_count());
      CHECK(full.n_in == plan.n);
      CHECK(full.n_out() == plan.n);
      CHECK(verify_schedule(full, plan, 50, 77).empty());
      CHECK(schedule_total_complexity(full, plan.m) ==
            full.additions + (2 * plan.m - 1) * full.multiplications);
    }
  }
}

TEST_CASE("verify_schedule reports the first mismatching output") {
  FormLibrary lib = full_library();
  CfftPlan plan = build_plan(3, TransformKind::kDcfft, lib);
  CseOptimizer pre(plan.pre, {});
  pre.run();
  CseOptimizer post(plan.post, {});
  post.run();
  Schedule full = full_plan_schedule(plan, schedule_from_state(pre),
                                     schedule_from_state(post));
  REQUIRE(verify_schedule(full, plan).empty());
  // Swap two outputs: still a valid program, now semantically wrong.
  std::swap(full.outputs[1], full.outputs[2]);
  CHECK(!verify_schedule(full, plan).empty());
  std::swap(full.outputs[1], full.outputs[2]);
  // Damage one addition operand the same way.
  REQUIRE(!full.steps.empty());
  Schedule bad = full;
  for (ScheduleStep& step : bad.steps)
    if (step.op == ScheduleStep::Op::kAdd && step.src1 != 0) {
      step.src1 = 0;
      break;
    }
  CHECK(!verify_schedule(bad, plan).empty());
}

TEST_CASE("execute applies constants through the table") {
  // Two inputs, one addition, one multiplication by alpha.
  Schedule s;
  s.n_in = 2;
  s.constants = {2};  // alpha in GF(8)
  s.steps.push_back({ScheduleStep::Op::kAdd, 2, 0, 1, -1});
  s.steps.push_back({ScheduleStep::Op::kMul, 3, 2, 0, 0});
  s.outputs = {3};
  s.additions = 1;
  s.multiplications = 1;
  REQUIRE(s.validate().empty());
  Field f(3);
  std::vector<fe_t> out = execute(s, f, {3, 5});
  CHECK(out[0] == f.mul(2, 3 ^ 5));
  CHECK_THROWS_AS(symbolic_matrix(s), std::invalid_argument);
  CHECK(schedule_total_complexity(s, 3) == 1 + 5);
}

TEST_CASE("validate rejects malformed programs") {
  Schedule s;
  s.n_in = 2;
  s.steps.push_back({ScheduleStep::Op::kAdd, 3, 0, 1, -1});  // dest must be 2
  s.outputs = {0};
  s.additions = 1;
  CHECK(!s.validate().empty());

  Schedule t;
  t.n_in = 2;
  t.steps.push_back({ScheduleStep::Op::kAdd, 2, 0, 5, -1});  // operand unset
  t.outputs = {2};
  t.additions = 1;
  CHECK(!t.validate().empty());

  Schedule u;
  u.n_in = 2;
  u.steps.push_back({ScheduleStep::Op::kAdd, 2, 0, 1, -1});
  u.outputs = {2};
  u.additions = 2;  // count mismatch
  CHECK(!u.validate().empty());

  Schedule v;
  v.n_in = 2;
  v.outputs = {4};  // out-of-range slot
  CHECK(!v.validate().empty());
}

TEST_CASE("text emission round-trips") {
  FormLibrary lib = full_library();
  CfftPlan plan = build_plan(3, TransformKind::kScfft, lib);
  CseOptimizer pre(plan.pre, {});
  pre.run();
  CseOptimizer post(plan.post, {});
  post.run();
  Schedule full = full_plan_schedule(plan, schedule_from_state(pre),
                                     schedule_from_state(post));
  std::string text = emit_schedule(full);
  Schedule back = parse_schedule(text);
  CHECK(back.validate().empty());
  CHECK(back.n_in == full.n_in);
  CHECK(back.outputs == full.outputs);
  CHECK(back.additions == full.additions);
  CHECK(back.multiplications == full.multiplications);
  CHECK(back.constants == full.constants);
  REQUIRE(back.steps.size() == full.steps.size());
  for (size_t i = 0; i < back.steps.size(); ++i) {
    CHECK(back.steps[i].op == full.steps[i].op);
    CHECK(back.steps[i].dest == full.steps[i].dest);
    CHECK(back.steps[i].src1 == full.steps[i].src1);
  }
  CHECK(emit_schedule(back) == text);
  CHECK(verify_schedule(back, plan).empty());

  // The readable form names outputs inline and is not meant to be parsed.
  std::string pseudo = emit_schedule(full, ScheduleFormat::kPseudoCode);
  CHECK(pseudo.find("F0") != std::string::npos);
}

TEST_CASE("parse_schedule rejects malformed text") {
  CHECK_THROWS_AS(parse_schedule(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_schedule("schedule 2 1 1 0\nt5 = f0 + f1\nF0 = t0\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_schedule("schedule 2 1 1 0\nt0 = f0 + f9\nF0 = t0\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_schedule("schedule 2 1 2 0\nt0 = f0 + f1\nF0 = t0\n"),
                  std::invalid_argument);
}

}  // namespace
}  // namespace cfft
