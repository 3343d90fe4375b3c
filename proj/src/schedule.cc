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

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "cfft/cse.h"

namespace cfft {

namespace {

std::string slot_name(int slot, int n_in) {
  if (slot < 0) return "0";
  if (slot < n_in) return "f" + std::to_string(slot);
  return "t" + std::to_string(slot - n_in);
}

}  // namespace

std::string Schedule::validate() const {
  int adds = 0, muls = 0;
  for (int i = 0; i < static_cast<int>(steps.size()); ++i) {
    const ScheduleStep& s = steps[i];
    int dest = n_in + i;
    if (s.dest != dest)
      return "step " + std::to_string(i) + ": dest " + std::to_string(s.dest) +
             " != slot " + std::to_string(dest);
    if (s.src1 < 0 || s.src1 >= dest)
      return "step " + std::to_string(i) + ": src1 undefined";
    if (s.op == ScheduleStep::Op::kAdd) {
      if (s.src2 < 0 || s.src2 >= dest)
        return "step " + std::to_string(i) + ": src2 undefined";
      ++adds;
    } else {
      if (s.constant < 0 || s.constant >= static_cast<int>(constants.size()))
        return "step " + std::to_string(i) + ": constant index out of range";
      ++muls;
    }
  }
  if (adds != additions || muls != multiplications)
    return "counts " + std::to_string(additions) + "+" +
           std::to_string(multiplications) + " do not match step list " +
           std::to_string(adds) + "+" + std::to_string(muls);
  for (int out : outputs)
    if (out < -1 || out >= slot_count())
      return "output slot " + std::to_string(out) + " out of range";
  return "";
}

Schedule schedule_from_state(const CseOptimizer& optimizer) {
  const BinaryMatrix& m = optimizer.matrix();
  const std::vector<OptimizerColumn>& cols = optimizer.columns();
  int n_rows = m.n_rows();
  int n_cols = static_cast<int>(cols.size());
  int n_in = optimizer.original_columns();

  // Reachable columns: those in final rows, closed over operands.
  std::vector<char> reachable(n_cols, 0);
  std::vector<int> stack;
  for (int r = 0; r < n_rows; ++r)
    for (int c : m.row(r))
      if (!reachable[c]) {
        reachable[c] = 1;
        stack.push_back(c);
      }
  while (!stack.empty()) {
    int c = stack.back();
    stack.pop_back();
    for (int o : cols[c].operands)
      if (!reachable[o]) {
        reachable[o] = 1;
        stack.push_back(o);
      }
  }

  // Units: column c -> unit c; row r -> unit n_cols + r.  Dependency counts
  // for a prioritized Kahn sweep (ready columns in creation order first,
  // then ready rows in index order).
  auto unit_deps = [&](int unit) {
    std::vector<int> deps;
    if (unit < n_cols) {
      const OptimizerColumn& col = cols[unit];
      if (col.kind == ColumnKind::kRowSum) {
        deps.push_back(n_cols + col.source_row);
      } else {
        for (int o : col.operands)
          if (cols[o].kind != ColumnKind::kInput) deps.push_back(o);
      }
    } else {
      for (int c : m.row(unit - n_cols))
        if (cols[c].kind != ColumnKind::kInput) deps.push_back(c);
    }
    return deps;
  };

  int total_units = n_cols + n_rows;
  std::vector<int> pending(total_units, 0);
  std::vector<std::vector<int>> dependents(total_units);
  std::vector<char> active(total_units, 0);
  for (int u = 0; u < total_units; ++u) {
    if (u < n_cols && (!reachable[u] || cols[u].kind == ColumnKind::kInput))
      continue;
    active[u] = 1;
    for (int d : unit_deps(u)) {
      ++pending[u];
      dependents[d].push_back(u);
    }
  }

  std::set<int> ready_cols, ready_rows;
  for (int u = 0; u < total_units; ++u)
    if (active[u] && pending[u] == 0)
      (u < n_cols ? ready_cols : ready_rows).insert(u);

  Schedule out;
  out.n_in = n_in;
  out.outputs.assign(n_rows, -1);
  std::vector<int> col_slot(n_cols, -1), row_slot(n_rows, -1);
  for (int c = 0; c < n_in && c < n_cols; ++c) col_slot[c] = c;

  auto operand_slot = [&](int c) {
    if (cols[c].kind == ColumnKind::kRowSum) return row_slot[cols[c].source_row];
    return col_slot[c];
  };
  auto push_add = [&](int a, int b) {
    ScheduleStep s;
    s.op = ScheduleStep::Op::kAdd;
    s.src1 = a;
    s.src2 = b;
    s.dest = out.slot_count();
    out.steps.push_back(s);
    ++out.additions;
    return s.dest;
  };

  int processed = 0;
  while (!ready_cols.empty() || !ready_rows.empty()) {
    int unit;
    if (!ready_cols.empty()) {
      unit = *ready_cols.begin();
      ready_cols.erase(ready_cols.begin());
      const OptimizerColumn& col = cols[unit];
      if (col.kind == ColumnKind::kRowSum) {
        col_slot[unit] = row_slot[col.source_row];
      } else {
        int acc = operand_slot(col.operands[0]);
        for (size_t i = 1; i < col.operands.size(); ++i)
          acc = push_add(acc, operand_slot(col.operands[i]));
        col_slot[unit] = acc;
      }
    } else {
      unit = *ready_rows.begin();
      ready_rows.erase(ready_rows.begin());
      int r = unit - n_cols;
      const std::vector<int>& content = m.row(r);
      if (content.empty()) {
        row_slot[r] = -1;
      } else {
        int acc = operand_slot(content[0]);
        for (size_t i = 1; i < content.size(); ++i)
          acc = push_add(acc, operand_slot(content[i]));
        row_slot[r] = acc;
      }
    }
    ++processed;
    for (int d : dependents[unit])
      if (--pending[d] == 0) (d < n_cols ? ready_cols : ready_rows).insert(d);
  }

  int active_total = 0;
  for (int u = 0; u < total_units; ++u) active_total += active[u];
  if (processed != active_total)
    throw std::logic_error("schedule_from_state: cyclic dependency");

  for (int r = 0; r < n_rows; ++r) out.outputs[r] = row_slot[r];
  return out;
}

Schedule full_plan_schedule(const CfftPlan& plan, const Schedule& pre,
                            const Schedule& post) {
  if (pre.n_in != plan.n || pre.n_out() != plan.t || post.n_in != plan.t ||
      post.n_out() != plan.n)
    throw std::invalid_argument("full_plan_schedule: dimension mismatch");
  if (pre.multiplications != 0 || post.multiplications != 0)
    throw std::invalid_argument(
        "full_plan_schedule: pre/post must be addition-only");

  Schedule out;
  out.n_in = plan.n;
  out.outputs.assign(plan.n, -1);
  std::map<fe_t, int> constant_index;

  // Pre program: its input slot i reads x[input_map[i]].
  std::vector<int> pre_map(pre.slot_count(), -1);
  for (int i = 0; i < pre.n_in; ++i) pre_map[i] = plan.input_map[i];
  for (size_t i = 0; i < pre.steps.size(); ++i) {
    const ScheduleStep& s = pre.steps[i];
    ScheduleStep ns = s;
    ns.src1 = pre_map[s.src1];
    ns.src2 = pre_map[s.src2];
    ns.dest = out.slot_count();
    pre_map[s.dest] = ns.dest;
    out.steps.push_back(ns);
    ++out.additions;
  }

  // Constant products; multiplication by 1 is a wire.
  std::vector<int> product_slot(plan.t, -1);
  for (int p = 0; p < plan.t; ++p) {
    int src = pre_map[pre.outputs[p]];
    fe_t c = plan.constants[p];
    if (c == 1) {
      product_slot[p] = src;
      continue;
    }
    auto [it, inserted] =
        constant_index.try_emplace(c, static_cast<int>(out.constants.size()));
    if (inserted) out.constants.push_back(c);
    ScheduleStep ns;
    ns.op = ScheduleStep::Op::kMul;
    ns.src1 = src;
    ns.constant = it->second;
    ns.dest = out.slot_count();
    product_slot[p] = ns.dest;
    out.steps.push_back(ns);
    ++out.multiplications;
  }

  // Post program on the product slots.
  std::vector<int> post_map(post.slot_count(), -1);
  for (int i = 0; i < post.n_in; ++i) post_map[i] = product_slot[i];
  for (size_t i = 0; i < post.steps.size(); ++i) {
    const ScheduleStep& s = post.steps[i];
    ScheduleStep ns = s;
    ns.src1 = post_map[s.src1];
    ns.src2 = post_map[s.src2];
    ns.dest = out.slot_count();
    post_map[s.dest] = ns.dest;
    out.steps.push_back(ns);
    ++out.additions;
  }
  for (int p = 0; p < plan.n; ++p) {
    int slot = post.outputs[p];
    out.outputs[plan.output_map[p]] = slot < 0 ? -1 : post_map[slot];
  }
  return out;
}

std::vector<fe_t> execute(const Schedule& schedule, const Field& field,
                          const std::vector<fe_t>& x) {
  if (static_cast<int>(x.size()) != schedule.n_in)
    throw std::invalid_argument("execute: input size mismatch");
  std::vector<fe_t> slots(x);
  slots.reserve(schedule.slot_count());
  for (const ScheduleStep& s : schedule.steps) {
    if (s.op == ScheduleStep::Op::kAdd)
      slots.push_back(field.add(slots[s.src1], slots[s.src2]));
    else
      slots.push_back(field.mul(schedule.constants[s.constant], slots[s.src1]));
  }
  std::vector<fe_t> out;
  out.reserve(schedule.outputs.size());
  for (int slot : schedule.outputs) out.push_back(slot < 0 ? 0 : slots[slot]);
  return out;
}

BinaryMatrix symbolic_matrix(const Schedule& schedule) {
  std::vector<std::vector<int>> slots;
  slots.reserve(schedule.slot_count());
  for (int i = 0; i < schedule.n_in; ++i) slots.push_back({i});
  for (const ScheduleStep& s : schedule.steps) {
    if (s.op != ScheduleStep::Op::kAdd)
      throw std::invalid_argument(
          "symbolic_matrix: schedule contains multiplications");
    slots.push_back(row_xor(slots[s.src1], slots[s.src2]));
  }
  std::vector<std::vector<int>> rows;
  rows.reserve(schedule.outputs.size());
  for (int slot : schedule.outputs)
    rows.push_back(slot < 0 ? std::vector<int>{} : slots[slot]);
  return BinaryMatrix::from_rows(schedule.n_in, std::move(rows));
}

long long schedule_total_complexity(const Schedule& schedule, int m) {
  return total_complexity(m, schedule.additions, schedule.multiplications);
}

std::string verify_schedule(const Schedule& schedule, const CfftPlan& plan,
                            int random_trials, std::uint64_t seed) {
  if (schedule.n_in != plan.n || schedule.n_out() != plan.n)
    return "dimension mismatch: schedule is " + std::to_string(schedule.n_in) +
           " -> " + std::to_string(schedule.n_out()) + ", plan needs " +
           std::to_string(plan.n);
  const Field& field = plan.field;
  // Unit vectors against the closed form naive_dft(e_i)[j] = alpha^(i j).
  for (int i = 0; i < plan.n; ++i) {
    std::vector<fe_t> e(plan.n, 0);
    e[i] = 1;
    std::vector<fe_t> got = execute(schedule, field, e);
    for (int j = 0; j < plan.n; ++j) {
      fe_t want = field.alpha_pow(static_cast<long long>(i) * j);
      if (got[j] != want)
        return "unit vector e_" + std::to_string(i) + ": output " +
               std::to_string(j) + " = " + std::to_string(got[j]) +
               ", expected " + std::to_string(want);
    }
  }
  std::mt19937_64 rng(seed);
  for (int trial = 0; trial < random_trials; ++trial) {
    std::vector<fe_t> x(plan.n);
    for (fe_t& v : x) v = static_cast<fe_t>(rng() % (plan.n + 1));
    std::vector<fe_t> want = naive_dft(field, x);
    std::vector<fe_t> got = execute(schedule, field, x);
    for (int j = 0; j < plan.n; ++j)
      if (got[j] != want[j])
        return "random trial " + std::to_string(trial) + ": output " +
               std::to_string(j) + " = " + std::to_string(got[j]) +
               ", expected " + std::to_string(want[j]);
  }
  return "";
}

std::string emit_schedule(const Schedule& schedule, ScheduleFormat format) {
  // In pseudo-code, a slot that is some output's value prints as that output.
  std::vector<std::string> alias(schedule.slot_count());
  if (format == ScheduleFormat::kPseudoCode)
    for (int j = 0; j < schedule.n_out(); ++j) {
      int slot = schedule.outputs[j];
      if (slot >= 0 && alias[slot].empty())
        alias[slot] = "F" + std::to_string(j);
    }
  auto name = [&](int slot) {
    if (slot >= 0 && !alias[slot].empty()) return alias[slot];
    return slot_name(slot, schedule.n_in);
  };

  std::ostringstream os;
  os << "schedule " << schedule.n_in << " " << schedule.n_out() << " "
     << schedule.additions << " " << schedule.multiplications << "\n";
  for (const ScheduleStep& s : schedule.steps) {
    os << name(s.dest) << " = ";
    if (s.op == ScheduleStep::Op::kAdd)
      os << name(s.src1) << " + " << name(s.src2);
    else
      os << "c[" << s.constant << "] * " << name(s.src1);
    os << "\n";
  }
  for (int j = 0; j < schedule.n_out(); ++j)
    os << "F" << j << " = " << name(schedule.outputs[j]) << "\n";
  for (size_t k = 0; k < schedule.constants.size(); ++k)
    os << "c[" << k << "] = " << schedule.constants[k] << "\n";
  return os.str();
}

namespace {

int parse_slot(const std::string& token, int n_in, int defined,
               const char* what) {
  if (token == "0") return -1;
  if (token.size() < 2 || (token[0] != 'f' && token[0] != 't'))
    throw std::invalid_argument(std::string("parse_schedule: bad ") + what +
                                " '" + token + "'");
  int idx = std::stoi(token.substr(1));
  int slot = token[0] == 'f' ? idx : n_in + idx;
  if (slot < 0 || slot >= defined)
    throw std::invalid_argument(std::string("parse_schedule: ") + what + " '" +
                                token + "' not yet defined");
  return slot;
}

}  // namespace

Schedule parse_schedule(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string word;
  if (!(is >> word) || word != "schedule")
    throw std::invalid_argument("parse_schedule: missing header");
  Schedule out;
  int n_out = 0;
  if (!(is >> out.n_in >> n_out >> out.additions >> out.multiplications) ||
      out.n_in < 0 || n_out < 0)
    throw std::invalid_argument("parse_schedule: malformed header");
  out.outputs.assign(n_out, -1);
  int n_steps = out.additions + out.multiplications;

  std::string dest, eq, lhs, op, rhs;
  for (int i = 0; i < n_steps; ++i) {
    if (!(is >> dest >> eq >> lhs) || eq != "=")
      throw std::invalid_argument("parse_schedule: malformed step");
    ScheduleStep s;
    s.dest = out.n_in + i;
    if (parse_slot(dest, out.n_in, out.slot_count() + 1, "dest") != s.dest)
      throw std::invalid_argument("parse_schedule: dest '" + dest +
                                  "' out of order");
    if (lhs.rfind("c[", 0) == 0) {
      if (!(is >> op >> rhs) || op != "*")
        throw std::invalid_argument("parse_schedule: malformed product");
      s.op = ScheduleStep::Op::kMul;
      s.constant = std::stoi(lhs.substr(2));
      s.src1 = parse_slot(rhs, out.n_in, s.dest, "operand");
    } else {
      if (!(is >> op >> rhs) || op != "+")
        throw std::invalid_argument("parse_schedule: malformed addition");
      s.op = ScheduleStep::Op::kAdd;
      s.src1 = parse_slot(lhs, out.n_in, s.dest, "operand");
      s.src2 = parse_slot(rhs, out.n_in, s.dest, "operand");
    }
    if (s.src1 < 0 || (s.op == ScheduleStep::Op::kAdd && s.src2 < 0))
      throw std::invalid_argument("parse_schedule: zero operand");
    out.steps.push_back(s);
  }
  for (int j = 0; j < n_out; ++j) {
    if (!(is >> dest >> eq >> lhs) || eq != "=" ||
        dest != "F" + std::to_string(j))
      throw std::invalid_argument("parse_schedule: malformed output line");
    out.outputs[j] = parse_slot(lhs, out.n_in, out.slot_count(), "output");
  }
  int max_const = -1;
  for (const ScheduleStep& s : out.steps)
    if (s.op == ScheduleStep::Op::kMul) max_const = std::max(max_const, s.constant);
  out.constants.assign(max_const + 1, 0);
  for (int k = 0; k <= max_const; ++k) {
    long long value = 0;
    if (!(is >> word >> eq >> value) || eq != "=" ||
        word != "c[" + std::to_string(k) + "]")
      throw std::invalid_argument("parse_schedule: malformed constant line");
    out.constants[k] = static_cast<fe_t>(value);
  }
  std::string err = out.validate();
  if (!err.empty()) throw std::invalid_argument("parse_schedule: " + err);
  return out;
}

}  // namespace cfft
