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
//
// Command-line surface: plan construction, schedule optimization,
// verification, and benchmarking with machine-readable reports.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "cfft/bilinear.h"
#include "cfft/cse.h"
#include "cfft/plan.h"
#include "cfft/schedule.h"
#include "json.hpp"

namespace {

using nlohmann::json;

constexpr int kExitVerification = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitMissingForms = 3;

// Published reference counts for the full transforms (additions for the
// evaluation-style transform and its transposed/inverse variants, and the
// shared multiplication count).  Used only for report comparison columns.
struct Reference {
  int n;
  int mult;
  int dcfft_adds;
  int tcfft_adds;  // transposed/inverse variants
};
constexpr Reference kReferences[] = {
    {7, 6, 24, 24},          {15, 16, 74, 76},      {31, 54, 299, 307},
    {63, 97, 759, 804},      {127, 216, 2576, 3117}, {255, 586, 6736, 6984},
    {511, 1014, 23130, 27192}, {1023, 2827, 75360, 77276},
};

std::optional<int> reference_adds(int n, cfft::TransformKind kind) {
  for (const Reference& r : kReferences)
    if (r.n == n)
      return kind == cfft::TransformKind::kDcfft ? r.dcfft_adds : r.tcfft_adds;
  return std::nullopt;
}

std::optional<int> reference_mult(int n) {
  for (const Reference& r : kReferences)
    if (r.n == n) return r.mult;
  return std::nullopt;
}

int m_for_n(int n) {
  for (int m = 2; m <= 10; ++m)
    if ((1 << m) - 1 == n) return m;
  return -1;
}

struct CommonOptions {
  int n = 7;
  std::string kind_name = "dcfft";
  std::string forms_dir;
  int runs = 1;
  std::uint64_t seed = 0;
  int ld = 0;
  int lr = 0;
  std::string algo = "classic";
  std::string strategy = "differential-first";
  bool recurrence_only = false;
  bool allow_naive = false;
  std::string out_file;
  std::string report_format = "json";
};

// Forms directory resolution: --forms flag, then the CFFT_FORMS_DIR
// environment variable, then the directory the binary shipped with.
std::string default_forms_dir() {
  if (const char* env = std::getenv("CFFT_FORMS_DIR")) return env;
#ifdef CFFT_DATA_DIR
  return std::string(CFFT_DATA_DIR) + "/forms";
#else
  return "data/forms";
#endif
}

cfft::FormLibrary load_library(const CommonOptions& opt) {
  cfft::FormLibrary lib = cfft::FormLibrary::builtins();
  std::string dir = opt.forms_dir.empty() ? default_forms_dir() : opt.forms_dir;
  std::error_code ec;
  if (std::filesystem::is_directory(dir, ec)) lib.load_directory(dir);
  lib.compose_missing();
  return lib;
}

cfft::CseOptions cse_options(const CommonOptions& opt, std::uint64_t seed) {
  cfft::CseOptions o;
  o.algorithm = opt.algo == "classic" ? cfft::CseAlgorithm::kClassic
                                      : cfft::CseAlgorithm::kFast;
  o.strategy = opt.strategy == "greedy" ? cfft::CseStrategy::kGreedy
                                        : cfft::CseStrategy::kDifferentialFirst;
  o.recurrence_only = opt.recurrence_only;
  o.ld = opt.ld;
  o.lr = opt.lr;
  o.seed = seed;
  return o;
}

cfft::TransformKind parse_kind_or_throw(const std::string& name) {
  std::optional<cfft::TransformKind> kind = cfft::parse_kind(name);
  if (!kind) throw CLI::ValidationError("--kind", "unknown kind " + name);
  return *kind;
}

void write_or_print(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << content;
}

struct OptimizeOutcome {
  long long pre_cost = 0;
  long long post_cost = 0;
  cfft::Schedule pre;
  cfft::Schedule post;
  bool verified = false;
};

// One seeded optimization of both plan matrices, with the symbolic check
// that each emitted program reproduces its matrix exactly.
OptimizeOutcome run_once(const cfft::CfftPlan& plan, const cfft::CseOptions& o) {
  OptimizeOutcome out;
  cfft::CseOptimizer pre(plan.pre, o);
  pre.run();
  out.pre = cfft::schedule_from_state(pre);
  out.pre_cost = pre.cost();
  cfft::CseOptimizer post(plan.post, o);
  post.run();
  out.post = cfft::schedule_from_state(post);
  out.post_cost = post.cost();
  out.verified = cfft::symbolic_matrix(out.pre) == plan.pre &&
                 cfft::symbolic_matrix(out.post) == plan.post;
  return out;
}

struct BatchResult {
  OptimizeOutcome best;       // best pre and best post, merged independently
  std::vector<long long> run_totals;
  bool all_verified = true;
};

// Runs `runs` seeded optimizations (seed = base + index) concurrently and
// merges by minimum cost per side; ties keep the earlier run.
BatchResult run_batch(const cfft::CfftPlan& plan, const CommonOptions& opt) {
  BatchResult result;
  int wave = std::max(1u, std::thread::hardware_concurrency());
  bool first = true;
  for (int start = 0; start < opt.runs; start += wave) {
    int end = std::min(opt.runs, start + wave);
    std::vector<std::future<OptimizeOutcome>> futures;
    for (int i = start; i < end; ++i)
      futures.push_back(std::async(std::launch::async, [&, i] {
        return run_once(plan, cse_options(opt, opt.seed + i));
      }));
    for (auto& f : futures) {
      OptimizeOutcome o = f.get();
      result.all_verified &= o.verified;
      result.run_totals.push_back(o.pre_cost + o.post_cost);
      if (first || o.pre_cost < result.best.pre_cost) {
        result.best.pre = o.pre;
        result.best.pre_cost = o.pre_cost;
      }
      if (first || o.post_cost < result.best.post_cost) {
        result.best.post = o.post;
        result.best.post_cost = o.post_cost;
      }
      first = false;
    }
  }
  return result;
}

json make_report(const cfft::CfftPlan& plan, const CommonOptions& opt,
                 const BatchResult& batch, double wall_ms) {
  long long best = batch.best.pre_cost + batch.best.post_cost;
  double mean = 0;
  for (long long t : batch.run_totals) mean += static_cast<double>(t);
  mean /= static_cast<double>(batch.run_totals.size());
  double var = 0;
  for (long long t : batch.run_totals) {
    double d = static_cast<double>(t) - mean;
    var += d * d;
  }
  var /= static_cast<double>(batch.run_totals.size());
  cfft::TransformKind kind = plan.kind;
  json j;
  j["n"] = plan.n;
  j["kind"] = cfft::to_string(kind);
  j["mult"] = plan.mult_count();
  j["adds_best"] = best;
  j["adds_mean"] = mean;
  j["adds_std"] = std::sqrt(var);
  j["total"] = cfft::total_complexity(plan.m, best, plan.mult_count());
  j["runs"] = opt.runs;
  j["seed"] = opt.seed;
  j["wall_ms"] = wall_ms;
  std::optional<int> pa = plan.used_naive_form
                              ? std::nullopt
                              : reference_adds(plan.n, kind);
  std::optional<int> pm =
      plan.used_naive_form ? std::nullopt : reference_mult(plan.n);
  j["paper_adds"] = pa ? json(*pa) : json(nullptr);
  j["paper_mult"] = pm ? json(*pm) : json(nullptr);
  return j;
}

std::string report_to_csv(const std::vector<json>& reports) {
  std::ostringstream os;
  os << "n,kind,mult,adds_best,adds_mean,adds_std,total,runs,seed,wall_ms,"
        "paper_adds,paper_mult\n";
  for (const json& j : reports) {
    os << j["n"] << "," << j["kind"].get<std::string>() << "," << j["mult"]
       << "," << j["adds_best"] << "," << j["adds_mean"] << ","
       << j["adds_std"] << "," << j["total"] << "," << j["runs"] << ","
       << j["seed"] << "," << j["wall_ms"] << ",";
    if (j["paper_adds"].is_null())
      os << "";
    else
      os << j["paper_adds"];
    os << ",";
    if (j["paper_mult"].is_null())
      os << "";
    else
      os << j["paper_mult"];
    os << "\n";
  }
  return os.str();
}

int cmd_plan(const CommonOptions& opt) {
  int m = m_for_n(opt.n);
  if (m < 0) {
    std::cerr << "error: n = " << opt.n << " is not 2^m - 1 for m in 2..10\n";
    return kExitBadInput;
  }
  cfft::FormLibrary lib = load_library(opt);
  cfft::PlanOptions popt;
  popt.allow_naive_forms = opt.allow_naive;
  cfft::CfftPlan plan =
      cfft::build_plan(m, parse_kind_or_throw(opt.kind_name), lib, popt);
  cfft::ComplexityReport rep = cfft::complexity_report(plan);
  std::cout << "n=" << rep.n << " kind=" << cfft::to_string(plan.kind)
            << " t=" << rep.t << " mult=" << rep.mult
            << " direct_adds=" << rep.direct_adds
            << " (pre " << rep.pre_direct_adds << ", post "
            << rep.post_direct_adds << ")"
            << (plan.used_naive_form ? " [naive forms]" : "") << "\n";
  if (!opt.out_file.empty()) {
    write_or_print(opt.out_file, cfft::plan_to_json(plan));
    std::cout << "wrote " << opt.out_file << "\n";
  }
  return 0;
}

int cmd_optimize_matrix(const CommonOptions& opt, const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    std::cerr << "error: cannot read " << path << "\n";
    return kExitBadInput;
  }
  std::stringstream buffer;
  buffer << is.rdbuf();
  cfft::BinaryMatrix m = cfft::BinaryMatrix::from_text(buffer.str());
  auto t0 = std::chrono::steady_clock::now();
  long long best_cost = -1;
  cfft::Schedule best;
  for (int i = 0; i < opt.runs; ++i) {
    cfft::CseOptimizer cse(m, cse_options(opt, opt.seed + i));
    cse.run();
    cfft::Schedule s = cfft::schedule_from_state(cse);
    if (cfft::symbolic_matrix(s) != m) {
      std::cerr << "verification failure: run " << i
                << " does not reproduce the input matrix\n";
      return kExitVerification;
    }
    std::cout << "run " << i << ": " << cse.cost() << " additions\n";
    if (best_cost < 0 || cse.cost() < best_cost) {
      best_cost = cse.cost();
      best = s;
    }
  }
  auto t1 = std::chrono::steady_clock::now();
  std::cout << "best: " << best_cost << " additions (direct "
            << m.direct_add_count() << ", "
            << std::chrono::duration<double, std::milli>(t1 - t0).count()
            << " ms)\n";
  if (!opt.out_file.empty())
    write_or_print(opt.out_file, cfft::emit_schedule(best));
  return 0;
}

int cmd_optimize(const CommonOptions& opt, const std::string& matrix_path) {
  if (!matrix_path.empty()) return cmd_optimize_matrix(opt, matrix_path);
  int m = m_for_n(opt.n);
  if (m < 0) {
    std::cerr << "error: n = " << opt.n << " is not 2^m - 1 for m in 2..10\n";
    return kExitBadInput;
  }
  cfft::FormLibrary lib = load_library(opt);
  cfft::PlanOptions popt;
  popt.allow_naive_forms = opt.allow_naive;
  cfft::CfftPlan plan =
      cfft::build_plan(m, parse_kind_or_throw(opt.kind_name), lib, popt);

  auto t0 = std::chrono::steady_clock::now();
  BatchResult batch = run_batch(plan, opt);
  auto t1 = std::chrono::steady_clock::now();
  double wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  if (!batch.all_verified) {
    std::cerr << "verification failure: an emitted program does not "
                 "reproduce its matrix\n";
    return kExitVerification;
  }
  cfft::Schedule full =
      cfft::full_plan_schedule(plan, batch.best.pre, batch.best.post);
  std::string err = cfft::verify_schedule(full, plan);
  if (!err.empty()) {
    std::cerr << "verification failure: " << err << "\n";
    return kExitVerification;
  }
  for (size_t i = 0; i < batch.run_totals.size(); ++i)
    std::cout << "run " << i << ": " << batch.run_totals[i] << " additions\n";
  std::cout << "best: " << batch.best.pre_cost + batch.best.post_cost
            << " additions (pre " << batch.best.pre_cost << ", post "
            << batch.best.post_cost << "), verified\n";

  json report = make_report(plan, opt, batch, wall_ms);
  if (opt.report_format == "csv")
    std::cout << report_to_csv({report});
  else
    std::cout << report.dump(2) << "\n";
  if (!opt.out_file.empty()) {
    write_or_print(opt.out_file, cfft::emit_schedule(full));
    std::cout << "wrote " << opt.out_file << "\n";
  }
  return 0;
}

int cmd_verify(const CommonOptions& opt, const std::string& schedule_path) {
  std::ifstream is(schedule_path);
  if (!is) {
    std::cerr << "error: cannot read " << schedule_path << "\n";
    return kExitBadInput;
  }
  std::stringstream buffer;
  buffer << is.rdbuf();
  cfft::Schedule schedule = cfft::parse_schedule(buffer.str());
  int m = m_for_n(opt.n);
  if (m < 0) {
    std::cerr << "error: n = " << opt.n << " is not 2^m - 1 for m in 2..10\n";
    return kExitBadInput;
  }
  cfft::FormLibrary lib = load_library(opt);
  cfft::PlanOptions popt;
  popt.allow_naive_forms = opt.allow_naive;
  cfft::CfftPlan plan =
      cfft::build_plan(m, parse_kind_or_throw(opt.kind_name), lib, popt);
  std::string err = cfft::verify_schedule(schedule, plan);
  if (!err.empty()) {
    std::cout << "FAIL: " << err << "\n";
    return kExitVerification;
  }
  std::cout << "PASS: schedule matches the transform on all unit vectors and "
               "200 random vectors\n";
  return 0;
}

int cmd_bench(const CommonOptions& opt, const std::string& n_list,
              const std::string& kinds_list) {
  std::vector<int> ns;
  std::stringstream ns_stream(n_list);
  std::string item;
  while (std::getline(ns_stream, item, ',')) ns.push_back(std::stoi(item));
  std::vector<std::string> kinds;
  std::stringstream kinds_stream(kinds_list);
  while (std::getline(kinds_stream, item, ',')) kinds.push_back(item);

  cfft::FormLibrary lib = load_library(opt);
  std::vector<json> reports;
  std::printf("%6s %6s %5s %10s %10s %9s %10s %10s %10s\n", "n", "kind",
              "mult", "adds_best", "adds_mean", "adds_std", "total",
              "paper_adds", "wall_ms");
  for (int n : ns) {
    int m = m_for_n(n);
    if (m < 0) {
      std::cerr << "error: n = " << n << " is not 2^m - 1 for m in 2..10\n";
      return kExitBadInput;
    }
    for (const std::string& kind_name : kinds) {
      CommonOptions local = opt;
      local.n = n;
      local.kind_name = kind_name;
      cfft::PlanOptions popt;
      popt.allow_naive_forms = opt.allow_naive;
      cfft::CfftPlan plan =
          cfft::build_plan(m, parse_kind_or_throw(kind_name), lib, popt);
      auto t0 = std::chrono::steady_clock::now();
      BatchResult batch = run_batch(plan, local);
      auto t1 = std::chrono::steady_clock::now();
      double wall_ms =
          std::chrono::duration<double, std::milli>(t1 - t0).count();
      if (!batch.all_verified) {
        std::cerr << "verification failure at n=" << n << " " << kind_name
                  << "\n";
        return kExitVerification;
      }
      json rep = make_report(plan, local, batch, wall_ms);
      reports.push_back(rep);
      std::printf("%6d %6s %5d %10lld %10.1f %9.1f %10lld %10s %10.0f\n", n,
                  kind_name.c_str(), plan.mult_count(),
                  batch.best.pre_cost + batch.best.post_cost,
                  rep["adds_mean"].get<double>(),
                  rep["adds_std"].get<double>(), rep["total"].get<long long>(),
                  rep["paper_adds"].is_null()
                      ? "-"
                      : std::to_string(rep["paper_adds"].get<int>()).c_str(),
                  wall_ms);
    }
  }
  std::string payload = opt.report_format == "csv"
                            ? report_to_csv(reports)
                            : json(reports).dump(2) + "\n";
  if (!opt.out_file.empty()) {
    write_or_print(opt.out_file, payload);
    std::cout << "wrote " << opt.out_file << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cyclotomic FFT plans over GF(2^m) with addition-minimized "
               "schedules"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::string matrix_path, schedule_path;
  std::string n_list = "7,15,31,63", kinds_list = "dcfft";

  auto add_common = [&](CLI::App* sub, bool with_runs) {
    sub->add_option("--n", opt.n, "Transform length (2^m - 1)");
    sub->add_option("--kind", opt.kind_name, "dcfft|scfft|icfft");
    sub->add_option("--forms", opt.forms_dir,
                    "Directory of convolution form files");
    sub->add_flag("--allow-naive", opt.allow_naive,
                  "Fall back to schoolbook convolution forms");
    sub->add_option("--out", opt.out_file, "Output file");
    if (with_runs) {
      sub->add_option("--runs", opt.runs, "Number of seeded runs");
      sub->add_option("--seed", opt.seed, "Base seed (run i uses seed + i)");
      sub->add_option("--ld", opt.ld, "Differential candidate window");
      sub->add_option("--lr", opt.lr, "Recurrence candidate window");
      sub->add_option("--algo", opt.algo, "classic|fast");
      sub->add_option("--strategy", opt.strategy,
                      "differential-first|greedy");
      sub->add_flag("--recurrence-only", opt.recurrence_only,
                    "Skip differential transforms");
      sub->add_option("--report", opt.report_format, "json|csv");
    }
  };

  CLI::App* plan_cmd = app.add_subcommand("plan", "Build and report a plan");
  add_common(plan_cmd, false);

  CLI::App* optimize_cmd =
      app.add_subcommand("optimize", "Minimize additions; emit a schedule");
  add_common(optimize_cmd, true);
  optimize_cmd->add_option("--matrix", matrix_path,
                           "Optimize a matrix file instead of a plan");

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Check a schedule against its transform");
  add_common(verify_cmd, false);
  verify_cmd->add_option("--schedule", schedule_path, "Schedule file")
      ->required();

  CLI::App* bench_cmd = app.add_subcommand("bench", "Best-of-runs table");
  add_common(bench_cmd, true);
  bench_cmd->add_option("--n-list", n_list, "Comma-separated lengths");
  bench_cmd->add_option("--kinds", kinds_list, "Comma-separated kinds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitBadInput;
  }

  try {
    if (plan_cmd->parsed()) return cmd_plan(opt);
    if (optimize_cmd->parsed()) return cmd_optimize(opt, matrix_path);
    if (verify_cmd->parsed()) return cmd_verify(opt, schedule_path);
    if (bench_cmd->parsed()) return cmd_bench(opt, n_list, kinds_list);
  } catch (const cfft::FormUnavailableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMissingForms;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}
