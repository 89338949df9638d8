// ckc: generate planted data, solve constrained k-center, run benchmark sweeps.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ckc/ckc.hpp"

namespace {

enum Exit : int {
  kOk = 0,
  kIo = 1,
  kInput = 2,
  kInfeasible = 3,
  kDefect = 4,
  kBenchFailures = 5,
};

struct GenArgs {
  std::size_t k = 0, n = 0, dim = 2;
  double radius = 1.0;
  std::uint64_t seed = 0;
  std::string out, truth;
};

struct SolveArgs {
  std::string data, constraints, out, truth, algorithm = "rds", mode;
  std::optional<long> labels_col;
  bool header = false, audit = false, dump_rds = false;
  std::size_t k = 0;
  std::size_t explicit_limit = ckc::SolveOptions{}.explicit_limit;
  std::uint64_t seed = 0;
};

struct BenchArgs {
  std::string plan, out;
  std::optional<std::size_t> workers;
  bool no_timing = false;
};

int gen_data(const GenArgs& a) {
  const auto inst = ckc::generate(a.k, a.n, a.radius, a.dim, a.seed);
  ckc::io::write_file(a.out, ckc::io::dataset_to_csv(inst.dataset));
  ckc::io::write_json(a.truth, ckc::io::truth_to_json(inst));
  std::cout << "wrote " << inst.dataset.size() << " points to " << a.out << "\n";
  return kOk;
}

int solve(const SolveArgs& a) {
  ckc::io::CsvOptions csv;
  csv.header = a.header;
  csv.label_column = a.labels_col;
  const auto loaded = ckc::io::read_dataset_csv(a.data, csv);
  const auto& data = loaded.dataset;

  ckc::io::ConstraintFile cons;
  if (!a.constraints.empty()) {
    cons = ckc::io::constraints_from_json(
        ckc::io::parse_json(ckc::io::read_file(a.constraints), a.constraints));
  }
  if (a.mode == "disjoint") cons.cl.mode = ckc::CLMode::disjoint;
  if (a.mode == "intersected") cons.cl.mode = ckc::CLMode::intersected;

  ckc::ClusteringSolution sol;
  if (a.algorithm == "rds") {
    ckc::SolveOptions opts;
    opts.audit = a.audit;
    opts.dump_rds = a.dump_rds;
    opts.explicit_limit = a.explicit_limit;
    sol = cons.cl.mode == ckc::CLMode::intersected
              ? ckc::solve_intersected(data, cons.ml, cons.cl, a.k, opts)
              : ckc::solve(data, cons.ml, cons.cl, a.k, opts);
  } else if (a.algorithm == "greedy") {
    sol = ckc::greedy_baseline(data, cons.ml, cons.cl, a.k, a.seed);
  } else if (a.algorithm == "matching") {
    sol = ckc::matching_baseline(data, cons.ml, cons.cl, a.k, a.seed);
  } else {
    sol = ckc::traditional_kcenter(data, a.k, a.seed);
  }

  std::optional<ckc::MetricsReport> metrics;
  if (!a.truth.empty()) {
    const auto truth = ckc::io::truth_from_json(
        ckc::io::parse_json(ckc::io::read_file(a.truth), a.truth));
    metrics = ckc::evaluate(sol, truth.labels, truth.r_star);
  } else if (!loaded.labels.empty()) {
    metrics = ckc::evaluate(sol, loaded.labels);
  }
  ckc::io::write_json(a.out, ckc::io::solution_to_json(sol, metrics));
  std::cout << "r=" << ckc::io::format_number(sol.chosen_r)
            << " cost=" << ckc::io::format_number(sol.realized_radius)
            << " centers=" << sol.centers.size() << " violations=" << sol.violations << "\n";
  return kOk;
}

int bench(const BenchArgs& a) {
  const std::string dir = std::filesystem::path(a.plan).parent_path().string();
  auto plan = ckc::bench::plan_from_json(
      ckc::io::parse_json(ckc::io::read_file(a.plan), a.plan), dir);
  if (a.workers) plan.workers = std::max<std::size_t>(*a.workers, 1);
  const auto rows = ckc::bench::run(plan, [](const std::string& line) { std::cerr << line << "\n"; });
  bool failed = false;
  for (const auto& r : rows) {
    if (r.ok) continue;
    failed = true;
    std::cerr << "run failed: " << plan.datasets[r.config.dataset].name << " "
              << r.config.algorithm << " " << r.config.mode << " fraction="
              << ckc::io::format_number(r.config.fraction) << " seed=" << r.config.seed << ": "
              << r.error << "\n";
  }
  ckc::io::write_file(a.out, ckc::bench::to_csv(plan, rows, !a.no_timing));
  return failed ? kBenchFailures : kOk;
}

template <typename F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const ckc::ValidationFailed& e) {
    std::cerr << e.what() << "\n";
    return kInput;
  } catch (const ckc::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const ckc::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const ckc::DefectError& e) {
    std::cerr << "internal defect: " << e.what() << "\n";
    return kDefect;
  } catch (const ckc::io::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained k-center clustering with must-link and cannot-link sets"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Write a planted dataset and its truth file");
  gen_cmd->add_option("--k", gen.k, "Number of clusters")->required();
  gen_cmd->add_option("--n", gen.n, "Number of points (at least 3k)")->required();
  gen_cmd->add_option("--radius", gen.radius, "Planted optimum radius")->capture_default_str();
  gen_cmd->add_option("--dim", gen.dim, "Dimension")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Dataset CSV to write")->required();
  gen_cmd->add_option("--truth", gen.truth, "Truth JSON to write")->required();

  SolveArgs sv;
  auto* solve_cmd = app.add_subcommand("solve", "Cluster a dataset");
  solve_cmd->add_option("--data", sv.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--constraints", sv.constraints, "Constraint JSON {ml, cl, mode}")
      ->check(CLI::ExistingFile);
  solve_cmd->add_option("--k", sv.k, "Maximum number of centers")->required();
  solve_cmd->add_option("--algorithm", sv.algorithm, "Algorithm")
      ->check(CLI::IsMember({"rds", "greedy", "matching", "traditional"}))
      ->capture_default_str();
  solve_cmd->add_option("--labels-col", sv.labels_col,
                        "Integer label column of the CSV (negative counts from the end)");
  solve_cmd->add_flag("--header", sv.header, "Skip the first CSV line");
  solve_cmd->add_option("--mode", sv.mode, "Override the constraint file's cannot-link mode")
      ->check(CLI::IsMember({"disjoint", "intersected"}));
  solve_cmd->add_option("--seed", sv.seed, "First-center seed for the baselines")
      ->capture_default_str();
  solve_cmd->add_option("--truth", sv.truth, "Truth JSON; adds metrics and the ratio")
      ->check(CLI::ExistingFile);
  solve_cmd->add_option("--explicit-limit", sv.explicit_limit,
                        "Largest n searched over materialized candidate radii")
      ->capture_default_str();
  solve_cmd->add_flag("--audit", sv.audit, "Also test every candidate radius and record the scan");
  solve_cmd->add_flag("--dump-rds", sv.dump_rds,
                      "Record the auxiliary graphs and RDSs at the accepted threshold");
  solve_cmd->add_option("--out", sv.out, "Solution JSON to write")->required();

  BenchArgs bn;
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark plan and write CSV rows");
  bench_cmd->add_option("--plan", bn.plan, "Bench plan JSON")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--out", bn.out, "Results CSV to write")->required();
  bench_cmd->add_option("--workers", bn.workers, "Worker threads (overrides the plan)");
  bench_cmd->add_flag("--no-timing", bn.no_timing, "Write runtime_ms as 0 for byte-stable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  if (gen_cmd->parsed()) return guarded([&] { return gen_data(gen); });
  if (solve_cmd->parsed()) return guarded([&] { return solve(sv); });
  return guarded([&] { return bench(bn); });
}
