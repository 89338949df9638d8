#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "ckc/baselines.hpp"
#include "ckc/constraints.hpp"
#include "ckc/datagen.hpp"
#include "ckc/eval.hpp"
#include "ckc/io.hpp"
#include "ckc/solver.hpp"

namespace ckc::bench {

struct DatasetSpec {
  std::string name;
  std::string path;               // CSV with a label column
  io::CsvOptions csv;
  bool generated = false;         // otherwise read from path
  std::size_t gen_k = 0, gen_n = 0, gen_dim = 2;
  double gen_radius = 1.0;
  std::uint64_t gen_seed = 0;
};

struct BenchPlan {
  std::vector<DatasetSpec> datasets;
  std::vector<std::string> algorithms;
  std::vector<double> fractions;
  std::vector<std::string> modes;
  std::vector<double> repeat_ratios{0.0};
  std::size_t k = 0;
  std::size_t repetitions = 1;
  std::uint64_t seed = 0;
  std::size_t participants = 1;
  std::size_t workers = 1;
};

struct RunConfig {
  std::size_t dataset = 0;  // index into plan.datasets
  std::string algorithm;
  std::string mode;
  double fraction = 0.0;
  double repeat_ratio = 0.0;
  std::uint64_t seed = 0;
};

struct RunRow {
  RunConfig config;
  MetricsReport metrics;
  double runtime_ms = 0.0;
  bool ok = false;
  std::string error;
};

inline const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> names{"rds", "greedy", "matching", "traditional"};
  return names;
}

inline BenchPlan plan_from_json(const io::json& j, const std::string& base_dir = "") {
  BenchPlan plan;
  try {
    for (const auto& d : j.at("datasets")) {
      DatasetSpec spec;
      if (d.contains("generate")) {
        const auto& g = d.at("generate");
        spec.generated = true;
        spec.gen_k = g.at("k").get<std::size_t>();
        spec.gen_n = g.at("n").get<std::size_t>();
        spec.gen_dim = g.value("dim", std::size_t{2});
        spec.gen_radius = g.value("radius", 1.0);
        spec.gen_seed = g.value("seed", std::uint64_t{0});
        spec.name = d.value("name", "planted-k" + std::to_string(spec.gen_k) + "-n" +
                                        std::to_string(spec.gen_n));
      } else {
        spec.path = d.at("path").get<std::string>();
        if (!base_dir.empty() && !spec.path.empty() && spec.path.front() != '/') {
          spec.path = base_dir + "/" + spec.path;
        }
        spec.csv.header = d.value("header", false);
        spec.csv.label_column = d.value("labels_col", -1L);
        spec.name = d.value("name", d.at("path").get<std::string>());
      }
      plan.datasets.push_back(std::move(spec));
    }
    plan.algorithms = j.at("algorithms").get<std::vector<std::string>>();
    plan.fractions = j.value("fractions", std::vector<double>{0.0});
    plan.modes = j.value("modes", std::vector<std::string>{"disjoint"});
    plan.repeat_ratios = j.value("repeat_ratios", std::vector<double>{0.0});
    plan.k = j.at("k").get<std::size_t>();
    plan.repetitions = j.value("repetitions", std::size_t{1});
    plan.seed = j.value("seed", std::uint64_t{0});
    plan.participants = j.value("participants", std::size_t{1});
    plan.workers = j.value("workers", std::size_t{1});
  } catch (const io::json::exception& e) {
    throw InputError(std::string("bench plan: ") + e.what());
  }
  if (plan.datasets.empty()) throw InputError("bench plan lists no datasets");
  for (const auto& a : plan.algorithms) {
    const auto& known = known_algorithms();
    if (std::find(known.begin(), known.end(), a) == known.end()) {
      throw InputError("bench plan: unknown algorithm '" + a + "'");
    }
  }
  for (const auto& m : plan.modes) {
    if (m != "disjoint" && m != "intersected" && m != "biased") {
      throw InputError("bench plan: unknown mode '" + m + "'");
    }
  }
  if (plan.k == 0) throw InputError("bench plan: k must be at least 1");
  if (plan.workers == 0) plan.workers = 1;
  return plan;
}

/// Every (dataset, algorithm, mode, fraction, repeat ratio, repetition), in
/// output order. Repetition r runs with seed plan.seed + r.
inline std::vector<RunConfig> enumerate(const BenchPlan& plan) {
  std::vector<RunConfig> runs;
  for (std::size_t d = 0; d < plan.datasets.size(); ++d) {
    for (const auto& algorithm : plan.algorithms) {
      for (const auto& mode : plan.modes) {
        for (double fraction : plan.fractions) {
          for (double ratio : plan.repeat_ratios) {
            for (std::size_t rep = 0; rep < plan.repetitions; ++rep) {
              runs.push_back(RunConfig{d, algorithm, mode, fraction, ratio, plan.seed + rep});
            }
          }
        }
      }
    }
  }
  return runs;
}

struct LoadedDataset {
  io::LabeledData data;
  std::optional<double> r_star;
};

inline LoadedDataset load(const DatasetSpec& spec) {
  if (spec.generated) {
    PlantedInstance inst =
        generate(spec.gen_k, spec.gen_n, spec.gen_radius, spec.gen_dim, spec.gen_seed);
    return LoadedDataset{io::LabeledData{std::move(inst.dataset), std::move(inst.truth_labels)},
                         inst.r_star};
  }
  auto data = io::read_dataset_csv(spec.path, spec.csv);
  if (data.labels.empty()) throw InputError(spec.path + ": bench datasets need a label column");
  return LoadedDataset{std::move(data), std::nullopt};
}

inline SampleMode sample_mode(const std::string& mode) {
  if (mode == "intersected") return SampleMode::intersected;
  if (mode == "biased") return SampleMode::biased;
  return SampleMode::disjoint;
}

inline RunRow run_one(const RunConfig& cfg, const LoadedDataset& ds, const BenchPlan& plan) {
  RunRow row;
  row.config = cfg;
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto& data = ds.data.dataset;
    const auto& labels = ds.data.labels;
    std::vector<std::vector<PointId>> ml;
    CLCollection cl;
    if (cfg.fraction > 0.0 && cfg.algorithm != "traditional") {
      SamplerConfig sc;
      sc.mode = sample_mode(cfg.mode);
      sc.fraction = cfg.fraction;
      sc.repeat_ratio = cfg.repeat_ratio;
      sc.seed = cfg.seed;
      sc.participants = plan.participants;
      auto sampled = sample_constraints(labels, sc, plan.k);
      ml = std::move(sampled.ml.sets);
      cl = std::move(sampled.cl);
    }
    ClusteringSolution sol;
    if (cfg.algorithm == "rds") {
      sol = cl.mode == CLMode::intersected ? solve_intersected(data, ml, cl, plan.k)
                                           : solve(data, ml, cl, plan.k);
    } else if (cfg.algorithm == "greedy") {
      sol = greedy_baseline(data, ml, cl, plan.k, cfg.seed);
    } else if (cfg.algorithm == "matching") {
      sol = matching_baseline(data, ml, cl, plan.k, cfg.seed);
    } else {
      sol = traditional_kcenter(data, plan.k, cfg.seed);
    }
    row.metrics = evaluate(sol, labels, ds.r_star);
    row.ok = true;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  row.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

/// Runs every configuration on a pool of plan.workers threads. Rows come back
/// in enumerate() order whatever the worker count.
inline std::vector<RunRow> run(const BenchPlan& plan,
                               const std::function<void(const std::string&)>& log = {}) {
  std::vector<std::unique_ptr<LoadedDataset>> datasets;
  std::vector<std::string> load_errors(plan.datasets.size());
  for (std::size_t d = 0; d < plan.datasets.size(); ++d) {
    try {
      datasets.push_back(std::make_unique<LoadedDataset>(load(plan.datasets[d])));
    } catch (const std::exception& e) {
      datasets.push_back(nullptr);
      load_errors[d] = e.what();
    }
  }
  const auto runs = enumerate(plan);
  if (log) log("bench: " + std::to_string(runs.size()) + " runs");
  std::vector<RunRow> rows(runs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      const auto& cfg = runs[i];
      if (!datasets[cfg.dataset]) {
        rows[i].config = cfg;
        rows[i].error = load_errors[cfg.dataset];
        continue;
      }
      rows[i] = run_one(cfg, *datasets[cfg.dataset], plan);
    }
  };
  const std::size_t threads = std::min(plan.workers, std::max<std::size_t>(runs.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

inline constexpr const char* kCsvHeader =
    "dataset,algorithm,mode,fraction,repeat_ratio,k,seed,cost,purity,nmi,ri,runtime_ms,status";

inline std::string to_csv(const BenchPlan& plan, const std::vector<RunRow>& rows,
                          bool with_timing = true) {
  using io::format_number;
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) {
    const auto& c = r.config;
    out += plan.datasets[c.dataset].name + ',' + c.algorithm + ',' + c.mode + ',' +
           format_number(c.fraction) + ',' + format_number(c.repeat_ratio) + ',' +
           std::to_string(plan.k) + ',' + std::to_string(c.seed) + ',';
    if (r.ok) {
      out += format_number(r.metrics.cost) + ',' + format_number(r.metrics.purity) + ',' +
             format_number(r.metrics.nmi) + ',' + format_number(r.metrics.ri) + ',';
    } else {
      out += ",,,,";
    }
    out += (with_timing ? format_number(r.runtime_ms) : std::string("0")) + ',';
    out += r.ok ? "ok" : "error";
    out += '\n';
  }
  return out;
}

}  // namespace ckc::bench
