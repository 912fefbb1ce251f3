#pragma once

#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "milpacq/eval.hpp"
#include "milpacq/search.hpp"
#include "milpacq/synthdata.hpp"

namespace milpacq {

struct ExperimentConfig {
  GenConfig gen;
  SearchConfig search;  // strategy/cutoff/seed overridden per grid cell
  std::vector<double> cutoffs;
  std::vector<Strategy> strategies;
};

inline void validate_experiment_config(const ExperimentConfig& cfg) {
  validate_gen_config(cfg.gen);
  if (cfg.cutoffs.empty()) throw std::invalid_argument("experiment config: empty cutoff list");
  if (cfg.strategies.empty()) throw std::invalid_argument("experiment config: empty strategy list");
  for (std::size_t i = 1; i < cfg.cutoffs.size(); ++i)
    if (!(cfg.cutoffs[i] > cfg.cutoffs[i - 1])) throw std::invalid_argument("experiment config: cutoffs must be strictly increasing");
  for (double c : cfg.cutoffs)
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("experiment config: cutoffs must be positive");
}

struct BenchmarkRun {
  std::size_t model_idx = 0;
  std::size_t data_idx = 0;
  Strategy strategy = Strategy::missle;
  double cutoff = 0.0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  EvalReport report;
  double train_zero_one = 1.0;
  double seconds = 0.0;
};

struct BenchmarkAggregate {
  Strategy strategy = Strategy::missle;
  double cutoff = 0.0;
  std::size_t runs_ok = 0;
  std::size_t runs_total = 0;
  double recall_mean = 0.0, recall_std = 0.0;
  double precision_mean = 0.0, precision_std = 0.0;
  double infeasibility_mean = 0.0, infeasibility_std = 0.0;
  double regret_mean = 0.0, regret_std = 0.0;
};

struct BenchmarkResults {
  std::vector<BenchmarkRun> runs;           // grid order
  std::vector<BenchmarkAggregate> aggregates;  // per (strategy, cutoff)
};

namespace detail {

inline void mean_std(const std::vector<double>& xs, double& mean, double& sd) {
  mean = 0.0;
  sd = 0.0;
  if (xs.empty()) return;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace detail

// Full experiment grid: num_models truths x seeds_per_model datasets x
// strategies x cutoffs, learned and evaluated.  Independent runs execute
// concurrently up to `jobs`; results land in deterministic grid order and a
// per-run failure is recorded in its row rather than aborting the grid.
inline BenchmarkResults run_benchmark(const ExperimentConfig& cfg, std::size_t jobs,
                                      const std::function<void(const std::string&)>& log = {}) {
  validate_experiment_config(cfg);
  if (jobs == 0) jobs = 1;

  struct Bundle {
    MilpModel truth;
    Dataset data;
    std::vector<Context> test_contexts;
  };
  std::vector<Bundle> bundles;
  bundles.reserve(cfg.gen.num_models * cfg.gen.seeds_per_model);
  for (std::size_t mi = 0; mi < cfg.gen.num_models; ++mi) {
    std::mt19937_64 truth_rng(mix_seed(cfg.gen.seed, 1000 + mi));
    const MilpModel truth = generate_ground_truth(cfg.gen, truth_rng);
    for (std::size_t di = 0; di < cfg.gen.seeds_per_model; ++di) {
      std::mt19937_64 data_rng(mix_seed(mix_seed(cfg.gen.seed, 1000 + mi), 2000 + di));
      auto [data, test] = generate_contextual_data(truth, cfg.gen, data_rng);
      bundles.push_back({truth, std::move(data), std::move(test)});
      if (log) log("generated dataset model=" + std::to_string(mi) + " data_seed=" + std::to_string(di));
    }
  }

  BenchmarkResults results;
  for (std::size_t mi = 0; mi < cfg.gen.num_models; ++mi)
    for (std::size_t di = 0; di < cfg.gen.seeds_per_model; ++di)
      for (std::size_t si = 0; si < cfg.strategies.size(); ++si)
        for (std::size_t ci = 0; ci < cfg.cutoffs.size(); ++ci) {
          BenchmarkRun run;
          run.model_idx = mi;
          run.data_idx = di;
          run.strategy = cfg.strategies[si];
          run.cutoff = cfg.cutoffs[ci];
          run.seed = mix_seed(mix_seed(mix_seed(cfg.gen.seed, 1000 + mi), 2000 + di), 3000 + si * 100 + ci);
          results.runs.push_back(run);
        }

  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= results.runs.size()) return;
      BenchmarkRun& run = results.runs[idx];
      const Bundle& bundle = bundles[run.model_idx * cfg.gen.seeds_per_model + run.data_idx];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        SearchConfig scfg = cfg.search;
        scfg.strategy = run.strategy;
        scfg.cutoff_seconds = run.cutoff;
        scfg.seed = run.seed;
        const SearchResult learned = run_search(bundle.data, scfg);
        run.report = evaluate(learned.model, bundle.truth, bundle.test_contexts);
        run.train_zero_one = learned.trace.best_zero_one;
        run.ok = true;
      } catch (const std::exception& e) {
        run.ok = false;
        run.error = e.what();
      }
      run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (log) {
        std::lock_guard<std::mutex> lock(log_mutex);
        log("run " + std::to_string(idx + 1) + "/" + std::to_string(results.runs.size()) + " " +
            strategy_name(run.strategy) + " cutoff=" + std::to_string(run.cutoff) +
            (run.ok ? " regret=" + std::to_string(run.report.mean_regret) + " recall=" + std::to_string(run.report.recall)
                    : " FAILED: " + run.error));
      }
    }
  };

  std::vector<std::thread> pool;
  const std::size_t nthreads = std::min(jobs, results.runs.size());
  pool.reserve(nthreads);
  for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  for (Strategy s : cfg.strategies)
    for (double cutoff : cfg.cutoffs) {
      BenchmarkAggregate agg;
      agg.strategy = s;
      agg.cutoff = cutoff;
      std::vector<double> recall, precision, infeasibility, regret;
      for (const BenchmarkRun& run : results.runs) {
        if (run.strategy != s || run.cutoff != cutoff) continue;
        ++agg.runs_total;
        if (!run.ok) continue;
        ++agg.runs_ok;
        recall.push_back(run.report.recall);
        precision.push_back(run.report.precision);
        infeasibility.push_back(run.report.infeasibility);
        regret.push_back(run.report.mean_regret);
      }
      detail::mean_std(recall, agg.recall_mean, agg.recall_std);
      detail::mean_std(precision, agg.precision_mean, agg.precision_std);
      detail::mean_std(infeasibility, agg.infeasibility_mean, agg.infeasibility_std);
      detail::mean_std(regret, agg.regret_mean, agg.regret_std);
      results.aggregates.push_back(agg);
    }
  return results;
}

}  // namespace milpacq
