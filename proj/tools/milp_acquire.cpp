// Command-line surface for generating synthetic contextual MILP data,
// learning models from it, evaluating them against a ground truth and
// running full benchmark grids with machine-readable outputs.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "milpacq/milpacq.hpp"

namespace fs = std::filesystem;
using namespace milpacq;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAllRunsFailed = 1;
constexpr int kExitBadInput = 2;

std::optional<std::uint64_t> env_seed_override() {
  const char* raw = std::getenv("MILP_ACQUIRE_SEED");
  if (!raw || !*raw) return std::nullopt;
  try {
    return static_cast<std::uint64_t>(std::stoull(raw));
  } catch (const std::exception&) {
    throw std::runtime_error("MILP_ACQUIRE_SEED is not an integer");
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int cmd_generate(const std::string& config_path, const std::string& out_dir, std::optional<std::uint64_t> seed_flag) {
  GenConfig cfg = gen_config_from_json(parse_json(read_text(config_path), config_path));
  if (seed_flag) cfg.seed = *seed_flag;
  if (auto env = env_seed_override()) cfg.seed = *env;

  const fs::path out(out_dir);
  fs::create_directories(out);

  json manifest;
  manifest["config"] = gen_config_to_json(cfg);
  json bundles = json::array();

  for (std::size_t mi = 0; mi < cfg.num_models; ++mi) {
    const std::uint64_t truth_seed = mix_seed(cfg.seed, 1000 + mi);
    std::mt19937_64 truth_rng(truth_seed);
    const MilpModel truth = generate_ground_truth(cfg, truth_rng);
    for (std::size_t di = 0; di < cfg.seeds_per_model; ++di) {
      const std::uint64_t data_seed = mix_seed(truth_seed, 2000 + di);
      std::mt19937_64 data_rng(data_seed);
      auto [data, test_contexts] = generate_contextual_data(truth, cfg, data_rng);

      const std::string dir = "model" + std::to_string(mi) + "_seed" + std::to_string(di);
      write_text(out / dir / "truth.json", dump(model_to_json(truth)));
      write_text(out / dir / "dataset.json", dump(dataset_to_json(data)));
      write_text(out / dir / "test_contexts.json", dump(contexts_to_json(data.n, test_contexts)));
      bundles.push_back({{"model", mi}, {"data_seed", di}, {"dir", dir}, {"truth_seed", truth_seed}, {"data_seed_value", data_seed}});
      std::cerr << "wrote " << (out / dir).string() << " (" << data.size() << " examples, " << test_contexts.size()
                << " test contexts)\n";
    }
  }
  manifest["bundles"] = bundles;
  write_text(out / "manifest.json", dump(manifest));
  return kExitOk;
}

int cmd_learn(const std::string& dataset_path, const std::string& strategy, double cutoff, std::uint64_t seed,
              std::size_t max_rows, double restart_p, double alpha, std::size_t max_iters, const std::string& out_dir,
              bool trace_mode, bool verbose) {
  Dataset data = dataset_from_json(parse_json(read_text(dataset_path), dataset_path));

  SearchConfig cfg;
  cfg.strategy = strategy_from_name(strategy);
  cfg.cutoff_seconds = cutoff;
  cfg.seed = seed;
  cfg.max_rows = max_rows;
  cfg.restart_probability = restart_p;
  cfg.target_accuracy = alpha;
  cfg.max_iterations = max_iters;
  if (auto env = env_seed_override()) cfg.seed = *env;
  validate_search_config(cfg);

  const SearchResult result = run_search(data, cfg);

  const fs::path out(out_dir);
  write_text(out / "learned_model.json", dump(model_to_json(result.model)));
  write_text(out / "trace.csv", trace_to_csv(result.trace));
  json meta{{"strategy", strategy_name(cfg.strategy)},
            {"seed", cfg.seed},
            {"cutoff", cfg.cutoff_seconds},
            {"best_zero_one", result.trace.best_zero_one},
            {"initial_zero_one", result.trace.initial_zero_one},
            {"iterations", result.trace.iterations.size()}};
  write_text(out / "learn_meta.json", dump(meta));
  if (trace_mode) {
    write_text(out / "trace.json", dump(trace_to_json(result.trace)));
    write_text(out / "loss_breakdown.json", dump(breakdown_to_json(surrogate_loss(result.model, data))));
  }
  std::cerr << "learned " << strategy << " best_zero_one=" << result.trace.best_zero_one << " iterations="
            << result.trace.iterations.size() << "\n";
  if (verbose)
    std::cerr << "solver stats: nodes=" << result.trace.stats.nodes << " lp_solves=" << result.trace.stats.lp_solves
              << " pivots=" << result.trace.stats.pivots << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& learned_path, const std::string& truth_path, const std::string& contexts_path,
             const std::string& out_dir, const std::string& strategy_label, const std::string& seed_label,
             const std::string& cutoff_label) {
  const MilpModel learned = model_from_json(parse_json(read_text(learned_path), learned_path));
  const MilpModel truth = model_from_json(parse_json(read_text(truth_path), truth_path));
  const std::vector<Context> contexts = contexts_from_json(parse_json(read_text(contexts_path), contexts_path));

  const EvalReport report = evaluate(learned, truth, contexts);
  const fs::path out(out_dir);
  write_text(out / "report.json", dump(report_to_json(report)));
  append_eval_csv(out / "results.csv", strategy_label, seed_label, cutoff_label, report);
  std::cout << "recall=" << report.recall << " precision=" << report.precision << " infeasibility=" << report.infeasibility
            << " regret=" << report.mean_regret << "\n";
  return kExitOk;
}

int cmd_benchmark(const std::string& config_path, std::size_t jobs, const std::string& out_dir) {
  const json j = parse_json(read_text(config_path), config_path);
  ExperimentConfig cfg;
  if (j.contains("gen")) cfg.gen = gen_config_from_json(j.at("gen"));
  if (j.contains("search")) cfg.search = search_config_from_json(j.at("search"));
  if (!j.contains("cutoffs") || !j.contains("strategies")) throw std::runtime_error("benchmark config: missing cutoffs/strategies");
  cfg.cutoffs = j.at("cutoffs").get<std::vector<double>>();
  for (const json& s : j.at("strategies")) cfg.strategies.push_back(strategy_from_name(s.get<std::string>()));
  if (auto env = env_seed_override()) cfg.gen.seed = *env;
  validate_experiment_config(cfg);

  const BenchmarkResults results = run_benchmark(cfg, jobs, [](const std::string& line) { std::cerr << line << "\n"; });

  std::string raw = "strategy,model,data_seed,seed,cutoff,status,recall,precision,infeasibility,regret,train_zero_one,seconds\n";
  for (const BenchmarkRun& r : results.runs) {
    raw += std::string(strategy_name(r.strategy)) + "," + std::to_string(r.model_idx) + "," + std::to_string(r.data_idx) + "," +
           std::to_string(r.seed) + "," + fmt_double(r.cutoff) + "," + (r.ok ? "ok" : "failed") + ",";
    if (r.ok)
      raw += fmt_double(r.report.recall) + "," + fmt_double(r.report.precision) + "," + fmt_double(r.report.infeasibility) + "," +
             fmt_double(r.report.mean_regret) + "," + fmt_double(r.train_zero_one) + "," + fmt_double(r.seconds) + "\n";
    else
      raw += ",,,,," + fmt_double(r.seconds) + "\n";
  }
  std::string agg = "strategy,cutoff,runs_ok,runs_total,recall_mean,recall_std,precision_mean,precision_std,"
                    "infeasibility_mean,infeasibility_std,regret_mean,regret_std\n";
  for (const BenchmarkAggregate& a : results.aggregates) {
    agg += std::string(strategy_name(a.strategy)) + "," + fmt_double(a.cutoff) + "," + std::to_string(a.runs_ok) + "," +
           std::to_string(a.runs_total) + "," + fmt_double(a.recall_mean) + "," + fmt_double(a.recall_std) + "," +
           fmt_double(a.precision_mean) + "," + fmt_double(a.precision_std) + "," + fmt_double(a.infeasibility_mean) + "," +
           fmt_double(a.infeasibility_std) + "," + fmt_double(a.regret_mean) + "," + fmt_double(a.regret_std) + "\n";
  }

  const fs::path out(out_dir);
  write_text(out / "results_raw.csv", raw);
  write_text(out / "results_aggregate.csv", agg);

  bool any_ok = false;
  for (const BenchmarkRun& r : results.runs) any_ok = any_ok || r.ok;
  if (!any_ok) {
    std::cerr << "all benchmark runs failed\n";
    return kExitAllRunsFailed;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"learn mixed-integer linear programs from contextual examples"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::optional<std::uint64_t> seed_flag;

  auto* generate = app.add_subcommand("generate", "generate ground truths, datasets and test contexts");
  generate->add_option("--config", config_path, "generator config (JSON)")->required();
  generate->add_option("--out", out_dir, "output directory");
  std::uint64_t gen_seed = 0;
  auto* gen_seed_opt = generate->add_option("--seed", gen_seed, "override config seed");

  auto* learn = app.add_subcommand("learn", "learn a model from a dataset file");
  std::string dataset_path, strategy = "missle";
  double cutoff = 60.0, restart_p = 0.05, alpha = 1.0;
  std::uint64_t learn_seed = 0;
  std::size_t max_rows = 5, max_iters = 0;
  bool trace_mode = false, verbose = false;
  learn->add_option("dataset", dataset_path, "dataset file (JSON)")->required();
  learn->add_option("--strategy", strategy, "missle|sgd|sls");
  learn->add_option("--cutoff", cutoff, "wall-clock budget in seconds");
  learn->add_option("--seed", learn_seed, "RNG seed");
  learn->add_option("--m", max_rows, "constraint rows in the hypothesis");
  learn->add_option("--p", restart_p, "restart probability per iteration");
  learn->add_option("--alpha", alpha, "target training accuracy in (0,1]");
  learn->add_option("--max-iters", max_iters, "iteration cap (0 = unlimited)");
  learn->add_option("--out", out_dir, "output directory");
  learn->add_flag("--trace", trace_mode, "also write trace.json and loss_breakdown.json");
  learn->add_flag("--verbose", verbose, "print solver statistics");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a learned model against a ground truth");
  std::string learned_path, truth_path, contexts_path;
  std::string strategy_label, seed_label, cutoff_label;
  eval_cmd->add_option("learned", learned_path, "learned model file (JSON)")->required();
  eval_cmd->add_option("truth", truth_path, "ground-truth model file (JSON)")->required();
  eval_cmd->add_option("contexts", contexts_path, "test contexts file (JSON)")->required();
  eval_cmd->add_option("--out", out_dir, "output directory");
  eval_cmd->add_option("--strategy", strategy_label, "strategy label for the CSV row");
  eval_cmd->add_option("--seed", seed_label, "seed label for the CSV row");
  eval_cmd->add_option("--cutoff", cutoff_label, "cutoff label for the CSV row");

  auto* benchmark = app.add_subcommand("benchmark", "run the full learn+eval grid from an experiment config");
  std::size_t jobs = 2;
  benchmark->add_option("--config", config_path, "experiment config (JSON)")->required();
  benchmark->add_option("--jobs", jobs, "concurrent runs");
  benchmark->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (generate->parsed()) {
      if (gen_seed_opt->count() > 0) seed_flag = gen_seed;
      return cmd_generate(config_path, out_dir, seed_flag);
    }
    if (learn->parsed())
      return cmd_learn(dataset_path, strategy, cutoff, learn_seed, max_rows, restart_p, alpha, max_iters, out_dir, trace_mode,
                       verbose);
    if (eval_cmd->parsed()) return cmd_eval(learned_path, truth_path, contexts_path, out_dir, strategy_label, seed_label, cutoff_label);
    if (benchmark->parsed()) return cmd_benchmark(config_path, jobs, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}
