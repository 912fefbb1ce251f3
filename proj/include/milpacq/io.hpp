#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "milpacq/eval.hpp"
#include "milpacq/search.hpp"
#include "milpacq/synthdata.hpp"

namespace milpacq {

using json = nlohmann::json;

// Shortest round-trip decimal representation, locale-free.
inline std::string fmt_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("fmt_double failed");
  return std::string(buf, ptr);
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline json parse_json(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw std::runtime_error("invalid JSON in " + what);
  return j;
}

// ---- model ----------------------------------------------------------------

inline json model_to_json(const MilpModel& m) {
  json j;
  j["A"] = m.A;
  j["b"] = m.b;
  j["c"] = m.c;
  j["integer_mask"] = m.integer_mask;
  json box = json::array();
  for (const Interval& iv : m.domain_box) box.push_back({iv.lo, iv.hi});
  j["domain_box"] = box;
  return j;
}

inline MilpModel model_from_json(const json& j) {
  if (!j.is_object() || !j.contains("A") || !j.contains("b") || !j.contains("c") || !j.contains("integer_mask") || !j.contains("domain_box"))
    throw std::runtime_error("model JSON: missing key");
  MilpModel m;
  m.A = j.at("A").get<Mat>();
  m.b = j.at("b").get<Vec>();
  m.c = j.at("c").get<Vec>();
  m.integer_mask = j.at("integer_mask").get<std::vector<bool>>();
  for (const json& iv : j.at("domain_box")) {
    if (!iv.is_array() || iv.size() != 2) throw std::runtime_error("model JSON: bad domain_box entry");
    m.domain_box.push_back({iv[0].get<double>(), iv[1].get<double>()});
  }
  const ValidationResult v = validate_model(m);
  if (!v.ok()) throw std::runtime_error("model JSON: " + v.violations.front());
  return m;
}

// ---- contexts and datasets -------------------------------------------------

inline json context_to_json(const Context& ctx) {
  return json{{"S", ctx.S}, {"t", ctx.t}};
}

inline Context context_from_json(const json& j) {
  if (!j.is_object() || !j.contains("S") || !j.contains("t")) throw std::runtime_error("context JSON: missing key");
  Context ctx;
  ctx.S = j.at("S").get<Mat>();
  ctx.t = j.at("t").get<Vec>();
  if (ctx.S.size() != ctx.t.size()) throw std::runtime_error("context JSON: S/t size mismatch");
  return ctx;
}

inline json dataset_to_json(const Dataset& d) {
  json j;
  j["n"] = d.n;
  j["integer_mask"] = d.integer_mask;
  json box = json::array();
  for (const Interval& iv : d.domain_box) box.push_back({iv.lo, iv.hi});
  j["domain_box"] = box;
  json examples = json::array();
  for (const ContextualExample& ex : d.examples)
    examples.push_back({{"S", ex.context.S}, {"t", ex.context.t}, {"x", ex.point}, {"y", ex.label}});
  j["examples"] = examples;
  return j;
}

inline Dataset dataset_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("integer_mask") || !j.contains("domain_box") || !j.contains("examples"))
    throw std::runtime_error("dataset JSON: missing key");
  Dataset d;
  d.n = j.at("n").get<std::size_t>();
  d.integer_mask = j.at("integer_mask").get<std::vector<bool>>();
  for (const json& iv : j.at("domain_box")) {
    if (!iv.is_array() || iv.size() != 2) throw std::runtime_error("dataset JSON: bad domain_box entry");
    d.domain_box.push_back({iv[0].get<double>(), iv[1].get<double>()});
  }
  for (const json& e : j.at("examples")) {
    ContextualExample ex;
    ex.context.S = e.at("S").get<Mat>();
    ex.context.t = e.at("t").get<Vec>();
    ex.point = e.at("x").get<Vec>();
    ex.label = e.at("y").get<int>();
    d.examples.push_back(std::move(ex));
  }
  const ValidationResult v = validate_dataset(d);
  if (!v.ok()) throw std::runtime_error("dataset JSON: " + v.violations.front());
  return d;
}

inline json contexts_to_json(std::size_t n, const std::vector<Context>& contexts) {
  json j;
  j["n"] = n;
  json arr = json::array();
  for (const Context& ctx : contexts) arr.push_back(context_to_json(ctx));
  j["contexts"] = arr;
  return j;
}

inline std::vector<Context> contexts_from_json(const json& j) {
  if (!j.is_object() || !j.contains("contexts")) throw std::runtime_error("contexts JSON: missing key");
  std::vector<Context> out;
  for (const json& c : j.at("contexts")) out.push_back(context_from_json(c));
  return out;
}

// ---- loss breakdown (--trace mode) ------------------------------------------

inline json breakdown_to_json(const LossBreakdown& b) {
  json j;
  j["zero_one"] = b.zero_one;
  j["surrogate"] = b.surrogate;
  json per = json::array();
  for (const ExampleLoss& e : b.per_example) {
    json row{{"case", case_tag_name(e.tag)}, {"contribution", e.contribution}};
    if (e.missing_optimum) row["missing_optimum"] = true;
    per.push_back(row);
  }
  j["per_example"] = per;
  return j;
}

// ---- search traces ----------------------------------------------------------

inline const char* action_name(SearchAction a) { return a == SearchAction::step ? "step" : "restart"; }

inline json trace_to_json(const SearchTrace& t) {
  json j;
  j["initial_zero_one"] = t.initial_zero_one;
  j["best_zero_one"] = t.best_zero_one;
  json rows = json::array();
  for (const TraceRow& r : t.iterations)
    rows.push_back({{"iter", r.iter},
                    {"seconds", r.seconds},
                    {"zero_one", r.zero_one},
                    {"surrogate", r.surrogate},
                    {"lambda", r.lambda},
                    {"action", action_name(r.action)}});
  j["iterations"] = rows;
  return j;
}

inline std::string trace_to_csv(const SearchTrace& t) {
  std::string out = "iter,seconds,zero_one,surrogate,lambda,action\n";
  for (const TraceRow& r : t.iterations) {
    out += std::to_string(r.iter) + "," + fmt_double(r.seconds) + "," + fmt_double(r.zero_one) + "," +
           fmt_double(r.surrogate) + "," + fmt_double(r.lambda) + "," + action_name(r.action) + "\n";
  }
  return out;
}

// ---- eval reports -------------------------------------------------------------

inline json report_to_json(const EvalReport& r) {
  return json{{"recall", r.recall},
              {"precision", r.precision},
              {"infeasibility", r.infeasibility},
              {"mean_regret", r.mean_regret},
              {"num_test_contexts", r.num_test_contexts},
              {"num_feasible_contexts", r.num_feasible_contexts}};
}

inline EvalReport report_from_json(const json& j) {
  EvalReport r;
  r.recall = j.at("recall").get<double>();
  r.precision = j.at("precision").get<double>();
  r.infeasibility = j.at("infeasibility").get<double>();
  r.mean_regret = j.at("mean_regret").get<double>();
  r.num_test_contexts = j.at("num_test_contexts").get<std::size_t>();
  r.num_feasible_contexts = j.value("num_feasible_contexts", std::size_t{0});
  return r;
}

inline constexpr const char* kEvalCsvHeader = "strategy,seed,cutoff,recall,precision,infeasibility,regret";

// Appends one result row, writing the header only when the file is new/empty.
inline void append_eval_csv(const std::filesystem::path& path, const std::string& strategy, const std::string& seed,
                            const std::string& cutoff, const EvalReport& r) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  if (fresh) out << kEvalCsvHeader << "\n";
  out << strategy << "," << seed << "," << cutoff << "," << fmt_double(r.recall) << "," << fmt_double(r.precision) << ","
      << fmt_double(r.infeasibility) << "," << fmt_double(r.mean_regret) << "\n";
}

// ---- configs -------------------------------------------------------------------

inline json gen_config_to_json(const GenConfig& g) {
  return json{{"n", g.n},
              {"m", g.m},
              {"num_contexts", g.num_contexts},
              {"pos_per_context", g.pos_per_context},
              {"neg_per_context", g.neg_per_context},
              {"num_models", g.num_models},
              {"seeds_per_model", g.seeds_per_model},
              {"domain_box", {g.domain.lo, g.domain.hi}},
              {"context_rows", g.context_rows},
              {"seed", g.seed},
              {"num_test_contexts", g.num_test_contexts}};
}

inline GenConfig gen_config_from_json(const json& j) {
  if (!j.is_object()) throw std::runtime_error("gen config: not an object");
  GenConfig g;
  g.n = j.value("n", g.n);
  g.m = j.value("m", g.m);
  g.num_contexts = j.value("num_contexts", g.num_contexts);
  g.pos_per_context = j.value("pos_per_context", g.pos_per_context);
  g.neg_per_context = j.value("neg_per_context", g.neg_per_context);
  g.num_models = j.value("num_models", g.num_models);
  g.seeds_per_model = j.value("seeds_per_model", g.seeds_per_model);
  if (j.contains("domain_box")) {
    const json& box = j.at("domain_box");
    if (!box.is_array() || box.size() != 2) throw std::runtime_error("gen config: domain_box must be [lo, hi]");
    g.domain = {box[0].get<double>(), box[1].get<double>()};
  }
  g.context_rows = j.value("context_rows", g.context_rows);
  g.seed = j.value("seed", g.seed);
  g.num_test_contexts = j.value("num_test_contexts", g.num_test_contexts);
  validate_gen_config(g);
  return g;
}

inline json search_config_to_json(const SearchConfig& s) {
  return json{{"m", s.max_rows},
              {"p", s.restart_probability},
              {"cutoff_seconds", s.cutoff_seconds},
              {"alpha", s.target_accuracy},
              {"seed", s.seed},
              {"strategy", strategy_name(s.strategy)},
              {"max_iterations", s.max_iterations}};
}

inline SearchConfig search_config_from_json(const json& j) {
  if (!j.is_object()) throw std::runtime_error("search config: not an object");
  SearchConfig s;
  s.max_rows = j.value("m", s.max_rows);
  s.restart_probability = j.value("p", s.restart_probability);
  s.cutoff_seconds = j.value("cutoff_seconds", s.cutoff_seconds);
  s.target_accuracy = j.value("alpha", s.target_accuracy);
  s.seed = j.value("seed", s.seed);
  if (j.contains("strategy")) s.strategy = strategy_from_name(j.at("strategy").get<std::string>());
  s.max_iterations = j.value("max_iterations", s.max_iterations);
  validate_search_config(s);
  return s;
}

}  // namespace milpacq
