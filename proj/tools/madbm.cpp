// Command-line front end: data generation, training, evaluation and ensemble experiments.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "madbm/data.hpp"
#include "madbm/evaluation.hpp"
#include "madbm/harness.hpp"
#include "madbm/io.hpp"
#include "madbm/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out_dir;
  std::optional<std::size_t> threads;
};

/// Dataset flags shared by several subcommands; they override a "dataset" config block.
struct DatasetFlags {
  std::string bits;
  std::string idx;
  std::optional<std::size_t> n_v;
  std::optional<std::size_t> bar_len;
  std::optional<int> threshold;
  std::optional<std::size_t> limit;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--data", bits, "Bit-string dataset file (one vector per line)");
    cmd->add_option("--idx", idx, "IDX image file (binarized by threshold)");
    cmd->add_option("--n-v", n_v, "Shifting-bar visible size");
    cmd->add_option("--bar-len", bar_len, "Shifting-bar bar length (default n_v/2)");
    cmd->add_option("--threshold", threshold, "Binarization threshold for IDX images")->check(CLI::Range(0, 255));
    cmd->add_option("--limit", limit, "Keep only the first N vectors");
  }

  void apply(json& dataset) const {
    if (!bits.empty()) {
      dataset["kind"] = "bits";
      dataset["path"] = bits;
    }
    if (!idx.empty()) {
      dataset["kind"] = "idx";
      dataset["path"] = idx;
    }
    if (n_v) {
      dataset["kind"] = "shifting_bar";
      dataset["n_v"] = *n_v;
    }
    if (bar_len) dataset["bar_len"] = *bar_len;
    if (threshold) dataset["threshold"] = *threshold;
    if (limit) dataset["limit"] = *limit;
  }
};

json read_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return json::parse(in);
}

madbm::DatasetSpec dataset_from(const json& doc) {
  madbm::ExperimentConfig probe = madbm::experiment_from_json(json{{"dataset", doc}});
  return probe.dataset;
}

fs::path out_path(const GlobalOptions& g, const std::string& name) {
  const fs::path dir = g.out_dir.empty() ? fs::path(".") : fs::path(g.out_dir);
  fs::create_directories(dir);
  return dir / name;
}

template <typename T>
void override_key(json& doc, const char* key, const std::optional<T>& value) {
  if (value) doc[key] = *value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint training and evaluation of deep Boltzmann machines"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Random seed (experiment: first ensemble seed)");
  app.add_option("--config", g.config, "JSON configuration file; flags override its keys");
  app.add_option("--out-dir", g.out_dir, "Output directory");
  app.add_option("--threads", g.threads, "Worker threads for ensemble runs");

  // generate-data
  auto* gen = app.add_subcommand("generate-data", "Write a dataset as newline-delimited bit-strings");
  DatasetFlags gen_data;
  gen_data.add_to(gen);
  std::string gen_out = "data.txt";
  gen->add_option("--out", gen_out, "Output file name inside --out-dir");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train one model; writes model.json and trace.csv");
  DatasetFlags train_data;
  train_data.add_to(train_cmd);
  std::vector<std::size_t> shape;
  std::optional<std::size_t> updates, batch, cd_k, eval_every, ais_runs, ais_intermediate, eval_samples;
  std::optional<double> lr_start, lr_end, p_max;
  std::optional<std::string> solver;
  train_cmd->add_option("--shape", shape, "Layer sizes, e.g. --shape 12 10 2");
  train_cmd->add_option("--updates", updates, "Total gradient updates");
  train_cmd->add_option("--lr-start", lr_start, "Initial learning rate");
  train_cmd->add_option("--lr-end", lr_end, "Final learning rate");
  train_cmd->add_option("--batch-size", batch, "Minibatch size (default min(|D|, 100))");
  train_cmd->add_option("--cd-k", cd_k, "Gibbs sweeps per CD chain");
  train_cmd->add_option("--p-max", p_max, "Maximum mode-update probability (0 = plain CD)");
  train_cmd->add_option("--mode-solver", solver, "exact | anneal | auto");
  train_cmd->add_option("--eval-every", eval_every, "Trace evaluation interval in updates");
  train_cmd->add_option("--ais-runs", ais_runs, "AIS runs for trace evaluation of large models");
  train_cmd->add_option("--ais-intermediate", ais_intermediate, "AIS intermediate distributions");
  train_cmd->add_option("--eval-samples", eval_samples, "Evaluate on the first N vectors only");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Average log-likelihood of a checkpoint on a dataset");
  DatasetFlags eval_data;
  eval_data.add_to(eval_cmd);
  std::string model_path;
  std::size_t runs = 100, intermediate = 1000, eval_n = 0;
  bool force_ais = false;
  eval_cmd->add_option("--model", model_path, "Checkpoint JSON")->required();
  eval_cmd->add_option("--runs", runs, "AIS runs");
  eval_cmd->add_option("--intermediate", intermediate, "AIS intermediate distributions");
  eval_cmd->add_option("--eval-samples", eval_n, "Evaluate on the first N vectors only");
  eval_cmd->add_flag("--ais", force_ais, "Use AIS even when exact evaluation is feasible");

  // ais
  auto* ais_cmd = app.add_subcommand("ais", "Estimate log Z of a checkpoint by annealed importance sampling");
  ais_cmd->add_option("--model", model_path, "Checkpoint JSON")->required();
  ais_cmd->add_option("--runs", runs, "AIS runs");
  ais_cmd->add_option("--intermediate", intermediate, "AIS intermediate distributions");

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "Run an ensemble sweep; writes runs.csv and summary.csv");
  DatasetFlags exp_data;
  exp_data.add_to(exp_cmd);
  std::optional<std::size_t> ensemble;
  exp_cmd->add_option("--ensemble", ensemble, "Ensemble size per sweep point");
  exp_cmd->add_option("--updates", updates, "Total gradient updates per run");

  // aggregate
  auto* agg_cmd = app.add_subcommand("aggregate", "Recompute summary.csv from a runs.csv");
  std::string runs_csv;
  agg_cmd->add_option("--runs", runs_csv, "runs.csv produced by experiment")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      json d = read_config(g.config).value("dataset", json::object());
      gen_data.apply(d);
      const auto data = dataset_from(d).load();
      const fs::path p = out_path(g, gen_out);
      madbm::write_bitstrings(p, data);
      std::cout << "wrote " << data.size() << " vectors of dimension " << data.dim() << " to " << p.string() << '\n';
      return 0;
    }

    if (train_cmd->parsed()) {
      json doc = read_config(g.config);
      json d = doc.value("dataset", json::object());
      train_data.apply(d);
      if (!shape.empty()) doc["shape"] = shape;
      override_key(doc, "total_updates", updates);
      override_key(doc, "lr_start", lr_start);
      override_key(doc, "lr_end", lr_end);
      override_key(doc, "batch_size", batch);
      override_key(doc, "cd_k", cd_k);
      override_key(doc, "p_max", p_max);
      override_key(doc, "mode_solver", solver);
      override_key(doc, "eval_every", eval_every);
      override_key(doc, "ais_runs", ais_runs);
      override_key(doc, "ais_intermediate", ais_intermediate);
      override_key(doc, "eval_samples", eval_samples);
      override_key(doc, "seed", g.seed);

      const auto data = dataset_from(d).load();
      madbm::TrainConfig tc;
      tc.shape = madbm::LayerShape(doc.value("shape", std::vector<std::size_t>{data.dim(), 10, 2}));
      tc.total_updates = doc.value("total_updates", std::size_t{10000});
      tc.lr_start = doc.value("lr_start", 1.0);
      tc.lr_end = doc.value("lr_end", 0.001);
      tc.batch_size = doc.value("batch_size", std::size_t{0});
      tc.cd_k = doc.value("cd_k", std::size_t{1});
      tc.schedule = madbm::ScheduleParams::standard(tc.total_updates, doc.value("p_max", 0.1));
      tc.mode_solver.kind = madbm::solver_from_string(doc.value("mode_solver", std::string("auto")));
      tc.eval_every = doc.value("eval_every", std::size_t{0});
      tc.ais_runs = doc.value("ais_runs", std::size_t{0});
      tc.ais_intermediate = doc.value("ais_intermediate", std::size_t{1000});
      tc.eval_samples = doc.value("eval_samples", std::size_t{0});
      tc.seed = doc.value("seed", std::uint64_t{1});

      const auto result = madbm::train(tc, data);
      madbm::save_params(out_path(g, "model.json"), result.params);
      std::ofstream trace(out_path(g, "trace.csv"));
      result.trace.write_csv(trace);
      const auto& last = result.trace.records.back();
      std::cout << "trained " << tc.shape.to_string() << " for " << tc.total_updates << " updates ("
                << result.trace.mode_updates << " mode-driven); final avg_ll=" << last.avg_ll << " ("
                << madbm::to_string(last.ll_kind) << ")\n";
      return 0;
    }

    if (eval_cmd->parsed()) {
      json d = read_config(g.config).value("dataset", json::object());
      eval_data.apply(d);
      const auto params = madbm::load_params(model_path);
      auto data = dataset_from(d).load();
      if (eval_n > 0) data = data.head(eval_n);
      json out;
      madbm::PartitionEstimate est;
      if (!force_ais && madbm::exact_evaluable(params.shape)) {
        est = madbm::exact_log_z(params);
        out["n_runs"] = 0;
        out["n_intermediate"] = 0;
      } else {
        madbm::Rng rng(g.seed.value_or(1));
        est = madbm::ais_log_z(params, intermediate, runs, rng);
        out["n_runs"] = runs;
        out["n_intermediate"] = intermediate;
      }
      out["log_z"] = est.log_z;
      out["exact"] = est.exact;
      out["avg_ll"] = madbm::ais_avg_ll(params, data, est);
      std::cout << out.dump() << '\n';
      if (!g.out_dir.empty()) std::ofstream(out_path(g, "eval.json")) << out.dump(2) << '\n';
      return 0;
    }

    if (ais_cmd->parsed()) {
      const auto params = madbm::load_params(model_path);
      madbm::Rng rng(g.seed.value_or(1));
      const auto est = madbm::ais_log_z(params, intermediate, runs, rng);
      json out{{"log_z", est.log_z},
               {"exact", false},
               {"stderr", madbm::ais_log_z_stderr(est)},
               {"n_runs", runs},
               {"n_intermediate", intermediate},
               {"run_log_weights", est.run_log_weights}};
      std::cout << out.dump() << '\n';
      return 0;
    }

    if (exp_cmd->parsed()) {
      json doc = read_config(g.config);
      json d = doc.value("dataset", json::object());
      exp_data.apply(d);
      doc["dataset"] = d;
      override_key(doc, "ensemble_size", ensemble);
      override_key(doc, "total_updates", updates);
      override_key(doc, "seed_base", g.seed);
      override_key(doc, "threads", g.threads);
      if (!g.out_dir.empty()) doc["out_dir"] = g.out_dir;
      const auto config = madbm::experiment_from_json(doc);
      const auto report = madbm::run_experiment(config);
      madbm::write_summary_csv(std::cout, report.summary);
      return report.all_succeeded ? 0 : 1;
    }

    if (agg_cmd->parsed()) {
      const auto runs_in = madbm::read_runs_csv(runs_csv);
      const auto summary = madbm::summarize(runs_in);
      const fs::path dir = g.out_dir.empty() ? fs::path(runs_csv).parent_path() : fs::path(g.out_dir);
      if (!dir.empty()) fs::create_directories(dir);
      std::ofstream out(dir / "summary.csv");
      madbm::write_summary_csv(out, summary);
      madbm::write_summary_csv(std::cout, summary);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
