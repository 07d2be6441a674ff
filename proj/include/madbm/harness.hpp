#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "madbm/data.hpp"
#include "madbm/dbm.hpp"
#include "madbm/trainer.hpp"

namespace madbm {

/// CD: two-hidden-layer DBM with CD only. MA: same DBM with mode-assisted
/// updates. RBM-CD: one hidden layer of n_h_total nodes, CD only.
enum class Method { CD, MA, RbmCD };
Method method_from_string(const std::string& name);
std::string to_string(Method m);

struct DatasetSpec {
  std::string kind = "shifting_bar";  ///< shifting_bar | idx | bits
  std::size_t n_v = 12;
  std::size_t bar_len = 0;            ///< 0 selects n_v / 2
  std::string path;                   ///< IDX image file or bit-string file
  int threshold = 128;
  std::size_t limit = 0;              ///< keep only the first `limit` vectors; 0 keeps all

  BinaryDataset load() const;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  std::vector<Method> methods{Method::MA, Method::CD};
  std::vector<std::size_t> n_h_totals{12};
  std::vector<double> alpha_topos{0.2};
  std::size_t total_updates = 100000;
  double lr_start = 1.0;
  double lr_end = 0.001;
  std::size_t batch_size = 0;
  std::size_t cd_k = 1;
  double p_max = 0.1;
  std::string mode_solver = "auto";
  std::size_t ensemble_size = 10;
  std::uint64_t seed_base = 1;
  std::string out_dir = "results";
  std::size_t threads = 1;
  std::size_t eval_every = 0;
  std::size_t ais_runs = 100;
  std::size_t ais_intermediate = 1000;
  std::size_t eval_samples = 0;

  void validate() const;
};

ExperimentConfig experiment_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& config);

/// Two-hidden-layer split: n_h1 = round(n_h_total / (1 + alpha)), n_h2 = rest, both >= 1.
LayerShape resolve_shape(std::size_t n_v, std::size_t n_h_total, double alpha_topo);

/// Training configuration of one ensemble member.
TrainConfig run_config(const ExperimentConfig& config, Method method, std::size_t n_v,
                       std::size_t n_h_total, double alpha_topo, std::uint64_t seed);

struct Aggregate {
  double median = 0.0;
  double p5 = 0.0;
  double p95 = 0.0;
};

/// Median (mean of the central pair for even counts) and nearest-rank 5th/95th percentiles.
Aggregate aggregate(std::span<const double> values);

struct RunRecord {
  Method method = Method::MA;
  std::size_t n_v = 0;
  std::size_t n_h_total = 0;
  double alpha_topo = 0.0;
  std::uint64_t seed = 0;
  double final_avg_ll = 0.0;
  std::string ll_kind;  ///< exact | ais | failed
  double wall_seconds = 0.0;
  std::string error;
};

struct SummaryRow {
  Method method = Method::MA;
  std::size_t n_v = 0;
  std::size_t n_h_total = 0;
  double alpha_topo = 0.0;
  std::size_t n_runs = 0;
  Aggregate stats;
};

struct ExperimentReport {
  std::vector<RunRecord> runs;
  std::vector<SummaryRow> summary;
  bool all_succeeded = true;
};

/// One summary row per sweep point, in order of first appearance. Failed runs are
/// skipped; a point with no successful run has n_runs = 0 and NaN statistics.
std::vector<SummaryRow> summarize(std::span<const RunRecord> runs);

void write_runs_csv(std::ostream& out, std::span<const RunRecord> runs);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);
std::vector<RunRecord> read_runs_csv(const std::filesystem::path& path);

/// Trains and evaluates every (sweep point, seed) pair on a worker pool and
/// writes runs.csv and summary.csv into config.out_dir. Rows are ordered by
/// sweep point, then seed.
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace madbm
