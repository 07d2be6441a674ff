#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "madbm/data.hpp"
#include "madbm/dbm.hpp"
#include "madbm/meanfield.hpp"
#include "madbm/mode_solver.hpp"
#include "madbm/rng.hpp"
#include "madbm/sampler.hpp"

namespace madbm {

/// Sigmoid ramp for the probability of a mode-driven update:
/// p_max * sigmoid(alpha_sched * n + beta_sched), n in [0, total].
struct ScheduleParams {
  double alpha_sched = 20.0;
  double beta_sched = -6.0;
  double p_max = 0.1;
  std::size_t total = 1;

  /// alpha = 20 / N, beta = -6, p_max = 0.1.
  static ScheduleParams standard(std::size_t total, double p_max = 0.1);
};

double mode_probability(double n, const ScheduleParams& sched);

enum class LlKind { Exact, Ais, None };
std::string to_string(LlKind kind);

struct TrainConfig {
  LayerShape shape;
  std::size_t total_updates = 1;
  double lr_start = 1.0;
  double lr_end = 0.001;
  std::size_t batch_size = 0;  ///< 0 selects min(|D|, 100)
  std::size_t cd_k = 1;
  /// Indexed by gradient update: n = update index, total = total_updates.
  ScheduleParams schedule;
  ModeSolverConfig mode_solver;
  MeanFieldOptions mean_field;
  double init_weight_std = 0.01;
  std::uint64_t seed = 0;
  std::size_t eval_every = 0;  ///< 0 records only the initial and final model
  /// AIS settings for trace evaluation of models too large for exact evaluation;
  /// ais_runs = 0 leaves such records empty.
  std::size_t ais_runs = 0;
  std::size_t ais_intermediate = 1000;
  /// Trace log-likelihoods average over the first eval_samples vectors; 0 uses all.
  std::size_t eval_samples = 0;

  void validate() const;
};

/// Linear decay from lr_start at the first update to lr_end at the last.
double learning_rate(std::size_t update_index, const TrainConfig& config);

/// w += eps * (data - model) for every weight and bias.
void apply_gradient(DbmParams& params, const PairStatistics& data_stats,
                    const PairStatistics& model_stats, double eps);
DbmParams gradient_step(const DbmParams& params, const PairStatistics& data_stats,
                        const PairStatistics& model_stats, double eps);

struct TraceRecord {
  std::size_t update = 0;  ///< number of gradient updates applied so far
  double avg_ll = 0.0;
  LlKind ll_kind = LlKind::None;
  std::size_t mode_updates = 0;
  double mf_converged_rate = 1.0;  ///< fraction of mean-field solves that converged
  double lr = 0.0;
};

struct TrainTrace {
  std::vector<TraceRecord> records;
  std::size_t mode_updates = 0;
  std::size_t mf_solves = 0;
  std::size_t mf_unconverged = 0;

  /// Columns: update, avg_ll, ll_kind, mode_updates_so_far, lr.
  void write_csv(std::ostream& out) const;
};

struct TrainResult {
  DbmParams params;
  TrainTrace trace;
};

/// Initial parameters: weights N(0, init_weight_std^2), zero biases.
DbmParams initial_params(const TrainConfig& config, Rng& rng);

/// Joint training: each update draws a minibatch and, with probability
/// mode_probability(update), takes a mode-driven step; otherwise a CD-k step
/// with a mean-field data term.
TrainResult train(const TrainConfig& config, const BinaryDataset& data, Rng& rng);
TrainResult train(const TrainConfig& config, const BinaryDataset& data);

}  // namespace madbm
