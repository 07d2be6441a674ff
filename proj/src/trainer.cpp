#include "madbm/trainer.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "madbm/errors.hpp"
#include "madbm/evaluation.hpp"
#include "madbm/numeric.hpp"

namespace madbm {

ScheduleParams ScheduleParams::standard(std::size_t total, double p_max) {
  if (total < 1) throw DomainError("schedule horizon must be at least 1");
  return {20.0 / static_cast<double>(total), -6.0, p_max, total};
}

double mode_probability(double n, const ScheduleParams& sched) {
  return sched.p_max * sigmoid(sched.alpha_sched * n + sched.beta_sched);
}

std::string to_string(LlKind kind) {
  switch (kind) {
    case LlKind::Exact:
      return "exact";
    case LlKind::Ais:
      return "ais";
    case LlKind::None:
      return "none";
  }
  return "none";
}

void TrainConfig::validate() const {
  if (total_updates < 1) throw DomainError("total_updates must be at least 1");
  if (!(lr_end > 0.0) || !(lr_start >= lr_end)) {
    throw DomainError("learning rates must satisfy lr_start >= lr_end > 0");
  }
  if (cd_k < 1) throw DomainError("cd_k must be at least 1");
  if (!(schedule.p_max >= 0.0 && schedule.p_max <= 1.0)) throw DomainError("p_max must lie in [0, 1]");
  if (schedule.total < 1) throw DomainError("schedule horizon must be at least 1");
}

double learning_rate(std::size_t update_index, const TrainConfig& config) {
  if (config.total_updates <= 1) return config.lr_start;
  const double t = static_cast<double>(update_index) / static_cast<double>(config.total_updates - 1);
  return config.lr_start + (config.lr_end - config.lr_start) * t;
}

void apply_gradient(DbmParams& params, const PairStatistics& data_stats,
                    const PairStatistics& model_stats, double eps) {
  if (!data_stats.matches(params.shape) || !model_stats.matches(params.shape)) {
    throw ShapeError("statistics do not match model shape " + params.shape.to_string());
  }
  for (std::size_t l = 0; l < params.biases.size(); ++l) {
    auto& b = params.biases[l];
    for (std::size_t i = 0; i < b.size(); ++i) {
      b[i] += eps * (data_stats.biases[l][i] - model_stats.biases[l][i]);
    }
  }
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    auto& w = params.weights[l].data();
    const auto& d = data_stats.weights[l].data();
    const auto& m = model_stats.weights[l].data();
    for (std::size_t k = 0; k < w.size(); ++k) w[k] += eps * (d[k] - m[k]);
  }
}

DbmParams gradient_step(const DbmParams& params, const PairStatistics& data_stats,
                        const PairStatistics& model_stats, double eps) {
  DbmParams next = params;
  apply_gradient(next, data_stats, model_stats, eps);
  return next;
}

void TrainTrace::write_csv(std::ostream& out) const {
  out << "update,avg_ll,ll_kind,mode_updates_so_far,lr\n";
  char buf[64];
  for (const auto& r : records) {
    out << r.update << ',';
    if (r.ll_kind == LlKind::None) {
      out << "nan";
    } else {
      std::snprintf(buf, sizeof buf, "%.17g", r.avg_ll);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", r.lr);
    out << ',' << to_string(r.ll_kind) << ',' << r.mode_updates << ',' << buf << '\n';
  }
}

DbmParams initial_params(const TrainConfig& config, Rng& rng) {
  return DbmParams::random(config.shape, rng, config.init_weight_std, 0.0);
}

namespace {

TraceRecord evaluate(const DbmParams& params, const BinaryDataset& data, const TrainConfig& config,
                     std::size_t update, const TrainTrace& trace, double lr, Rng& eval_rng) {
  TraceRecord rec;
  rec.update = update;
  rec.mode_updates = trace.mode_updates;
  rec.lr = lr;
  rec.mf_converged_rate =
      trace.mf_solves == 0
          ? 1.0
          : 1.0 - static_cast<double>(trace.mf_unconverged) / static_cast<double>(trace.mf_solves);
  const BinaryDataset subset = config.eval_samples > 0 ? data.head(config.eval_samples) : data;
  if (exact_evaluable(params.shape)) {
    rec.avg_ll = exact_avg_ll(params, subset);
    rec.ll_kind = LlKind::Exact;
  } else if (config.ais_runs > 0) {
    const auto est = ais_log_z(params, config.ais_intermediate, config.ais_runs, eval_rng);
    rec.avg_ll = ais_avg_ll(params, subset, est);
    rec.ll_kind = LlKind::Ais;
  }
  return rec;
}

}  // namespace

TrainResult train(const TrainConfig& config, const BinaryDataset& data, Rng& rng) {
  config.validate();
  if (data.empty()) throw DomainError("training needs a nonempty dataset");
  if (data.dim() != config.shape.visible()) {
    throw ShapeError("dataset dimension " + std::to_string(data.dim()) +
                     " does not match visible layer of " + config.shape.to_string());
  }

  TrainResult result{initial_params(config, rng), {}};
  DbmParams& params = result.params;
  TrainTrace& trace = result.trace;
  Rng eval_rng = Rng::stream(rng.next(), 0);

  const std::size_t batch_size =
      config.batch_size > 0 ? std::min(config.batch_size, data.size()) : std::min<std::size_t>(data.size(), 100);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();

  std::vector<BitVector> batch;
  std::vector<MeanFieldState> mf;
  trace.records.push_back(evaluate(params, data, config, 0, trace, learning_rate(0, config), eval_rng));

  for (std::size_t u = 0; u < config.total_updates; ++u) {
    if (cursor >= order.size()) {
      std::shuffle(order.begin(), order.end(), rng.engine());
      cursor = 0;
    }
    batch.clear();
    for (std::size_t n = 0; n < batch_size && cursor < order.size(); ++n) batch.push_back(data[order[cursor++]]);

    const double lr = learning_rate(u, config);
    const bool mode_step = rng.bernoulli(mode_probability(static_cast<double>(u), config.schedule));
    if (mode_step) {
      const auto stats = mode_statistics(params, batch, config.mode_solver, rng);
      apply_gradient(params, stats.data, stats.model, lr);
      ++trace.mode_updates;
    } else {
      const std::uint64_t mf_base = rng.next();
      mf.clear();
      for (std::size_t n = 0; n < batch.size(); ++n) {
        Rng mf_rng = Rng::stream(mf_base, n);
        mf.push_back(mf_fixed_point(params, batch[n], config.mean_field, mf_rng));
        ++trace.mf_solves;
        if (!mf.back().converged) ++trace.mf_unconverged;
      }
      const auto data_stats = data_statistics_sampled(params, batch, mf);
      const auto model_stats = cd_statistics(params, batch, mf, config.cd_k, rng);
      apply_gradient(params, data_stats, model_stats, lr);
    }

    const bool last = u + 1 == config.total_updates;
    if (last || (config.eval_every > 0 && (u + 1) % config.eval_every == 0)) {
      trace.records.push_back(evaluate(params, data, config, u + 1, trace, lr, eval_rng));
    }
  }
  return result;
}

TrainResult train(const TrainConfig& config, const BinaryDataset& data) {
  Rng rng(config.seed);
  return train(config, data, rng);
}

}  // namespace madbm
