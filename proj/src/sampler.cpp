#include "madbm/sampler.hpp"

#include "madbm/errors.hpp"
#include "madbm/numeric.hpp"

namespace madbm {

PairStatistics PairStatistics::zeros(const LayerShape& shape) {
  PairStatistics s;
  for (std::size_t l = 0; l < shape.layers(); ++l) s.biases.emplace_back(shape[l], 0.0);
  for (std::size_t l = 0; l + 1 < shape.layers(); ++l) s.weights.emplace_back(shape[l], shape[l + 1]);
  return s;
}

void PairStatistics::scale(double factor) {
  for (auto& b : biases) {
    for (double& x : b) x *= factor;
  }
  for (auto& w : weights) {
    for (double& x : w.data()) x *= factor;
  }
}

bool PairStatistics::matches(const LayerShape& shape) const {
  if (biases.size() != shape.layers() || weights.size() + 1 != shape.layers()) return false;
  for (std::size_t l = 0; l < shape.layers(); ++l) {
    if (biases[l].size() != shape[l]) return false;
    if (l + 1 < shape.layers() &&
        (weights[l].rows() != shape[l] || weights[l].cols() != shape[l + 1])) {
      return false;
    }
  }
  return true;
}

void resample_layer(const DbmParams& params, JointState& state, std::size_t layer, Rng& rng,
                    double beta) {
  const auto field = local_field(params, state, layer);
  auto& x = state.layers[layer];
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform() < sigmoid(beta * field[i]) ? 1 : 0;
}

JointState gibbs_sweep(const DbmParams& params, JointState state, Rng& rng, bool clamp_visible,
                       double beta) {
  if (!state.matches(params.shape)) throw ShapeError("chain state does not match model shape");
  for (std::size_t parity : {0, 1}) {
    for (std::size_t l = parity; l < params.shape.layers(); l += 2) {
      if (l == 0 && clamp_visible) continue;
      resample_layer(params, state, l, rng, beta);
    }
  }
  return state;
}

PairStatistics cd_statistics(const DbmParams& params, std::span<const BitVector> batch,
                             std::span<const MeanFieldState> hidden_init, std::size_t k, Rng& rng) {
  if (batch.empty()) throw DomainError("contrastive divergence needs a nonempty batch");
  if (k < 1) throw DomainError("CD-k needs k >= 1");
  if (hidden_init.size() != batch.size()) {
    throw ShapeError("one mean-field initialisation per batch vector is required");
  }

  const std::uint64_t base = rng.next();
  PairStatistics stats = PairStatistics::zeros(params.shape);
  for (std::size_t c = 0; c < batch.size(); ++c) {
    Rng chain_rng = Rng::stream(base, c);
    JointState state;
    state.layers.push_back(batch[c]);
    for (const auto& mu : hidden_init[c].mu) {
      BitVector h(mu.size());
      for (std::size_t j = 0; j < mu.size(); ++j) h[j] = chain_rng.bernoulli(mu[j]) ? 1 : 0;
      state.layers.push_back(std::move(h));
    }
    for (std::size_t step = 0; step < k; ++step) {
      state = gibbs_sweep(params, std::move(state), chain_rng, false);
    }
    stats.accumulate(state.layers);
  }
  stats.scale(1.0 / static_cast<double>(batch.size()));
  return stats;
}

PairStatistics data_statistics_sampled(const DbmParams& params, std::span<const BitVector> batch,
                                       std::span<const MeanFieldState> mf) {
  if (batch.empty()) throw DomainError("data statistics need a nonempty batch");
  if (mf.size() != batch.size()) throw ShapeError("one mean-field state per batch vector is required");

  PairStatistics stats = PairStatistics::zeros(params.shape);
  std::vector<std::vector<double>> values(params.shape.layers());
  for (std::size_t n = 0; n < batch.size(); ++n) {
    if (batch[n].size() != params.shape.visible()) throw ShapeError("batch vector length mismatch");
    values[0].assign(batch[n].begin(), batch[n].end());
    for (std::size_t l = 1; l < values.size(); ++l) values[l] = mf[n].mu[l - 1];
    stats.accumulate(values);
  }
  stats.scale(1.0 / static_cast<double>(batch.size()));
  return stats;
}

}  // namespace madbm
