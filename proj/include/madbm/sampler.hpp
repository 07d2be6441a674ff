#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "madbm/data.hpp"
#include "madbm/dbm.hpp"
#include "madbm/meanfield.hpp"
#include "madbm/rng.hpp"

namespace madbm {

/// Batch averages of single-node values and of products across connected layers.
///
/// weights[l](i, j) averages x_i x_j for node i of layer l and node j of layer l + 1;
/// biases[l][i] averages x_i.
struct PairStatistics {
  std::vector<std::vector<double>> biases;
  std::vector<Matrix> weights;

  static PairStatistics zeros(const LayerShape& shape);

  /// Adds the products of one configuration given as per-layer values in [0, 1].
  template <typename Layers>
  void accumulate(const Layers& values, double weight = 1.0);

  void scale(double factor);
  bool matches(const LayerShape& shape) const;
};

template <typename Layers>
void PairStatistics::accumulate(const Layers& values, double weight) {
  for (std::size_t l = 0; l < biases.size(); ++l) {
    for (std::size_t i = 0; i < biases[l].size(); ++i) {
      biases[l][i] += weight * static_cast<double>(values[l][i]);
    }
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const auto& lower = values[l];
    const auto& upper = values[l + 1];
    Matrix& w = weights[l];
    for (std::size_t i = 0; i < w.rows(); ++i) {
      const double xi = weight * static_cast<double>(lower[i]);
      if (xi == 0.0) continue;
      auto row = w.row(i);
      for (std::size_t j = 0; j < w.cols(); ++j) row[j] += xi * static_cast<double>(upper[j]);
    }
  }
}

/// One block-Gibbs sweep at inverse temperature `beta`: even layers (v, h2, ...)
/// given odd layers, then odd layers given the new even layers. With
/// `clamp_visible` layer 0 is left untouched.
JointState gibbs_sweep(const DbmParams& params, JointState state, Rng& rng, bool clamp_visible,
                       double beta = 1.0);

/// Resamples one layer from its conditional at inverse temperature `beta`.
void resample_layer(const DbmParams& params, JointState& state, std::size_t layer, Rng& rng,
                    double beta = 1.0);

/// Model-term estimate of CD-k. One chain per batch vector, started at the data
/// vector with hidden layers drawn from `hidden_init`, advanced by k unclamped
/// sweeps; statistics are averaged over the chain endpoints.
PairStatistics cd_statistics(const DbmParams& params, std::span<const BitVector> batch,
                             std::span<const MeanFieldState> hidden_init, std::size_t k, Rng& rng);

/// Data-term statistics with v fixed to each data vector and hidden nodes
/// replaced by their mean-field marginals.
PairStatistics data_statistics_sampled(const DbmParams& params, std::span<const BitVector> batch,
                                       std::span<const MeanFieldState> mf);

}  // namespace madbm
