#pragma once

#include <vector>

#include "madbm/dbm.hpp"
#include "madbm/rng.hpp"

namespace fixtures {

/// Shape (1,1,1): a=[1], b1=[-1], b2=[0.5], W1=[[2]], W2=[[-3]].
inline madbm::DbmParams chain3() {
  auto p = madbm::DbmParams::zeros(madbm::LayerShape{1, 1, 1});
  p.biases[0][0] = 1.0;
  p.biases[1][0] = -1.0;
  p.biases[2][0] = 0.5;
  p.weights[0](0, 0) = 2.0;
  p.weights[1](0, 0) = -3.0;
  return p;
}

/// Weights and biases drawn N(0, 1).
inline madbm::DbmParams random_model(const madbm::LayerShape& shape, madbm::Rng& rng, double stddev = 1.0) {
  return madbm::DbmParams::random(shape, rng, stddev, stddev);
}

/// Random two-hidden-layer shape with at most `max_nodes` nodes in total.
inline madbm::LayerShape random_shape(madbm::Rng& rng, std::size_t max_nodes) {
  for (;;) {
    const std::size_t depth = 1 + rng.below(3);
    std::vector<std::size_t> sizes{1 + rng.below(6)};
    for (std::size_t l = 0; l < depth; ++l) sizes.push_back(1 + rng.below(5));
    std::size_t total = 0;
    for (auto n : sizes) total += n;
    if (total <= max_nodes) return madbm::LayerShape(sizes);
  }
}

}  // namespace fixtures
