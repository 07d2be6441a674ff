#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "madbm/dbm.hpp"
#include "madbm/errors.hpp"
#include "madbm/io.hpp"
#include "madbm/numeric.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace madbm;

TEST_CASE("layer shape invariants") {
  CHECK_THROWS_AS(LayerShape({4}), ShapeError);
  CHECK_THROWS_AS(LayerShape({4, 0}), ShapeError);
  const LayerShape s{4, 3, 2};
  CHECK(s.depth() == 2);
  CHECK(s.total_nodes() == 9);
  CHECK(s.parity_nodes(0) == 6);
  CHECK(s.parity_nodes(1) == 3);
}

TEST_CASE("energy") {
  SUBCASE("zero parameters") {
    const auto p = DbmParams::zeros(LayerShape{3, 2, 2});
    Rng rng(1);
    for (int k = 0; k < 10; ++k) CHECK(energy(p, JointState::uniform(p.shape, rng)) == 0.0);
  }
  SUBCASE("three-node chain, hand evaluated") {
    const auto p = fixtures::chain3();
    CHECK(energy(p, JointState::from_code(p.shape, 0b111)) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(energy(p, JointState::zeros(p.shape)) == 0.0);
  }
  SUBCASE("dimension mismatch") {
    const auto p = fixtures::chain3();
    CHECK_THROWS_AS(energy(p, JointState::zeros(LayerShape{2, 1, 1})), ShapeError);
  }
}

TEST_CASE("energy is linear in each weight") {
  Rng rng(7);
  const LayerShape shape{3, 3, 2};
  auto p = fixtures::random_model(shape, rng);
  const auto state = JointState::uniform(shape, rng);
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    for (std::size_t i = 0; i < shape[l]; ++i) {
      for (std::size_t j = 0; j < shape[l + 1]; ++j) {
        const double h = 0.25;
        auto up = p;
        up.weights[l](i, j) += h;
        const double slope = (energy(up, state) - energy(p, state)) / h;
        const double expected = -static_cast<double>(state.layers[l][i] * state.layers[l + 1][j]);
        CHECK(slope == doctest::Approx(expected).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("layer conditional") {
  SUBCASE("zero parameters give one half") {
    const auto p = DbmParams::zeros(LayerShape{3, 2, 4});
    const auto s = JointState::zeros(p.shape);
    for (std::size_t l = 0; l < 3; ++l) {
      for (double x : layer_conditional(p, s, l)) CHECK(x == 0.5);
    }
  }
  SUBCASE("single edge") {
    auto p = DbmParams::zeros(LayerShape{1, 1});
    p.weights[0](0, 0) = 2.0;
    auto s = JointState::zeros(p.shape);
    s.layers[0][0] = 1;
    const auto c = layer_conditional(p, s, 1);
    CHECK(c[0] == doctest::Approx(0.8807970779778823).epsilon(1e-15));
  }
  SUBCASE("index out of range") {
    const auto p = fixtures::chain3();
    CHECK_THROWS_AS(layer_conditional(p, JointState::zeros(p.shape), 3), std::out_of_range);
  }
}

TEST_CASE("layer conditional matches brute-force conditional over the layer") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto shape = fixtures::random_shape(rng, 10);
    const auto p = fixtures::random_model(shape, rng);
    const auto state = JointState::uniform(shape, rng);
    for (std::size_t layer = 0; layer < shape.layers(); ++layer) {
      // enumerate all configurations of `layer` with the rest fixed
      const std::size_t n = shape[layer];
      std::vector<double> log_w;
      std::vector<BitVector> configs;
      for (std::uint64_t c = 0; c < (std::uint64_t{1} << n); ++c) {
        auto s = state;
        for (std::size_t i = 0; i < n; ++i) s.layers[layer][i] = (c >> i) & 1U;
        log_w.push_back(-energy(p, s));
        configs.push_back(s.layers[layer]);
      }
      const double norm = oracle::lse(log_w);
      const auto cond = layer_conditional(p, state, layer);
      for (std::size_t i = 0; i < n; ++i) {
        double p_one = 0.0;
        for (std::size_t k = 0; k < configs.size(); ++k) {
          if (configs[k][i]) p_one += std::exp(log_w[k] - norm);
        }
        CHECK(std::abs(cond[i] - p_one) < 1e-10);
      }
    }
  }
}

TEST_CASE("single-node flips agree with the Gibbs ratio") {
  Rng rng(3);
  const auto shape = LayerShape{3, 2, 2};
  const auto p = fixtures::random_model(shape, rng);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = JointState::uniform(shape, rng);
    for (std::size_t l = 0; l < shape.layers(); ++l) {
      const auto cond = layer_conditional(p, s, l);
      for (std::size_t i = 0; i < shape[l]; ++i) {
        auto on = s;
        auto off = s;
        on.layers[l][i] = 1;
        off.layers[l][i] = 0;
        const double e_on = energy(p, on);
        const double e_off = energy(p, off);
        const double ratio = std::exp(-e_on) / (std::exp(-e_on) + std::exp(-e_off));
        CHECK(std::abs(cond[i] - ratio) < 1e-10);
      }
    }
  }
}

TEST_CASE("parameter counts") {
  CHECK(param_count(LayerShape{24, 22}).total == 574);
  CHECK(param_count(LayerShape{784, 120, 18}).total == 97162);
  CHECK(param_count(LayerShape{1, 1}).total == 3);
  CHECK(param_count(LayerShape{784, 138}).total == 109114);

  // n_RBM = n_v n_h + n_v + n_h and n_DBM = n_v n_h1 + n_h1 n_h2 + n_v + n_h1 + n_h2
  for (std::size_t nv : {5, 30, 100}) {
    for (std::size_t h1 : {1, 7, 20}) {
      for (std::size_t h2 : {1, 3}) {
        CHECK(param_count(LayerShape{nv, h1 + h2}).total == nv * (h1 + h2) + nv + h1 + h2);
        CHECK(param_count(LayerShape{nv, h1, h2}).total == nv * h1 + h1 * h2 + nv + h1 + h2);
      }
    }
  }
  const auto c = param_count(LayerShape{4, 3, 2});
  CHECK(c.weights_per_layer == std::vector<std::size_t>{12, 6});
  CHECK(c.biases_per_layer == std::vector<std::size_t>{4, 3, 2});
}

TEST_CASE("efficiency") {
  CHECK(efficiency(0.0) == 1.0);
  CHECK(efficiency(0.15) == doctest::Approx(1.0 / 1.15).epsilon(1e-15));
  CHECK(efficiency(0.15) == doctest::Approx(0.8696).epsilon(1e-4));
  CHECK_THROWS_AS(efficiency(-0.1), DomainError);

  const double exact = static_cast<double>(param_count(LayerShape{784, 120, 18}).total) /
                       static_cast<double>(param_count(LayerShape{784, 138}).total);
  CHECK(exact == doctest::Approx(0.8905).epsilon(1e-4));
  CHECK(std::abs(exact - efficiency(0.15)) < 0.03);
}

TEST_CASE("exact DBM/RBM ratio approaches its large-n_v limit at rate 1/n_v") {
  const std::size_t h1 = 40, h2 = 6;
  auto ratio = [&](std::size_t nv) {
    return static_cast<double>(param_count(LayerShape{nv, h1, h2}).total) /
           static_cast<double>(param_count(LayerShape{nv, h1 + h2}).total);
  };
  const double limit = static_cast<double>(h1 + 1) / static_cast<double>(h1 + h2 + 1);
  for (std::size_t nv : {1000, 4000, 16000}) {
    const double halving = std::abs(ratio(2 * nv) - limit) / std::abs(ratio(nv) - limit);
    CHECK(halving == doctest::Approx(0.5).epsilon(0.05));
  }
  // the limit itself tends to 1/(1+alpha) as the hidden layers grow
  CHECK(std::abs(limit - efficiency(6.0 / 40.0)) < 0.02);
}

TEST_CASE("checkpoint JSON round trip") {
  Rng rng(5);
  const auto p = fixtures::random_model(LayerShape{5, 3, 2}, rng);
  const auto doc = params_to_json(p);
  CHECK(doc.at("shape") == nlohmann::json({5, 3, 2}));
  CHECK(doc.at("W")[0].size() == 5);
  CHECK(doc.at("W")[0][0].size() == 3);

  const auto path = std::filesystem::temp_directory_path() / "madbm_roundtrip.json";
  save_params(path, p);
  CHECK(load_params(path) == p);
  std::filesystem::remove(path);

  auto bad = doc;
  bad["b"][0].push_back(1.0);
  CHECK_THROWS_AS(params_from_json(bad), ShapeError);
}
