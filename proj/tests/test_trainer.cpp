#include "doctest.h"

#include <cmath>
#include <sstream>

#include "madbm/errors.hpp"
#include "madbm/evaluation.hpp"
#include "madbm/numeric.hpp"
#include "madbm/trainer.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace madbm;

namespace {

TrainConfig small_config(const LayerShape& shape, std::size_t updates) {
  TrainConfig c;
  c.shape = shape;
  c.total_updates = updates;
  c.lr_start = 1.0;
  c.lr_end = 0.01;
  c.schedule = ScheduleParams::standard(updates);
  c.seed = 7;
  return c;
}

bool all_finite_params(const DbmParams& p) { return p.all_finite(); }

}  // namespace

TEST_CASE("mode probability schedule") {
  const std::size_t n = 1000;
  const auto s = ScheduleParams::standard(n);
  CHECK(s.alpha_sched == doctest::Approx(20.0 / 1000.0));
  CHECK(s.beta_sched == -6.0);
  CHECK(s.p_max == 0.1);
  CHECK(mode_probability(0.3 * n, s) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(mode_probability(0.0, s) == doctest::Approx(2.4726e-4).epsilon(1e-4));
  CHECK(mode_probability(static_cast<double>(n), s) == doctest::Approx(0.0999992).epsilon(1e-6));
  CHECK(mode_probability(0.0, ScheduleParams::standard(n, 0.0)) == 0.0);

  double prev = 0.0;
  for (std::size_t k = 0; k <= n; k += 50) {
    const double p = mode_probability(static_cast<double>(k), s);
    CHECK(p >= prev);
    CHECK(p <= 0.1);
    prev = p;
  }
}

TEST_CASE("learning rate decays linearly") {
  auto c = small_config(LayerShape{4, 2}, 1001);
  c.lr_start = 1.0;
  c.lr_end = 0.001;
  CHECK(learning_rate(0, c) == 1.0);
  CHECK(learning_rate(1000, c) == doctest::Approx(0.001).epsilon(1e-14));
  CHECK(learning_rate(500, c) == doctest::Approx(0.5005).epsilon(1e-14));
  c.total_updates = 1;
  CHECK(learning_rate(0, c) == 1.0);
}

TEST_CASE("config validation") {
  auto c = small_config(LayerShape{4, 2}, 10);
  CHECK_NOTHROW(c.validate());
  auto bad = c;
  bad.lr_end = 2.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = c;
  bad.lr_end = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = c;
  bad.schedule.p_max = 1.5;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = c;
  bad.cd_k = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK_THROWS_AS(train(c, shifting_bar(5, 2)), ShapeError);
}

TEST_CASE("gradient step") {
  Rng rng(3);
  const auto p = fixtures::random_model(LayerShape{4, 3, 2}, rng);
  const auto stats = oracle::model_stats(p);

  CHECK(gradient_step(p, stats, stats, 0.7) == p);
  CHECK(gradient_step(p, oracle::data_stats(p, shifting_bar(4, 2)), stats, 0.0) == p);
  CHECK_THROWS_AS(gradient_step(p, PairStatistics::zeros(LayerShape{4, 3}), stats, 0.1), ShapeError);

  SUBCASE("matches finite differences of the exact average log-likelihood") {
    Rng model_rng(10);
    for (int trial = 0; trial < 5; ++trial) {
      const auto shape = fixtures::random_shape(model_rng, 12);
      const auto q = fixtures::random_model(shape, model_rng, 0.5);
      const auto data = shifting_bar(shape.visible() + 1, 1).head(shape.visible());
      const BinaryDataset d(shape.visible(), [&] {
        std::vector<BitVector> vs;
        for (const auto& v : data.vectors()) vs.emplace_back(v.begin(), v.begin() + shape.visible());
        return vs;
      }());
      const double eps = 1.0;
      const auto stepped = gradient_step(q, oracle::data_stats(q, d), oracle::model_stats(q), eps);

      const double h = 1e-5;
      double worst = 0.0;
      auto central = [&](auto&& poke) {
        auto up = q, down = q;
        poke(up, h);
        poke(down, -h);
        return (oracle::avg_ll(up, d) - oracle::avg_ll(down, d)) / (2 * h);
      };
      for (std::size_t l = 0; l < shape.layers(); ++l) {
        for (std::size_t i = 0; i < shape[l]; ++i) {
          const double fd = central([&](DbmParams& m, double dh) { m.biases[l][i] += dh; });
          worst = std::max(worst, std::abs(fd - (stepped.biases[l][i] - q.biases[l][i]) / eps));
        }
      }
      for (std::size_t l = 0; l + 1 < shape.layers(); ++l) {
        for (std::size_t i = 0; i < shape[l]; ++i) {
          for (std::size_t j = 0; j < shape[l + 1]; ++j) {
            const double fd = central([&](DbmParams& m, double dh) { m.weights[l](i, j) += dh; });
            worst = std::max(worst, std::abs(fd - (stepped.weights[l](i, j) - q.weights[l](i, j)) / eps));
          }
        }
      }
      CHECK(worst < 1e-6);
    }
  }
}

TEST_CASE("initial parameters") {
  auto c = small_config(LayerShape{50, 40, 10}, 10);
  Rng rng(1);
  const auto p = initial_params(c, rng);
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (const auto& w : p.weights) {
    for (std::size_t i = 0; i < w.rows(); ++i) {
      for (double x : w.row(i)) {
        sum += x;
        sq += x * x;
        ++n;
      }
    }
  }
  const double sd = std::sqrt(sq / static_cast<double>(n));
  CHECK(std::abs(sum / static_cast<double>(n)) < 3 * 0.01 / std::sqrt(static_cast<double>(n)));
  CHECK(sd == doctest::Approx(0.01).epsilon(0.05));
  for (const auto& b : p.biases) {
    for (double x : b) CHECK(x == 0.0);
  }
}

TEST_CASE("training loop") {
  SUBCASE("p_max = 0 never calls the mode solver") {
    // the exact solver would throw for 40 free nodes
    auto c = small_config(LayerShape{30, 10}, 200);
    c.schedule = ScheduleParams::standard(200, 0.0);
    c.mode_solver.kind = SolverKind::Exact;
    Rng data_rng(2);
    std::vector<BitVector> vs(20, BitVector(30));
    for (auto& v : vs) {
      for (Bit& x : v) x = data_rng.bernoulli(0.3);
    }
    TrainResult r;
    CHECK_NOTHROW(r = train(c, BinaryDataset(30, vs)));
    CHECK(r.trace.mode_updates == 0);

    c.schedule = ScheduleParams::standard(200, 1.0);
    CHECK_THROWS_AS(train(c, BinaryDataset(30, vs)), CapacityError);
  }

  SUBCASE("same seed, same parameters") {
    auto c = small_config(LayerShape{6, 4, 2}, 500);
    const auto d = shifting_bar(6, 3);
    const auto a = train(c, d);
    const auto b = train(c, d);
    CHECK(a.params == b.params);
    CHECK(a.trace.mode_updates == b.trace.mode_updates);
    c.seed = 8;
    CHECK_FALSE(train(c, d).params == a.params);
  }

  SUBCASE("shifting bar (4, 4, 1) gains more than one nat") {
    auto c = small_config(LayerShape{4, 4, 1}, 20000);
    c.eval_every = 5000;
    const auto d = shifting_bar(4, 2);
    const auto r = train(c, d);
    REQUIRE(r.trace.records.size() >= 2);
    const auto& first = r.trace.records.front();
    const auto& last = r.trace.records.back();
    CHECK(first.update == 0);
    CHECK(last.update == 20000);
    CHECK(first.ll_kind == LlKind::Exact);
    // near-zero initial weights give a nearly uniform model
    CHECK(std::abs(first.avg_ll + 4 * std::log(2.0)) < 0.01);
    CHECK(last.avg_ll == doctest::Approx(exact_avg_ll(r.params, d)).epsilon(1e-12));
    MESSAGE("initial LL " << first.avg_ll << ", final LL " << last.avg_ll);
    CHECK(last.avg_ll - first.avg_ll > 1.0);
    CHECK(all_finite_params(r.params));
    for (std::size_t k = 1; k < r.trace.records.size(); ++k) {
      CHECK(r.trace.records[k].update > r.trace.records[k - 1].update);
    }
  }

  SUBCASE("mode-update count follows the schedule") {
    const std::size_t n = 100000;
    auto c = small_config(LayerShape{3, 1, 1}, n);
    c.lr_start = 0.01;
    c.lr_end = 0.001;
    const auto r = train(c, shifting_bar(3, 1));
    double mean = 0.0, var = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      const double p = mode_probability(static_cast<double>(u), c.schedule);
      mean += p;
      var += p * (1.0 - p);
    }
    MESSAGE("mode updates " << r.trace.mode_updates << ", expected " << mean);
    CHECK(std::abs(static_cast<double>(r.trace.mode_updates) - mean) < 3.0 * std::sqrt(var));
  }

  SUBCASE("single hidden layer trains as an RBM") {
    auto c = small_config(LayerShape{6, 6}, 5000);
    c.schedule = ScheduleParams::standard(5000, 0.0);
    const auto d = shifting_bar(6, 3);
    const auto r = train(c, d);
    CHECK(r.trace.mf_unconverged == 0);
    CHECK(r.trace.mode_updates == 0);
    CHECK(r.trace.records.back().avg_ll - r.trace.records.front().avg_ll > 1.0);
    CHECK(all_finite_params(r.params));
  }

  SUBCASE("trace CSV") {
    auto c = small_config(LayerShape{4, 2, 2}, 100);
    c.eval_every = 50;
    const auto r = train(c, shifting_bar(4, 2));
    std::ostringstream out;
    r.trace.write_csv(out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "update,avg_ll,ll_kind,mode_updates_so_far,lr");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
      ++rows;
      CHECK(line.find(",exact,") != std::string::npos);
    }
    CHECK(rows == 3);
  }
}
