#include "madbm/mode_solver.hpp"

#include <cmath>
#include <limits>

#include "madbm/errors.hpp"
#include "madbm/numeric.hpp"

namespace madbm {

SolverKind solver_from_string(const std::string& name) {
  if (name == "exact") return SolverKind::Exact;
  if (name == "anneal") return SolverKind::Anneal;
  if (name == "auto") return SolverKind::Auto;
  throw DomainError("unknown mode solver '" + name + "' (expected exact, anneal or auto)");
}

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Exact:
      return "exact";
    case SolverKind::Anneal:
      return "anneal";
    case SolverKind::Auto:
      return "auto";
  }
  return "auto";
}

namespace {

void check_query(const DbmParams& params, const ModeQuery& query) {
  if (query.clamp && query.clamp->size() != params.shape.visible()) {
    throw ShapeError("clamp length " + std::to_string(query.clamp->size()) +
                     " does not match visible layer " + std::to_string(params.shape.visible()));
  }
}

std::size_t first_free_layer(const ModeQuery& query) { return query.clamp ? 1 : 0; }

JointState initial_state(const LayerShape& shape, const ModeQuery& query) {
  JointState s = JointState::zeros(shape);
  if (query.clamp) s.layers[0] = *query.clamp;
  return s;
}

bool better(double e, const JointState& s, double best_e, const JointState& best) {
  return e < best_e || (e == best_e && s < best);
}

}  // namespace

std::size_t free_node_count(const LayerShape& shape, const ModeQuery& query) {
  return shape.total_nodes() - (query.clamp ? shape.visible() : 0);
}

ModeResult exact_mode(const DbmParams& params, const ModeQuery& query) {
  check_query(params, query);
  const LayerShape& shape = params.shape;
  const std::size_t n_free = free_node_count(shape, query);
  if (n_free > kExactModeGuard) {
    throw CapacityError("exact mode search over " + std::to_string(n_free) +
                        " free nodes exceeds the guard of " + std::to_string(kExactModeGuard));
  }

  // Free layers of one parity are enumerated; the other parity is then
  // conditionally independent and set node-wise to its optimum (0 on ties).
  const std::size_t first = first_free_layer(query);
  std::size_t count[2] = {0, 0};
  for (std::size_t l = first; l < shape.layers(); ++l) count[l % 2] += shape[l];
  const std::size_t enum_parity = count[0] <= count[1] ? 0 : 1;

  JointState state = initial_state(shape, query);
  JointState best_state = state;
  double best_energy = std::numeric_limits<double>::infinity();

  const std::uint64_t configs = std::uint64_t{1} << count[enum_parity];
  for (std::uint64_t code = 0; code < configs; ++code) {
    std::size_t bit = 0;
    for (std::size_t l = first; l < shape.layers(); ++l) {
      if (l % 2 != enum_parity) continue;
      for (Bit& x : state.layers[l]) x = static_cast<Bit>((code >> bit++) & 1U);
    }
    for (std::size_t l = first; l < shape.layers(); ++l) {
      if (l % 2 == enum_parity) continue;
      const auto field = local_field(params, state, l);
      for (std::size_t i = 0; i < field.size(); ++i) state.layers[l][i] = field[i] > 0.0 ? 1 : 0;
    }
    const double e = energy(params, state);
    if (better(e, state, best_energy, best_state)) {
      best_energy = e;
      best_state = state;
    }
  }
  return {std::move(best_state), best_energy, true};
}

ModeResult anneal_mode(const DbmParams& params, const ModeQuery& query,
                       const AnnealSchedule& schedule, Rng& rng) {
  check_query(params, query);
  if (!(schedule.beta_start > 0.0) || !(schedule.beta_end >= schedule.beta_start)) {
    throw DomainError("annealing schedule needs 0 < beta_start <= beta_end");
  }
  const LayerShape& shape = params.shape;
  const std::size_t first = first_free_layer(query);

  struct Node {
    std::size_t layer;
    std::size_t index;
  };
  std::vector<Node> nodes;
  for (std::size_t l = first; l < shape.layers(); ++l) {
    for (std::size_t i = 0; i < shape[l]; ++i) nodes.push_back({l, i});
  }
  const std::size_t proposals = std::max<std::size_t>(1, schedule.sweeps_per_node * nodes.size());
  const double log_ratio = std::log(schedule.beta_end / schedule.beta_start);
  const std::uint64_t base = rng.next();

  ModeResult best{initial_state(shape, query), std::numeric_limits<double>::infinity(), false};
  for (std::size_t r = 0; r < std::max<std::size_t>(1, schedule.restarts); ++r) {
    Rng local = Rng::stream(base, r);
    JointState state = initial_state(shape, query);
    for (std::size_t l = first; l < shape.layers(); ++l) {
      for (Bit& x : state.layers[l]) x = local.bernoulli(0.5) ? 1 : 0;
    }
    std::vector<std::vector<double>> field(shape.layers());
    for (std::size_t l = first; l < shape.layers(); ++l) field[l] = local_field(params, state, l);

    double e = energy(params, state);
    double run_best = e;
    JointState run_best_state = state;

    for (std::size_t t = 0; t < proposals && !nodes.empty(); ++t) {
      const double frac = proposals > 1 ? static_cast<double>(t) / static_cast<double>(proposals - 1) : 1.0;
      const double beta = schedule.beta_start * std::exp(log_ratio * frac);
      const Node n = nodes[local.below(nodes.size())];
      Bit& x = state.layers[n.layer][n.index];
      const double h = field[n.layer][n.index];
      const double delta_e = x ? h : -h;
      if (local.uniform() >= sigmoid(-beta * delta_e)) continue;

      x ^= 1;
      e += delta_e;
      const double sign = x ? 1.0 : -1.0;
      if (n.layer > first) {
        const Matrix& w = params.weights[n.layer - 1];
        auto& f = field[n.layer - 1];
        for (std::size_t k = 0; k < f.size(); ++k) f[k] += sign * w(k, n.index);
      }
      if (n.layer + 1 < shape.layers()) {
        auto row = params.weights[n.layer].row(n.index);
        auto& f = field[n.layer + 1];
        for (std::size_t j = 0; j < f.size(); ++j) f[j] += sign * row[j];
      }
      if (e < run_best) {
        run_best = e;
        run_best_state = state;
      }
    }

    const double exact_e = energy(params, run_best_state);
    if (better(exact_e, run_best_state, best.energy, best.state)) {
      best.energy = exact_e;
      best.state = std::move(run_best_state);
    }
  }
  return best;
}

ModeResult find_mode(const DbmParams& params, const ModeQuery& query,
                     const ModeSolverConfig& config, Rng& rng) {
  switch (config.kind) {
    case SolverKind::Exact:
      return exact_mode(params, query);
    case SolverKind::Anneal:
      return anneal_mode(params, query, config.schedule, rng);
    case SolverKind::Auto:
      break;
  }
  if (free_node_count(params.shape, query) <= kExactModeGuard) return exact_mode(params, query);
  return anneal_mode(params, query, config.schedule, rng);
}

ModeStatistics mode_statistics(const DbmParams& params, std::span<const BitVector> batch,
                               const ModeSolverConfig& config, Rng& rng) {
  if (batch.empty()) throw DomainError("mode statistics need a nonempty batch");
  const std::uint64_t base = rng.next();

  ModeStatistics out{PairStatistics::zeros(params.shape), PairStatistics::zeros(params.shape)};
  Rng model_rng = Rng::stream(base, 0);
  out.model.accumulate(find_mode(params, ModeQuery{}, config, model_rng).state.layers);

  for (std::size_t n = 0; n < batch.size(); ++n) {
    Rng data_rng = Rng::stream(base, n + 1);
    out.data.accumulate(find_mode(params, ModeQuery{batch[n]}, config, data_rng).state.layers);
  }
  out.data.scale(1.0 / static_cast<double>(batch.size()));
  return out;
}

}  // namespace madbm
