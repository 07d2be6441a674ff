#include "madbm/evaluation.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <numbers>

#include "madbm/errors.hpp"
#include "madbm/numeric.hpp"
#include "madbm/sampler.hpp"

namespace madbm {

namespace {

/// Free-layer parity class sizes; layer 0 is excluded when clamped.
std::pair<std::size_t, std::size_t> class_sizes(const LayerShape& shape, bool clamped) {
  std::size_t count[2] = {0, 0};
  for (std::size_t l = clamped ? 1 : 0; l < shape.layers(); ++l) count[l % 2] += shape[l];
  return {count[0], count[1]};
}

/// log sum over all free layers of exp(-E). Free layers of one parity are
/// enumerated in Gray-code order; given them, nodes of the other parity are
/// independent and contribute softplus(field) each.
double traced_log_sum(const DbmParams& params, const BitVector* clamp) {
  const LayerShape& shape = params.shape;
  const std::size_t first = clamp ? 1 : 0;
  const auto [even, odd] = class_sizes(shape, clamp != nullptr);
  const std::size_t enum_parity = even <= odd ? 0 : 1;
  const std::size_t n_enum = enum_parity == 0 ? even : odd;
  if (n_enum > kTraceGuard) {
    throw CapacityError("exact evaluation needs a parity class of at most " +
                        std::to_string(kTraceGuard) + " nodes; smallest has " +
                        std::to_string(n_enum) + " for shape " + shape.to_string());
  }

  JointState state = JointState::zeros(shape);
  if (clamp) state.layers[0] = *clamp;

  std::vector<std::vector<double>> field(shape.layers());
  for (std::size_t l = first; l < shape.layers(); ++l) field[l] = local_field(params, state, l);

  struct Node {
    std::size_t layer;
    std::size_t index;
  };
  std::vector<Node> enumerated;
  std::vector<std::size_t> traced_layers;
  for (std::size_t l = first; l < shape.layers(); ++l) {
    if (l % 2 == enum_parity) {
      for (std::size_t i = 0; i < shape[l]; ++i) enumerated.push_back({l, i});
    } else {
      traced_layers.push_back(l);
    }
  }

  // -E restricted to fixed and enumerated layers; traced layers are all zero here.
  double neg_energy = -energy(params, state);
  auto term = [&] {
    double t = neg_energy;
    for (std::size_t l : traced_layers) {
      for (double f : field[l]) t += softplus(f);
    }
    return t;
  };

  LogSumExp acc;
  acc.add(term());
  const std::uint64_t configs = std::uint64_t{1} << n_enum;
  for (std::uint64_t g = 1; g < configs; ++g) {
    const Node n = enumerated[static_cast<std::size_t>(std::countr_zero(g))];
    Bit& x = state.layers[n.layer][n.index];
    neg_energy += x ? -field[n.layer][n.index] : field[n.layer][n.index];
    x ^= 1;
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
    acc.add(term());
  }
  return acc.value();
}

void check_visible(const DbmParams& params, std::span<const Bit> v) {
  if (v.size() != params.shape.visible()) {
    throw ShapeError("visible vector has length " + std::to_string(v.size()) + ", model expects " +
                     std::to_string(params.shape.visible()));
  }
}

}  // namespace

bool exact_evaluable(const LayerShape& shape) {
  const auto [even, odd] = class_sizes(shape, false);
  const auto [h_even, h_odd] = class_sizes(shape, true);
  return std::min(even, odd) <= kTraceGuard && std::min(h_even, h_odd) <= kTraceGuard;
}

PartitionEstimate exact_log_z(const DbmParams& params) {
  PartitionEstimate est;
  est.log_z = traced_log_sum(params, nullptr);
  est.exact = true;
  return est;
}

double unnormalized_log_marginal(const DbmParams& params, std::span<const Bit> v) {
  check_visible(params, v);
  const BitVector clamp(v.begin(), v.end());
  return traced_log_sum(params, &clamp);
}

double marginal_log_p(const DbmParams& params, std::span<const Bit> v, double log_z) {
  return unnormalized_log_marginal(params, v) - log_z;
}

double exact_avg_ll(const DbmParams& params, const BinaryDataset& data) {
  return ais_avg_ll(params, data, exact_log_z(params));
}

VisibleDistribution VisibleDistribution::empirical(const BinaryDataset& data) {
  if (data.empty()) throw DomainError("empirical distribution of an empty dataset");
  std::map<BitVector, std::size_t> counts;
  for (const auto& v : data.vectors()) ++counts[v];
  VisibleDistribution q;
  for (const auto& [v, c] : counts) {
    q.states.push_back(v);
    q.probs.push_back(static_cast<double>(c) / static_cast<double>(data.size()));
  }
  return q;
}

double kl_divergence(const VisibleDistribution& q, const DbmParams& params, double log_z) {
  if (q.states.size() != q.probs.size()) throw ShapeError("distribution table is ragged");
  double total = 0.0;
  for (double p : q.probs) {
    if (p < 0.0) throw DomainError("negative probability in q");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw DomainError("q is not normalized (sums to " + std::to_string(total) + ")");
  }
  double kl = 0.0;
  for (std::size_t s = 0; s < q.states.size(); ++s) {
    if (q.probs[s] == 0.0) continue;
    kl += q.probs[s] * (std::log(q.probs[s]) - marginal_log_p(params, q.states[s], log_z));
  }
  return kl;
}

PartitionEstimate ais_log_z(const DbmParams& params, std::size_t n_intermediate,
                            std::size_t n_runs, Rng& rng) {
  if (n_intermediate < 1 || n_runs < 1) throw DomainError("AIS needs at least one step and one run");
  const std::uint64_t base = rng.next();
  const double k_total = static_cast<double>(n_intermediate);

  PartitionEstimate est;
  est.n_intermediate = n_intermediate;
  est.run_log_weights.resize(n_runs);
  for (std::size_t r = 0; r < n_runs; ++r) {
    Rng run_rng = Rng::stream(base, r);
    JointState x = JointState::uniform(params.shape, run_rng);
    double log_w = 0.0;
    double prev_beta = 0.0;
    for (std::size_t k = 1; k <= n_intermediate; ++k) {
      const double beta = static_cast<double>(k) / k_total;
      log_w += (beta - prev_beta) * -energy(params, x);
      prev_beta = beta;
      if (k < n_intermediate) x = gibbs_sweep(params, std::move(x), run_rng, false, beta);
    }
    est.run_log_weights[r] = log_w;
  }
  const double log_z0 = static_cast<double>(params.shape.total_nodes()) * std::numbers::ln2;
  est.log_z = log_z0 + log_mean_exp(est.run_log_weights);
  return est;
}

double ais_log_z_stderr(const PartitionEstimate& estimate) {
  const auto& w = estimate.run_log_weights;
  if (w.size() < 2) return 0.0;
  const double shift = log_sum_exp(w);
  double mean = 0.0;
  for (double x : w) mean += std::exp(x - shift);
  mean /= static_cast<double>(w.size());
  double var = 0.0;
  for (double x : w) {
    const double d = std::exp(x - shift) - mean;
    var += d * d;
  }
  var /= static_cast<double>(w.size() - 1);
  return std::sqrt(var / static_cast<double>(w.size())) / mean;
}

double ais_avg_ll(const DbmParams& params, const BinaryDataset& data,
                  const PartitionEstimate& estimate) {
  if (data.empty()) throw DomainError("average log-likelihood of an empty dataset");
  double sum = 0.0;
  for (const auto& v : data.vectors()) sum += unnormalized_log_marginal(params, v);
  return sum / static_cast<double>(data.size()) - estimate.log_z;
}

}  // namespace madbm
