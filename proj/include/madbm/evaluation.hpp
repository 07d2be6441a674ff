#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "madbm/data.hpp"
#include "madbm/dbm.hpp"
#include "madbm/rng.hpp"

namespace madbm {

/// log Z estimate in nats. AIS estimates keep their per-run log importance weights.
struct PartitionEstimate {
  double log_z = 0.0;
  bool exact = false;
  std::vector<double> run_log_weights;  ///< empty when exact
  std::size_t n_intermediate = 0;
};

/// Largest parity class that exact evaluation will enumerate.
inline constexpr std::size_t kTraceGuard = 26;

/// Whether exact_log_z and exact marginals are feasible for this shape.
bool exact_evaluable(const LayerShape& shape);

/// Exact log Z: enumerates the smaller parity class and sums the other out analytically.
PartitionEstimate exact_log_z(const DbmParams& params);

/// log sum_h exp(-E(v, h)), hidden parity classes traced the same way.
double unnormalized_log_marginal(const DbmParams& params, std::span<const Bit> v);

double marginal_log_p(const DbmParams& params, std::span<const Bit> v, double log_z);

/// Average per-sample log-likelihood in nats, with an exact partition function.
double exact_avg_ll(const DbmParams& params, const BinaryDataset& data);

/// Sparse probability table over visible states.
struct VisibleDistribution {
  std::vector<BitVector> states;
  std::vector<double> probs;

  /// Empirical distribution; duplicate vectors are merged.
  static VisibleDistribution empirical(const BinaryDataset& data);
};

/// KL(q || p) in nats over the support of q. Throws DomainError if q is not normalized.
double kl_divergence(const VisibleDistribution& q, const DbmParams& params, double log_z);

/// Annealed importance sampling from the uniform distribution along
/// beta_k = k / n_intermediate, one Gibbs sweep per intermediate distribution.
PartitionEstimate ais_log_z(const DbmParams& params, std::size_t n_intermediate,
                            std::size_t n_runs, Rng& rng);

/// Delta-method standard error of log Z from the spread of the run weights.
double ais_log_z_stderr(const PartitionEstimate& estimate);

/// Average unnormalized visible log-probability minus estimate.log_z.
double ais_avg_ll(const DbmParams& params, const BinaryDataset& data,
                  const PartitionEstimate& estimate);

}  // namespace madbm
