#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "madbm/dbm.hpp"
#include "madbm/rng.hpp"

namespace madbm {

/// Factorial posterior r(h | v): mu[l] holds r(h_i = 1 | v) for hidden layer l + 1.
struct MeanFieldState {
  std::vector<std::vector<double>> mu;
  std::size_t iterations_used = 0;
  bool converged = false;
  double residual = 0.0;
};

struct MeanFieldOptions {
  std::size_t max_iters = 30;
  double tol = 1e-6;
};

/// Iterates the sigmoid fixed-point equations for the hidden marginals given v.
///
/// mu starts uniform in [0, 1]. Each pass updates h1, h2, ... in turn, each
/// layer seeing the freshest values of its neighbours. Stops once the largest
/// change in a pass drops below `tol`; otherwise returns the last iterate with
/// converged = false.
MeanFieldState mf_fixed_point(const DbmParams& params, std::span<const Bit> v,
                              const MeanFieldOptions& opts, Rng& rng);

/// Mean-field input to hidden layer `layer` (1-based) from v and the neighbouring mu.
std::vector<double> mf_field(const DbmParams& params, std::span<const Bit> v,
                             const MeanFieldState& mf, std::size_t layer);

/// Entropy of the factorial distribution, in nats.
double mf_entropy(const MeanFieldState& mf);

/// Variational lower bound on log p(v): E_r[-E(v, h)] - log_z + H(r).
double elbo(const DbmParams& params, std::span<const Bit> v, const MeanFieldState& mf,
            double log_z);

}  // namespace madbm
