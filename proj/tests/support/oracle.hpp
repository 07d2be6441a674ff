#pragma once

// Brute-force reference computations over every joint configuration. Only
// usable on tiny models; deliberately shares nothing with the traced
// enumeration, the samplers or the mode solvers under test.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "madbm/data.hpp"
#include "madbm/dbm.hpp"
#include "madbm/sampler.hpp"

namespace oracle {

using madbm::BitVector;
using madbm::DbmParams;
using madbm::JointState;
using madbm::LayerShape;

inline double lse(const std::vector<double>& xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

inline std::vector<JointState> all_states(const LayerShape& shape) {
  std::vector<JointState> out;
  const std::uint64_t n = std::uint64_t{1} << shape.total_nodes();
  out.reserve(n);
  for (std::uint64_t c = 0; c < n; ++c) out.push_back(JointState::from_code(shape, c));
  return out;
}

/// All states whose visible layer equals v.
inline std::vector<JointState> clamped_states(const LayerShape& shape, const BitVector& v) {
  std::vector<JointState> out;
  const std::size_t hidden = shape.total_nodes() - shape.visible();
  for (std::uint64_t c = 0; c < (std::uint64_t{1} << hidden); ++c) {
    JointState s = JointState::from_code(shape, c << shape.visible());
    s.layers[0] = v;
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<BitVector> all_visible(std::size_t n_v) {
  std::vector<BitVector> out;
  for (std::uint64_t c = 0; c < (std::uint64_t{1} << n_v); ++c) {
    BitVector v(n_v);
    for (std::size_t i = 0; i < n_v; ++i) v[i] = (c >> i) & 1U;
    out.push_back(v);
  }
  return out;
}

inline double log_z(const DbmParams& p) {
  std::vector<double> terms;
  for (const auto& s : all_states(p.shape)) terms.push_back(-madbm::energy(p, s));
  return lse(terms);
}

inline double log_unnormalized_marginal(const DbmParams& p, const BitVector& v) {
  std::vector<double> terms;
  for (const auto& s : clamped_states(p.shape, v)) terms.push_back(-madbm::energy(p, s));
  return lse(terms);
}

inline double log_marginal(const DbmParams& p, const BitVector& v) {
  return log_unnormalized_marginal(p, v) - log_z(p);
}

inline double avg_ll(const DbmParams& p, const madbm::BinaryDataset& data) {
  const double lz = log_z(p);
  double s = 0.0;
  for (const auto& v : data.vectors()) s += log_unnormalized_marginal(p, v) - lz;
  return s / static_cast<double>(data.size());
}

/// Probability of each joint state, in all_states order.
inline std::vector<double> joint_distribution(const DbmParams& p) {
  const auto states = all_states(p.shape);
  const double lz = log_z(p);
  std::vector<double> probs;
  for (const auto& s : states) probs.push_back(std::exp(-madbm::energy(p, s) - lz));
  return probs;
}

/// Exact model expectations of x_i and x_i x_j.
inline madbm::PairStatistics model_stats(const DbmParams& p) {
  auto stats = madbm::PairStatistics::zeros(p.shape);
  const auto states = all_states(p.shape);
  const auto probs = joint_distribution(p);
  for (std::size_t k = 0; k < states.size(); ++k) stats.accumulate(states[k].layers, probs[k]);
  return stats;
}

/// Exact data expectations: q(v) p(h | v), averaged over the dataset.
inline madbm::PairStatistics data_stats(const DbmParams& p, const madbm::BinaryDataset& data) {
  auto stats = madbm::PairStatistics::zeros(p.shape);
  for (const auto& v : data.vectors()) {
    const auto states = clamped_states(p.shape, v);
    std::vector<double> terms;
    for (const auto& s : states) terms.push_back(-madbm::energy(p, s));
    const double norm = lse(terms);
    for (std::size_t k = 0; k < states.size(); ++k) {
      stats.accumulate(states[k].layers, std::exp(terms[k] - norm) / static_cast<double>(data.size()));
    }
  }
  return stats;
}

/// Minimum energy with lexicographically smallest bit string on ties.
inline JointState argmin(const DbmParams& p, const BitVector* clamp = nullptr) {
  const auto states = clamp ? clamped_states(p.shape, *clamp) : all_states(p.shape);
  const JointState* best = nullptr;
  double best_e = std::numeric_limits<double>::infinity();
  for (const auto& s : states) {
    const double e = madbm::energy(p, s);
    if (e < best_e || (e == best_e && s.flatten() < best->flatten())) {
      best_e = e;
      best = &s;
    }
  }
  return *best;
}

}  // namespace oracle
