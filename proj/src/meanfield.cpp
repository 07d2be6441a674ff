#include "madbm/meanfield.hpp"

#include <algorithm>
#include <cmath>

#include "madbm/errors.hpp"
#include "madbm/numeric.hpp"

namespace madbm {

namespace {

void check_visible(const DbmParams& params, std::span<const Bit> v) {
  if (v.size() != params.shape.visible()) {
    throw ShapeError("visible vector has length " + std::to_string(v.size()) + ", model expects " +
                     std::to_string(params.shape.visible()));
  }
}

void check_mu(const DbmParams& params, const MeanFieldState& mf) {
  if (mf.mu.size() != params.shape.depth()) throw ShapeError("mean-field layer count mismatch");
  for (std::size_t l = 0; l < mf.mu.size(); ++l) {
    if (mf.mu[l].size() != params.shape[l + 1]) throw ShapeError("mean-field layer size mismatch");
    for (double m : mf.mu[l]) {
      if (!(m >= 0.0 && m <= 1.0)) throw DomainError("mean-field marginal outside [0, 1]");
    }
  }
}

}  // namespace

std::vector<double> mf_field(const DbmParams& params, std::span<const Bit> v,
                             const MeanFieldState& mf, std::size_t layer) {
  const std::size_t depth = params.shape.depth();
  std::vector<double> field = params.biases[layer];
  const Matrix& w_below = params.weights[layer - 1];
  if (layer == 1) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i]) continue;
      auto row = w_below.row(i);
      for (std::size_t j = 0; j < field.size(); ++j) field[j] += row[j];
    }
  } else {
    const auto& below = mf.mu[layer - 2];
    for (std::size_t i = 0; i < below.size(); ++i) {
      auto row = w_below.row(i);
      const double m = below[i];
      for (std::size_t j = 0; j < field.size(); ++j) field[j] += m * row[j];
    }
  }
  if (layer < depth) {
    const Matrix& w_above = params.weights[layer];
    const auto& above = mf.mu[layer];
    for (std::size_t i = 0; i < field.size(); ++i) {
      auto row = w_above.row(i);
      double acc = 0.0;
      for (std::size_t j = 0; j < above.size(); ++j) acc += row[j] * above[j];
      field[i] += acc;
    }
  }
  return field;
}

MeanFieldState mf_fixed_point(const DbmParams& params, std::span<const Bit> v,
                              const MeanFieldOptions& opts, Rng& rng) {
  check_visible(params, v);
  if (opts.max_iters < 1) throw DomainError("max_iters must be at least 1");
  if (!(opts.tol > 0.0)) throw DomainError("tol must be positive");

  MeanFieldState mf;
  for (std::size_t l = 1; l < params.shape.layers(); ++l) {
    std::vector<double> mu(params.shape[l]);
    for (double& m : mu) m = rng.uniform();
    mf.mu.push_back(std::move(mu));
  }

  for (std::size_t it = 1; it <= opts.max_iters; ++it) {
    double change = 0.0;
    for (std::size_t l = 1; l < params.shape.layers(); ++l) {
      const auto field = mf_field(params, v, mf, l);
      auto& mu = mf.mu[l - 1];
      for (std::size_t j = 0; j < mu.size(); ++j) {
        const double next = sigmoid(field[j]);
        change = std::max(change, std::abs(next - mu[j]));
        mu[j] = next;
      }
    }
    mf.iterations_used = it;
    mf.residual = change;
    if (change < opts.tol) {
      mf.converged = true;
      break;
    }
  }
  return mf;
}

double mf_entropy(const MeanFieldState& mf) {
  double h = 0.0;
  for (const auto& layer : mf.mu) {
    for (double m : layer) h -= xlogx(m) + xlogx(1.0 - m);
  }
  return h;
}

double elbo(const DbmParams& params, std::span<const Bit> v, const MeanFieldState& mf,
            double log_z) {
  check_visible(params, v);
  check_mu(params, mf);

  // E_r[-E] with independent factors: every product of distinct nodes becomes mu_i mu_j.
  double neg_energy = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i]) neg_energy += params.biases[0][i];
  }
  for (std::size_t l = 1; l < params.shape.layers(); ++l) {
    const auto& mu = mf.mu[l - 1];
    const auto& b = params.biases[l];
    for (std::size_t j = 0; j < mu.size(); ++j) neg_energy += b[j] * mu[j];

    const Matrix& w = params.weights[l - 1];
    for (std::size_t i = 0; i < w.rows(); ++i) {
      const double lower = l == 1 ? static_cast<double>(v[i]) : mf.mu[l - 2][i];
      if (lower == 0.0) continue;
      auto row = w.row(i);
      double acc = 0.0;
      for (std::size_t j = 0; j < mu.size(); ++j) acc += row[j] * mu[j];
      neg_energy += lower * acc;
    }
  }
  return neg_energy - log_z + mf_entropy(mf);
}

}  // namespace madbm
