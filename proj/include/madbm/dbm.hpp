#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "madbm/rng.hpp"

namespace madbm {

using Bit = std::uint8_t;
using BitVector = std::vector<Bit>;

/// Layer sizes [n_v, n_h1, ..., n_hL]. At least one hidden layer; L = 1 is an RBM.
class LayerShape {
 public:
  LayerShape() = default;
  explicit LayerShape(std::vector<std::size_t> sizes);
  LayerShape(std::initializer_list<std::size_t> sizes)
      : LayerShape(std::vector<std::size_t>(sizes)) {}

  std::size_t layers() const { return sizes_.size(); }
  /// Number of hidden layers.
  std::size_t depth() const { return sizes_.size() - 1; }
  std::size_t operator[](std::size_t i) const { return sizes_[i]; }
  std::size_t visible() const { return sizes_.front(); }
  std::size_t total_nodes() const;
  /// Nodes in layers of the given parity (0: v, h2, ...; 1: h1, h3, ...).
  std::size_t parity_nodes(std::size_t parity) const;
  const std::vector<std::size_t>& sizes() const { return sizes_; }

  std::string to_string() const;

  friend bool operator==(const LayerShape&, const LayerShape&) = default;

 private:
  std::vector<std::size_t> sizes_;
};

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Weights and biases of a layered Boltzmann machine.
///
/// `biases[0]` is the visible bias `a`, `biases[i]` the bias of hidden layer i.
/// `weights[i]` couples layer i (rows) to layer i + 1 (columns), so the
/// matrix called W^(i+1) in the usual notation is stored at index i.
struct DbmParams {
  LayerShape shape;
  std::vector<std::vector<double>> biases;
  std::vector<Matrix> weights;

  static DbmParams zeros(const LayerShape& shape);
  /// Weights drawn N(0, weight_std^2); biases N(0, bias_std^2).
  static DbmParams random(const LayerShape& shape, Rng& rng, double weight_std,
                          double bias_std = 0.0);

  /// Throws ShapeError on inconsistent dimensions, DomainError on non-finite entries.
  void validate() const;
  bool all_finite() const;

  friend bool operator==(const DbmParams&, const DbmParams&) = default;
};

/// One binary configuration (v, h1, ..., hL).
struct JointState {
  std::vector<BitVector> layers;

  static JointState zeros(const LayerShape& shape);
  static JointState uniform(const LayerShape& shape, Rng& rng);
  /// Decodes bit `k` of `code` into the k-th node in v, h1, ... order.
  static JointState from_code(const LayerShape& shape, std::uint64_t code);

  /// Concatenated bits in v, h1, ... order.
  BitVector flatten() const;
  bool matches(const LayerShape& shape) const;

  friend bool operator==(const JointState&, const JointState&) = default;
  friend auto operator<=>(const JointState& a, const JointState& b) {
    return a.layers <=> b.layers;
  }
};

/// Negative log of the unnormalized Boltzmann weight of `state`.
double energy(const DbmParams& params, const JointState& state);

/// Bias plus input from adjacent layers, for every node in `layer`.
std::vector<double> local_field(const DbmParams& params, const JointState& state,
                                std::size_t layer);

/// p(node = 1 | neighbours) for every node of `layer`, at inverse temperature `beta`.
std::vector<double> layer_conditional(const DbmParams& params, const JointState& state,
                                      std::size_t layer, double beta = 1.0);

struct ParamCount {
  std::size_t total = 0;
  std::vector<std::size_t> weights_per_layer;  ///< n_{i-1} * n_i for i = 1..L
  std::vector<std::size_t> biases_per_layer;   ///< n_i for i = 0..L
};

ParamCount param_count(const LayerShape& shape);

/// Asymptotic DBM/RBM parameter ratio 1 / (1 + alpha) for alpha = n_h2 / n_h1.
double efficiency(double alpha);

}  // namespace madbm
