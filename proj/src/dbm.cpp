#include "madbm/dbm.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "madbm/errors.hpp"
#include "madbm/numeric.hpp"

namespace madbm {

LayerShape::LayerShape(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) {
    throw ShapeError("a layer shape needs a visible layer and at least one hidden layer");
  }
  for (std::size_t n : sizes_) {
    if (n == 0) throw ShapeError("layer sizes must be positive, got " + to_string());
  }
}

std::size_t LayerShape::total_nodes() const {
  return std::accumulate(sizes_.begin(), sizes_.end(), std::size_t{0});
}

std::size_t LayerShape::parity_nodes(std::size_t parity) const {
  std::size_t n = 0;
  for (std::size_t l = parity; l < sizes_.size(); l += 2) n += sizes_[l];
  return n;
}

std::string LayerShape::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < sizes_.size(); ++i) os << (i ? "," : "") << sizes_[i];
  os << ')';
  return os.str();
}

DbmParams DbmParams::zeros(const LayerShape& shape) {
  DbmParams p;
  p.shape = shape;
  for (std::size_t l = 0; l < shape.layers(); ++l) p.biases.emplace_back(shape[l], 0.0);
  for (std::size_t l = 0; l + 1 < shape.layers(); ++l) p.weights.emplace_back(shape[l], shape[l + 1]);
  return p;
}

DbmParams DbmParams::random(const LayerShape& shape, Rng& rng, double weight_std,
                            double bias_std) {
  DbmParams p = zeros(shape);
  for (auto& w : p.weights) {
    for (double& x : w.data()) x = weight_std > 0.0 ? rng.normal(0.0, weight_std) : 0.0;
  }
  if (bias_std > 0.0) {
    for (auto& b : p.biases) {
      for (double& x : b) x = rng.normal(0.0, bias_std);
    }
  }
  return p;
}

void DbmParams::validate() const {
  if (biases.size() != shape.layers() || weights.size() + 1 != shape.layers()) {
    throw ShapeError("parameter layer count does not match shape " + shape.to_string());
  }
  for (std::size_t l = 0; l < shape.layers(); ++l) {
    if (biases[l].size() != shape[l]) {
      throw ShapeError("bias " + std::to_string(l) + " has length " +
                       std::to_string(biases[l].size()) + ", expected " + std::to_string(shape[l]));
    }
  }
  for (std::size_t l = 0; l + 1 < shape.layers(); ++l) {
    if (weights[l].rows() != shape[l] || weights[l].cols() != shape[l + 1]) {
      throw ShapeError("weight matrix " + std::to_string(l + 1) + " is " +
                       std::to_string(weights[l].rows()) + "x" + std::to_string(weights[l].cols()) +
                       ", expected " + std::to_string(shape[l]) + "x" + std::to_string(shape[l + 1]));
    }
  }
  if (!all_finite()) throw DomainError("parameters contain non-finite entries");
}

bool DbmParams::all_finite() const {
  for (const auto& b : biases) {
    for (double x : b) {
      if (!std::isfinite(x)) return false;
    }
  }
  for (const auto& w : weights) {
    for (double x : w.data()) {
      if (!std::isfinite(x)) return false;
    }
  }
  return true;
}

JointState JointState::zeros(const LayerShape& shape) {
  JointState s;
  for (std::size_t n : shape.sizes()) s.layers.emplace_back(n, Bit{0});
  return s;
}

JointState JointState::uniform(const LayerShape& shape, Rng& rng) {
  JointState s = zeros(shape);
  for (auto& layer : s.layers) {
    for (Bit& x : layer) x = rng.bernoulli(0.5) ? 1 : 0;
  }
  return s;
}

JointState JointState::from_code(const LayerShape& shape, std::uint64_t code) {
  JointState s = zeros(shape);
  std::size_t k = 0;
  for (auto& layer : s.layers) {
    for (Bit& x : layer) x = static_cast<Bit>((code >> k++) & 1U);
  }
  return s;
}

BitVector JointState::flatten() const {
  BitVector out;
  for (const auto& layer : layers) out.insert(out.end(), layer.begin(), layer.end());
  return out;
}

bool JointState::matches(const LayerShape& shape) const {
  if (layers.size() != shape.layers()) return false;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].size() != shape[l]) return false;
  }
  return true;
}

namespace {

void require_match(const DbmParams& params, const JointState& state) {
  if (!state.matches(params.shape)) {
    throw ShapeError("state does not match model shape " + params.shape.to_string());
  }
}

}  // namespace

double energy(const DbmParams& params, const JointState& state) {
  require_match(params, state);
  double e = 0.0;
  for (std::size_t l = 0; l < params.shape.layers(); ++l) {
    const auto& x = state.layers[l];
    const auto& b = params.biases[l];
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i]) e -= b[i];
    }
  }
  for (std::size_t l = 0; l + 1 < params.shape.layers(); ++l) {
    const auto& lower = state.layers[l];
    const auto& upper = state.layers[l + 1];
    const Matrix& w = params.weights[l];
    for (std::size_t i = 0; i < lower.size(); ++i) {
      if (!lower[i]) continue;
      auto row = w.row(i);
      for (std::size_t j = 0; j < upper.size(); ++j) {
        if (upper[j]) e -= row[j];
      }
    }
  }
  return e;
}

std::vector<double> local_field(const DbmParams& params, const JointState& state,
                                std::size_t layer) {
  require_match(params, state);
  if (layer >= params.shape.layers()) {
    throw std::out_of_range("layer index " + std::to_string(layer) + " out of range for shape " +
                            params.shape.to_string());
  }
  std::vector<double> field = params.biases[layer];
  if (layer > 0) {
    const Matrix& w = params.weights[layer - 1];
    const auto& below = state.layers[layer - 1];
    for (std::size_t i = 0; i < below.size(); ++i) {
      if (!below[i]) continue;
      auto row = w.row(i);
      for (std::size_t j = 0; j < field.size(); ++j) field[j] += row[j];
    }
  }
  if (layer + 1 < params.shape.layers()) {
    const Matrix& w = params.weights[layer];
    const auto& above = state.layers[layer + 1];
    for (std::size_t i = 0; i < field.size(); ++i) {
      auto row = w.row(i);
      double acc = 0.0;
      for (std::size_t j = 0; j < above.size(); ++j) {
        if (above[j]) acc += row[j];
      }
      field[i] += acc;
    }
  }
  return field;
}

std::vector<double> layer_conditional(const DbmParams& params, const JointState& state,
                                      std::size_t layer, double beta) {
  auto p = local_field(params, state, layer);
  for (double& x : p) x = sigmoid(beta * x);
  return p;
}

ParamCount param_count(const LayerShape& shape) {
  ParamCount c;
  for (std::size_t l = 0; l < shape.layers(); ++l) {
    c.biases_per_layer.push_back(shape[l]);
    c.total += shape[l];
    if (l > 0) {
      c.weights_per_layer.push_back(shape[l - 1] * shape[l]);
      c.total += shape[l - 1] * shape[l];
    }
  }
  return c;
}

double efficiency(double alpha) {
  if (!(alpha >= 0.0)) throw DomainError("topology ratio must be non-negative");
  return 1.0 / (1.0 + alpha);
}

}  // namespace madbm
