#include "madbm/io.hpp"

#include <fstream>

#include "madbm/errors.hpp"

namespace madbm {

using nlohmann::json;

json params_to_json(const DbmParams& params) {
  json doc;
  doc["shape"] = params.shape.sizes();
  doc["a"] = params.biases.front();
  doc["b"] = json::array();
  for (std::size_t l = 1; l < params.biases.size(); ++l) doc["b"].push_back(params.biases[l]);
  doc["W"] = json::array();
  for (const Matrix& w : params.weights) {
    json rows = json::array();
    for (std::size_t r = 0; r < w.rows(); ++r) {
      auto row = w.row(r);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    doc["W"].push_back(std::move(rows));
  }
  return doc;
}

DbmParams params_from_json(const json& doc) {
  try {
    DbmParams p;
    p.shape = LayerShape(doc.at("shape").get<std::vector<std::size_t>>());
    p.biases.push_back(doc.at("a").get<std::vector<double>>());
    for (const auto& b : doc.at("b")) p.biases.push_back(b.get<std::vector<double>>());
    for (const auto& w : doc.at("W")) {
      const auto rows = w.get<std::vector<std::vector<double>>>();
      const std::size_t cols = rows.empty() ? 0 : rows.front().size();
      Matrix m(rows.size(), cols);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) throw ShapeError("ragged weight matrix in checkpoint");
        std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
      }
      p.weights.push_back(std::move(m));
    }
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw ShapeError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_params(const std::filesystem::path& path, const DbmParams& params) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << params_to_json(params).dump() << '\n';
}

DbmParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("checkpoint is not valid JSON: ") + e.what(), e.byte);
  }
  return params_from_json(doc);
}

}  // namespace madbm
