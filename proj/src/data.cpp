#include "madbm/data.hpp"

#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "madbm/errors.hpp"

namespace madbm {

BinaryDataset::BinaryDataset(std::size_t dim, std::vector<BitVector> vectors)
    : dim_(dim), vectors_(std::move(vectors)) {
  for (const auto& v : vectors_) {
    if (v.size() != dim_) {
      throw ShapeError("dataset vector has length " + std::to_string(v.size()) + ", expected " +
                       std::to_string(dim_));
    }
    for (Bit b : v) {
      if (b > 1) throw DomainError("dataset entries must be 0 or 1");
    }
  }
}

BinaryDataset BinaryDataset::head(std::size_t n) const {
  n = std::min(n, vectors_.size());
  return BinaryDataset(dim_, std::vector<BitVector>(vectors_.begin(), vectors_.begin() + n));
}

BinaryDataset shifting_bar(std::size_t n_v, std::size_t bar_len) {
  if (bar_len < 1 || bar_len >= n_v) {
    throw DomainError("bar length must satisfy 1 <= bar_len < n_v (got bar_len=" +
                      std::to_string(bar_len) + ", n_v=" + std::to_string(n_v) + ")");
  }
  std::vector<BitVector> vectors;
  for (std::size_t shift = 0; shift < n_v; ++shift) {
    BitVector v(n_v, 0);
    for (std::size_t k = 0; k < bar_len; ++k) v[(shift + k) % n_v] = 1;
    vectors.push_back(std::move(v));
  }
  return BinaryDataset(n_v, std::move(vectors));
}

std::size_t IdxArray::item_size() const {
  std::size_t n = 1;
  for (std::size_t i = 1; i < dims.size(); ++i) n *= dims[i];
  return n;
}

namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> raw, std::size_t offset) {
  if (raw.size() < offset + 4) {
    throw FormatError("truncated IDX header: need 4 bytes, have " +
                          std::to_string(raw.size() - std::min(raw.size(), offset)),
                      offset);
  }
  return (std::uint32_t{raw[offset]} << 24) | (std::uint32_t{raw[offset + 1]} << 16) |
         (std::uint32_t{raw[offset + 2]} << 8) | std::uint32_t{raw[offset + 3]};
}

std::string hex32(std::uint32_t x) {
  std::ostringstream os;
  os << "0x" << std::hex;
  os.width(8);
  os.fill('0');
  os << x;
  return os.str();
}

}  // namespace

IdxArray parse_idx(std::span<const std::uint8_t> raw) {
  IdxArray out;
  out.magic = read_be32(raw, 0);
  std::size_t ndims = 0;
  if (out.magic == kIdxImageMagic) {
    ndims = 3;
  } else if (out.magic == kIdxLabelMagic) {
    ndims = 1;
  } else {
    throw FormatError("bad IDX magic " + hex32(out.magic) + ", expected " +
                          hex32(kIdxImageMagic) + " or " + hex32(kIdxLabelMagic),
                      0);
  }
  std::size_t offset = 4;
  std::size_t payload = 1;
  for (std::size_t d = 0; d < ndims; ++d, offset += 4) {
    out.dims.push_back(read_be32(raw, offset));
    payload *= out.dims.back();
  }
  if (raw.size() - offset < payload) {
    throw FormatError("truncated IDX payload: expected " + std::to_string(payload) +
                          " bytes, found " + std::to_string(raw.size() - offset),
                      raw.size());
  }
  out.bytes.assign(raw.begin() + static_cast<std::ptrdiff_t>(offset),
                   raw.begin() + static_cast<std::ptrdiff_t>(offset + payload));
  return out;
}

IdxArray load_idx(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open IDX file " + path.string());
  std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  return parse_idx(raw);
}

BinaryDataset binarize(const IdxArray& images, std::uint8_t threshold) {
  const std::size_t dim = images.item_size();
  std::vector<BitVector> vectors;
  vectors.reserve(images.items());
  for (std::size_t n = 0; n < images.items(); ++n) {
    BitVector v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = images.bytes[n * dim + i] >= threshold ? 1 : 0;
    vectors.push_back(std::move(v));
  }
  return BinaryDataset(dim, std::move(vectors));
}

void write_bitstrings(const std::filesystem::path& path, const BinaryDataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (const auto& v : data.vectors()) {
    for (Bit b : v) out << (b ? '1' : '0');
    out << '\n';
  }
}

BinaryDataset read_bitstrings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset " + path.string());
  std::vector<BitVector> vectors;
  std::string line;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    const std::size_t line_start = offset;
    offset += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    BitVector v;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] != '0' && line[i] != '1') {
        throw FormatError("dataset line contains non-binary character", line_start + i);
      }
      v.push_back(line[i] == '1');
    }
    if (!vectors.empty() && v.size() != vectors.front().size()) {
      throw FormatError("dataset lines have inconsistent length", line_start);
    }
    vectors.push_back(std::move(v));
  }
  const std::size_t dim = vectors.empty() ? 0 : vectors.front().size();
  return BinaryDataset(dim, std::move(vectors));
}

}  // namespace madbm
