#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "madbm/dbm.hpp"

namespace madbm {

/// Binary visible vectors of a common dimension; each vector has weight 1/|D|.
class BinaryDataset {
 public:
  BinaryDataset() = default;
  BinaryDataset(std::size_t dim, std::vector<BitVector> vectors);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  bool empty() const { return vectors_.empty(); }
  const BitVector& operator[](std::size_t i) const { return vectors_[i]; }
  const std::vector<BitVector>& vectors() const { return vectors_; }

  /// First `n` vectors (or all, if fewer).
  BinaryDataset head(std::size_t n) const;

 private:
  std::size_t dim_ = 0;
  std::vector<BitVector> vectors_;
};

/// The n_v cyclic shifts of a block of `bar_len` ones starting at bit 0.
BinaryDataset shifting_bar(std::size_t n_v, std::size_t bar_len);

/// Raw IDX array: big-endian dimensions followed by unsigned bytes.
struct IdxArray {
  std::uint32_t magic = 0;
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> bytes;

  /// Product of all dimensions after the first.
  std::size_t item_size() const;
  std::size_t items() const { return dims.empty() ? 0 : dims.front(); }
};

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// Parses an unsigned-byte IDX file (images or labels). Throws FormatError.
IdxArray load_idx(const std::filesystem::path& path);
IdxArray parse_idx(std::span<const std::uint8_t> raw);

/// pixel >= threshold -> 1; each item flattened to one vector.
BinaryDataset binarize(const IdxArray& images, std::uint8_t threshold = 128);

/// One bit-string per line, e.g. "110000".
void write_bitstrings(const std::filesystem::path& path, const BinaryDataset& data);
BinaryDataset read_bitstrings(const std::filesystem::path& path);

}  // namespace madbm
