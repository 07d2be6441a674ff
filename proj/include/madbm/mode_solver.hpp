#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "madbm/dbm.hpp"
#include "madbm/rng.hpp"
#include "madbm/sampler.hpp"

namespace madbm {

/// Ground-state search request. With `clamp` set, the visible layer is fixed.
struct ModeQuery {
  std::optional<BitVector> clamp;
};

struct ModeResult {
  JointState state;
  double energy = 0.0;
  bool exact = false;  ///< true iff produced by exhaustive search
};

/// Largest number of free nodes exact_mode will enumerate.
inline constexpr std::size_t kExactModeGuard = 26;

/// Geometric inverse-temperature ramp over sweeps_per_node * (free nodes)
/// single-bit-flip proposals, repeated `restarts` times.
struct AnnealSchedule {
  double beta_start = 0.1;
  double beta_end = 5.0;
  std::size_t sweeps_per_node = 50;
  std::size_t restarts = 10;
};

enum class SolverKind { Exact, Anneal, Auto };

SolverKind solver_from_string(const std::string& name);
std::string to_string(SolverKind kind);

struct ModeSolverConfig {
  SolverKind kind = SolverKind::Auto;
  AnnealSchedule schedule;
};

std::size_t free_node_count(const LayerShape& shape, const ModeQuery& query);

/// Global energy minimum over all free-node assignments. Ties go to the
/// lexicographically smallest bit string (v, then h1, ...). Throws
/// CapacityError above kExactModeGuard free nodes.
ModeResult exact_mode(const DbmParams& params, const ModeQuery& query);

/// Simulated annealing with the heat-bath acceptance rule; returns the best
/// state visited across all restarts.
ModeResult anneal_mode(const DbmParams& params, const ModeQuery& query,
                       const AnnealSchedule& schedule, Rng& rng);

/// Dispatches on config.kind; Auto is exact up to the enumeration guard.
ModeResult find_mode(const DbmParams& params, const ModeQuery& query,
                     const ModeSolverConfig& config, Rng& rng);

struct ModeStatistics {
  PairStatistics data;   ///< clamped modes, averaged over the batch
  PairStatistics model;  ///< bits of the single free mode
};

ModeStatistics mode_statistics(const DbmParams& params, std::span<const BitVector> batch,
                               const ModeSolverConfig& config, Rng& rng);

}  // namespace madbm
