#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nitns/driver.hpp"

namespace nitns {

/// Binary state file. Layout, all little-endian:
///   char[8]  magic "NITNS001"
///   u32      format version (1)
///   u32      dim, u32 n, u32 formulation tag
///   f64      nu, delta, g, t, t1
///   u32      restart count
///   u32      number of fields F, then F x u32 component counts
///   f64[]    payloads: each field as row-major physical arrays, component
///            after component, in the declared order
///            (u | omega | w | ell, v [, logdet] [, zeta]).
struct Snapshot {
  Formulation formulation = Formulation::direct;
  int dim = 0;
  int n = 0;
  double nu = 0.0;
  double delta = 0.0;
  double g = 0.0;
  double t = 0.0;
  double t1 = 0.0;
  std::uint32_t restart_count = 0;
  std::vector<PhysicalField> fields;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

std::uint32_t formulation_tag(Formulation f);

Snapshot make_snapshot(const SimState& state, const SolverConfig& config);
/// Rebuilds the evolved state; the EL trackers are restored in the order
/// logdet, zeta when present (a 3-component third field is zeta).
SimState restore_state(const Snapshot& snap, const GridPtr& grid);

void write_snapshot(const std::string& path, const Snapshot& snap);
/// Throws SnapshotError on I/O failure, bad magic, version mismatch,
/// truncation, or (when expect is set) a formulation tag mismatch.
Snapshot read_snapshot(const std::string& path,
                       std::optional<Formulation> expect = std::nullopt);

}  // namespace nitns
