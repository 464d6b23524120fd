#pragma once
// Binary snapshots ("DWPS"), little-endian:
//   magic[4] version:u32 n_x:u32 n_p:u32 x_min x_max p_min p_max time:f64 kind:u32
// followed by n_x*n_p f64 (W0_REAL) or n_x*n_p*16 complex f64 (FULL_MATRIX),
// x outer, p inner, matrix components row-major.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dw/phase_grid.hpp"
#include "dw/scenario.hpp"

namespace dw {

inline constexpr std::uint32_t kSnapshotVersion = 1;

struct SnapshotHeader {
  std::uint32_t version = kSnapshotVersion;
  std::uint32_t n_x = 0, n_p = 0;
  double x_min = 0, x_max = 0, p_min = 0, p_max = 0;
  double time = 0;
  SnapshotPayload kind = SnapshotPayload::W0_REAL;
};

struct Snapshot {
  SnapshotHeader header;
  std::vector<double> payload;  // W0_REAL: n_x*n_p; FULL_MATRIX: interleaved re,im
};

SnapshotHeader make_header(const PhaseGrid& grid, double time, SnapshotPayload kind);

/// Payload of a field in any representation (converted to X_P internally).
std::vector<double> snapshot_payload(const MatrixPhaseField& q, SnapshotPayload kind);

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap);
void write_snapshot(const std::filesystem::path& path, const MatrixPhaseField& q, double time, SnapshotPayload kind);

/// Throws IoError on magic/version mismatch or truncation.
Snapshot read_snapshot(const std::filesystem::path& path);

/// Rebuilds Q (X_P) from a FULL_MATRIX snapshot.
MatrixPhaseField snapshot_field(const Snapshot& snap);

}  // namespace dw
