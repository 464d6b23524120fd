#include "dw/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "dw/errors.hpp"
#include "dw/observables.hpp"

namespace dw {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'D', 'W', 'P', 'S'};

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
bool get(std::istream& is, T& v) {
  return static_cast<bool>(is.read(reinterpret_cast<char*>(&v), sizeof v));
}

std::size_t payload_size(const SnapshotHeader& h) {
  const std::size_t n = static_cast<std::size_t>(h.n_x) * h.n_p;
  return h.kind == SnapshotPayload::W0_REAL ? n : 32 * n;
}

}  // namespace

SnapshotHeader make_header(const PhaseGrid& grid, double time, SnapshotPayload kind) {
  SnapshotHeader h;
  h.n_x = static_cast<std::uint32_t>(grid.n_x);
  h.n_p = static_cast<std::uint32_t>(grid.n_p);
  h.x_min = grid.x_min;
  h.x_max = grid.x_max;
  h.p_min = grid.p_min;
  h.p_max = grid.p_max;
  h.time = time;
  h.kind = kind;
  return h;
}

std::vector<double> snapshot_payload(const MatrixPhaseField& q_any, SnapshotPayload kind) {
  const MatrixPhaseField q = q_any.repr() == Representation::X_P ? q_any : converted(q_any, Representation::X_P);
  if (kind == SnapshotPayload::W0_REAL) return w0(q).values;
  const std::size_t n = q.grid().points();
  std::vector<double> out(32 * n, 0.0);
  for (int c = 0; c < 16; ++c) {
    if (!q.active(c)) continue;
    const cplx* d = q.plane(c);
    for (std::size_t k = 0; k < n; ++k) {
      out[32 * k + 2 * c] = d[k].real();
      out[32 * k + 2 * c + 1] = d[k].imag();
    }
  }
  return out;
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
  if (snap.payload.size() != payload_size(snap.header))
    throw IoError("write_snapshot: payload length does not match the header");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(kMagic, 4);
  const SnapshotHeader& h = snap.header;
  put(f, h.version);
  put(f, h.n_x);
  put(f, h.n_p);
  put(f, h.x_min);
  put(f, h.x_max);
  put(f, h.p_min);
  put(f, h.p_max);
  put(f, h.time);
  put(f, static_cast<std::uint32_t>(h.kind));
  f.write(reinterpret_cast<const char*>(snap.payload.data()),
          static_cast<std::streamsize>(snap.payload.size() * sizeof(double)));
  if (!f) throw IoError("write failed for " + path.string());
}

void write_snapshot(const std::filesystem::path& path, const MatrixPhaseField& q, double time, SnapshotPayload kind) {
  write_snapshot(path, Snapshot{make_header(q.grid(), time, kind), snapshot_payload(q, kind)});
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  char magic[4];
  if (!f.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw IoError(path.string() + ": not a DWPS snapshot");
  Snapshot s;
  SnapshotHeader& h = s.header;
  std::uint32_t kind = 0;
  if (!get(f, h.version)) throw IoError(path.string() + ": truncated header");
  if (h.version != kSnapshotVersion)
    throw IoError(path.string() + ": unsupported snapshot version " + std::to_string(h.version));
  if (!(get(f, h.n_x) && get(f, h.n_p) && get(f, h.x_min) && get(f, h.x_max) && get(f, h.p_min) && get(f, h.p_max) &&
        get(f, h.time) && get(f, kind)))
    throw IoError(path.string() + ": truncated header");
  if (kind > 1) throw IoError(path.string() + ": unknown payload kind " + std::to_string(kind));
  h.kind = static_cast<SnapshotPayload>(kind);
  s.payload.resize(payload_size(h));
  if (!f.read(reinterpret_cast<char*>(s.payload.data()), static_cast<std::streamsize>(s.payload.size() * sizeof(double))))
    throw IoError(path.string() + ": truncated payload");
  if (f.peek() != std::char_traits<char>::eof()) throw IoError(path.string() + ": trailing bytes after payload");
  return s;
}

MatrixPhaseField snapshot_field(const Snapshot& snap) {
  const SnapshotHeader& h = snap.header;
  if (h.kind != SnapshotPayload::FULL_MATRIX) throw ConfigError("snapshot_field: needs a FULL_MATRIX snapshot");
  const PhaseGrid g = make_grid(static_cast<int>(h.n_x), static_cast<int>(h.n_p), h.x_min, h.x_max, h.p_min, h.p_max);
  const std::size_t n = g.points();
  ComponentMask mask;
  for (int c = 0; c < 16; ++c)
    for (std::size_t k = 0; k < n && !mask.test(c); ++k)
      if (snap.payload[32 * k + 2 * c] != 0.0 || snap.payload[32 * k + 2 * c + 1] != 0.0) mask.set(c);
  MatrixPhaseField q(g, Representation::X_P, mask);
  for (int c = 0; c < 16; ++c) {
    if (!mask.test(c)) continue;
    cplx* d = q.plane(c);
    for (std::size_t k = 0; k < n; ++k) d[k] = cplx(snap.payload[32 * k + 2 * c], snap.payload[32 * k + 2 * c + 1]);
  }
  return q;
}

}  // namespace dw
