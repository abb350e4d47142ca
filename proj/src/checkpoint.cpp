#include "dgns/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace dgns {
namespace {

constexpr char kMagic[4] = {'D', 'G', 'N', 'S'};
constexpr std::uint32_t kVersion = 1;

// The format is defined as little-endian; this code targets little-endian
// hosts and writes native byte order directly.
static_assert(std::endian::native == std::endian::little,
              "checkpoint serialization assumes a little-endian host");

template <typename T>
void write_raw(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_raw(std::ifstream& in, T& value, const std::filesystem::path& path) {
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) {
    throw CheckpointError(CheckpointError::Kind::truncated,
                          "checkpoint truncated while reading header: " + path.string());
  }
}

}  // namespace

void write_checkpoint(const VelocityField& u, double time, const std::filesystem::path& path) {
  const GridSpec& grid = u.grid();
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw CheckpointError(CheckpointError::Kind::io,
                            "cannot open checkpoint for writing: " + tmp.string());
    }
    out.write(kMagic, sizeof(kMagic));
    write_raw(out, kVersion);
    write_raw(out, static_cast<std::uint64_t>(grid.n));
    write_raw(out, grid.box_length);
    write_raw(out, time);
    for (int c = 0; c < 3; ++c) {
      const std::span<const double> values = u.component(c).values();
      out.write(reinterpret_cast<const char*>(values.data()),
                static_cast<std::streamsize>(values.size() * sizeof(double)));
    }
    out.flush();
    if (!out) {
      throw CheckpointError(CheckpointError::Kind::io,
                            "write failed for checkpoint: " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw CheckpointError(CheckpointError::Kind::io,
                          "cannot move checkpoint into place: " + ec.message());
  }
}

Checkpoint read_checkpoint(const std::filesystem::path& path, double dealias_fraction) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CheckpointError(CheckpointError::Kind::io,
                          "cannot open checkpoint: " + path.string());
  }
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError(CheckpointError::Kind::bad_magic,
                          "not a checkpoint file (bad magic): " + path.string());
  }
  std::uint32_t version = 0;
  read_raw(in, version, path);
  if (version != kVersion) {
    throw CheckpointError(CheckpointError::Kind::bad_version,
                          "unsupported checkpoint version " + std::to_string(version) + ": " +
                              path.string());
  }
  std::uint64_t n = 0;
  double box_length = 0.0;
  double time = 0.0;
  read_raw(in, n, path);
  read_raw(in, box_length, path);
  read_raw(in, time, path);
  if (n < 2 || n > (1u << 20) || !std::isfinite(box_length) || box_length <= 0.0 ||
      !std::isfinite(time)) {
    throw CheckpointError(CheckpointError::Kind::bad_header,
                          "checkpoint header out of range: " + path.string());
  }

  GridSpec grid;
  grid.n = static_cast<int>(n);
  grid.box_length = box_length;
  grid.dealias_fraction = dealias_fraction;
  grid.validate();

  Checkpoint cp{time, VelocityField(grid)};
  for (int c = 0; c < 3; ++c) {
    const std::span<double> values = cp.field.component(c).values();
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(values.size() * sizeof(double))) {
      throw CheckpointError(CheckpointError::Kind::truncated,
                            "checkpoint truncated in component data: " + path.string());
    }
  }
  return cp;
}

Trajectory load_checkpoint_dir(const std::filesystem::path& dir, double dealias_fraction) {
  std::vector<Checkpoint> checkpoints;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.path().extension() == ".dgns") {
      checkpoints.push_back(read_checkpoint(entry.path(), dealias_fraction));
    }
  }
  if (ec) {
    throw CheckpointError(CheckpointError::Kind::io,
                          "cannot list checkpoint directory: " + dir.string());
  }
  if (checkpoints.size() < 2) {
    throw CheckpointError(CheckpointError::Kind::io,
                          "need at least two checkpoints in: " + dir.string());
  }
  std::sort(checkpoints.begin(), checkpoints.end(),
            [](const Checkpoint& a, const Checkpoint& b) { return a.time < b.time; });

  Trajectory traj;
  traj.grid = checkpoints.front().field.grid();
  for (Checkpoint& cp : checkpoints) {
    traj.times.push_back(cp.time);
    traj.snapshots.push_back(std::move(cp.field));
  }
  traj.dt = traj.times[1] - traj.times[0];
  traj.validate();
  return traj;
}

}  // namespace dgns
