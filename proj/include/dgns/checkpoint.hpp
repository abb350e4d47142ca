#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "dgns/grid.hpp"

namespace dgns {

/// Errors raised by the checkpoint reader, classified so callers can tell
/// a missing file from a corrupt one.
class CheckpointError : public std::runtime_error {
 public:
  enum class Kind { io, bad_magic, bad_version, truncated, bad_header };

  CheckpointError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct Checkpoint {
  double time = 0.0;
  VelocityField field;
};

/// Binary snapshot format: magic "DGNS", u32 version (= 1), u64 grid size
/// n, f64 box length, f64 time, then the three velocity components as
/// n^3 f64 values in x-major node order. All integers and floats are
/// little-endian. Writes go to a temporary file in the same directory and
/// are renamed into place, so readers never observe a partial file.
void write_checkpoint(const VelocityField& u, double time, const std::filesystem::path& path);

Checkpoint read_checkpoint(const std::filesystem::path& path,
                           double dealias_fraction = 2.0 / 3.0);

/// Loads every *.dgns file in a directory, sorts by stored time, and
/// assembles a trajectory (snapshot times must be uniformly spaced).
Trajectory load_checkpoint_dir(const std::filesystem::path& dir,
                               double dealias_fraction = 2.0 / 3.0);

}  // namespace dgns
