#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "enscade/fields.hpp"

namespace enscade {

// Snapshot file format "ENSC1":
//   bytes 0..4   magic "ENSC1"
//   u32          n_per_axis
//   f64          box length L
//   f64          sample time
//   u32          field kind = component count (1 scalar, 3 vector)
//   kind * n^3   f64 node values, x-fastest, components stored contiguously
// All integers and doubles little-endian.

void write_snapshot(const std::filesystem::path& path, const ScalarField& f, double time);
void write_snapshot(const std::filesystem::path& path, const VectorField3& f, double time);

struct SnapshotHeader {
    std::uint32_t n = 0;
    double length = 0.0;
    double time = 0.0;
    std::uint32_t kind = 0;
};

SnapshotHeader read_snapshot_header(const std::filesystem::path& path);
ScalarField read_scalar_snapshot(const std::filesystem::path& path, double* time = nullptr);
VectorField3 read_vector_snapshot(const std::filesystem::path& path, double* time = nullptr);

/// FNV-1a 64-bit checksum of a file, as fixed-width hex.
std::string file_checksum(const std::filesystem::path& path);

}  // namespace enscade
