#ifndef MAGNLS_SNAPSHOT_HPP
#define MAGNLS_SNAPSHOT_HPP

#include "magnls/field.hpp"

#include <filesystem>
#include <optional>

namespace magnls {

/// Field snapshot file layout: one JSON header line
///   {"dim":..,"n":..,"length":..,"time":..,"b":..}
/// terminated by '\n', followed by raw little-endian float64 (re, im)
/// pairs in row-major order. WKB snapshots append "h" and "rescaled_time"
/// to the header and store the complex amplitude.
struct SnapshotHeader {
  int dim = 1;
  int n = 0;
  double length = 0.0;
  double time = 0.0;
  double b = 1.0;
  std::optional<double> h;
  std::optional<double> rescaled_time;
};

void write_snapshot(const std::filesystem::path& path, const ComplexField& u,
                    const SnapshotHeader& header);

void write_snapshot(const std::filesystem::path& path, const ComplexField& u,
                    double time, double b);

std::pair<ComplexField, SnapshotHeader>
read_snapshot(const std::filesystem::path& path);

} // namespace magnls

#endif
