#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace sbmlab {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// Shortest decimal string that round-trips the double exactly.
std::string format_double(double v);

/// FNV-1a 64-bit hash, used to fingerprint effective configurations.
std::uint64_t fnv1a(std::string_view data);

/// Hex rendering of a 64-bit hash.
std::string hash_hex(std::uint64_t h);

/// Writes a symmetric matrix as its upper triangle (diagonal included,
/// row-major), little-endian float64, after a fixed header:
///   bytes 0..5  magic "SBMLM1"
///   byte  6     dtype (1 = float64)
///   byte  7     reserved 0
///   bytes 8..15 N as uint64 little-endian
void write_matrix_binary(const std::string& path, const Eigen::MatrixXd& m);

/// Reads a matrix written by write_matrix_binary, reflecting the upper
/// triangle into the lower.
Eigen::MatrixXd read_matrix_binary(const std::string& path);

/// Dense CSV export (one row per line), intended for small N.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);

}  // namespace sbmlab
