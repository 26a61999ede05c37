#include "sbmlab/io.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sbmlab {

std::string format_double(double v) {
  std::array<char, 32> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  std::array<char, 17> buf;
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf.data(), 16);
}

namespace {
constexpr char kMagic[6] = {'S', 'B', 'M', 'L', 'M', '1'};
}

void write_matrix_binary(const std::string& path, const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("matrix dump expects a square matrix");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  const std::uint64_t n = static_cast<std::uint64_t>(m.rows());
  char header[16] = {};
  std::memcpy(header, kMagic, 6);
  header[6] = 1;  // float64
  header[7] = 0;
  std::memcpy(header + 8, &n, 8);
  out.write(header, sizeof(header));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i; j < m.cols(); ++j) {
      const double v = m(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Eigen::MatrixXd read_matrix_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char header[16];
  in.read(header, sizeof(header));
  if (!in || std::memcmp(header, kMagic, 6) != 0 || header[6] != 1) {
    throw std::runtime_error("bad matrix dump header in " + path);
  }
  std::uint64_t n = 0;
  std::memcpy(&n, header + 8, 8);
  Eigen::MatrixXd m(n, n);
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t j = i; j < n; ++j) {
      double v;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  if (!in) throw std::runtime_error("truncated matrix dump: " + path);
  return m;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

}  // namespace sbmlab
