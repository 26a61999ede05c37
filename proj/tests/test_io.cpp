#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "sbmlab/io.hpp"
#include "sbmlab/rng.hpp"
#include "test_util.hpp"

using namespace sbmlab;

namespace {

std::filesystem::path temp_file(const std::string& tag) {
  return std::filesystem::temp_directory_path() /
         ("sbmlab_io_test_" + tag + "_" + std::to_string(::getpid()));
}

}  // namespace

TEST_CASE("format_double round-trips exactly") {
  std::vector<double> values = {0.0,
                                -0.0,
                                1.0,
                                -1.0,
                                0.1,
                                1.0 / 3.0,
                                3.141592653589793,
                                1e-300,
                                -1e300,
                                5e-324,  // smallest subnormal
                                std::numeric_limits<double>::max(),
                                std::numeric_limits<double>::min(),
                                9970.074812967581};
  Rng rng(Seed{701, 0}, 1);
  for (int i = 0; i < 200; ++i) {
    values.push_back((rng.next_double() - 0.5) *
                     std::pow(10.0, 300.0 * (rng.next_double() - 0.5)));
  }
  for (double v : values) {
    const std::string s = format_double(v);
    const double back = std::strtod(s.c_str(), nullptr);
    CHECK(back == v);
  }
}

TEST_CASE("fnv1a known vectors") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("hash_hex renders 16 lowercase hex digits") {
  CHECK(hash_hex(0xcbf29ce484222325ULL) == "cbf29ce484222325");
  CHECK(hash_hex(0x0ULL) == "0000000000000000");
  CHECK(hash_hex(0xff) == "00000000000000ff");
  CHECK(hash_hex(fnv1a("foobar")) == "85944171f73967e8");
}

TEST_CASE("binary matrix round trip is exact") {
  Rng rng(Seed{703, 0}, 1);
  const Eigen::MatrixXd m = testutil::random_symmetric(17, rng);
  const auto path = temp_file("roundtrip");
  write_matrix_binary(path.string(), m);
  const Eigen::MatrixXd back = read_matrix_binary(path.string());
  REQUIRE(back.rows() == 17);
  REQUIRE(back.cols() == 17);
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back - back.transpose()).cwiseAbs().maxCoeff() == 0.0);
  std::filesystem::remove(path);
}

TEST_CASE("binary matrix header bytes") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 2.0, 2.0, 3.0;
  const auto path = temp_file("header");
  write_matrix_binary(path.string(), m);

  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  // Header (16) plus 3 upper-triangle float64 values.
  REQUIRE(bytes.size() == 16 + 3 * 8);
  CHECK(bytes[0] == 'S');
  CHECK(bytes[1] == 'B');
  CHECK(bytes[2] == 'M');
  CHECK(bytes[3] == 'L');
  CHECK(bytes[4] == 'M');
  CHECK(bytes[5] == '1');
  CHECK(bytes[6] == 1);  // float64 dtype tag
  CHECK(bytes[7] == 0);  // reserved
  std::uint64_t n = 0;
  for (int i = 0; i < 8; ++i) {
    n |= static_cast<std::uint64_t>(bytes[8 + i]) << (8 * i);
  }
  CHECK(n == 2);  // little-endian size

  // Payload is the upper triangle row-major: 1.0, 2.0, 3.0.
  double payload[3];
  std::memcpy(payload, bytes.data() + 16, sizeof(payload));
  CHECK(payload[0] == 1.0);
  CHECK(payload[1] == 2.0);
  CHECK(payload[2] == 3.0);
  std::filesystem::remove(path);
}

TEST_CASE("binary matrix reader validation") {
  const auto path = temp_file("bad");
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOTMAGIC" << std::string(8, '\0');
  }
  CHECK_THROWS(read_matrix_binary(path.string()));
  CHECK_THROWS(read_matrix_binary((path / "missing").string()));
  std::filesystem::remove(path);
}

TEST_CASE("csv matrix export parses back exactly") {
  Rng rng(Seed{705, 0}, 1);
  Eigen::MatrixXd m = testutil::random_symmetric(6, rng);
  m(0, 5) = 1e-300;
  m(5, 0) = 1e-300;
  const auto path = temp_file("csv");
  write_matrix_csv(path.string(), m);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    int col = 0;
    while (std::getline(ss, cell, ',')) {
      CHECK(std::strtod(cell.c_str(), nullptr) == m(row, col));
      ++col;
    }
    CHECK(col == 6);
    ++row;
  }
  CHECK(row == 6);
  std::filesystem::remove(path);
}
