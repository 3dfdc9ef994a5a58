#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "tdeuler/snapshot_io.hpp"

using namespace tdeuler;
namespace fs = std::filesystem;

TEST_SUITE("snapshot_io") {

TEST_CASE("binary round trip") {
  const Grid g(2, 3.0, 16);
  EulerState s{2.5, g.zeros(), g.zeros_vector()};
  for (std::size_t i = 0; i < g.size(); ++i) {
    s.v[i] = 0.01 * i;
    s.u[0][i] = -0.02 * i;
    s.u[1][i] = 1.0 / (1.0 + i);
  }
  const GasLaw gas{2.0};
  const DampingLaw d{0.3, 1.5};
  const fs::path p = fs::temp_directory_path() / "tdeuler-snap-test.bin";
  write_snapshot(p, s, g, gas, d, SnapshotFormat::Binary, true);
  const Snapshot back = read_snapshot(p);
  CHECK(back.header.t == 2.5);
  CHECK(back.header.n == 2);
  CHECK(back.header.N == 16);
  CHECK(back.header.L == 3.0);
  CHECK(back.header.lambda == 0.3);
  CHECK(back.header.mu == 1.5);
  CHECK(back.v == s.v);
  CHECK(back.u == s.u);
  REQUIRE(back.rho.has_value());
  CHECK((*back.rho)[10] == doctest::Approx(std::pow(1.0 + 0.5 * 0.1, 2.0)));

  // truncated files are rejected
  const std::string bytes = oracle::slurp(p.string());
  std::ofstream(p, std::ios::binary) << bytes.substr(0, bytes.size() / 2);
  CHECK_THROWS_AS(read_snapshot(p), SnapshotError);
  std::ofstream(p, std::ios::binary) << "NOTASNAPSHOT";
  CHECK_THROWS_AS(read_snapshot(p), SnapshotError);
  fs::remove(p);
}

TEST_CASE("csv layout") {
  const Grid g(1, 1.0, 16);
  EulerState s{1.0, g.zeros(), g.zeros_vector()};
  const fs::path p = fs::temp_directory_path() / "tdeuler-snap-test.csv";
  write_snapshot(p, s, g, GasLaw{2.0}, DampingLaw{}, SnapshotFormat::Csv, false);
  std::ifstream is(p);
  std::string l1, l2;
  std::getline(is, l1);
  std::getline(is, l2);
  CHECK(l1.rfind("# t=1", 0) == 0);
  CHECK(l2 == "x1,v,u1");
  int rows = 0;
  for (std::string l; std::getline(is, l);) ++rows;
  CHECK(rows == 16);
  fs::remove(p);
  CHECK(parse_snapshot_format("csv") == SnapshotFormat::Csv);
  CHECK_THROWS(parse_snapshot_format("hdf5"));
}

}  // TEST_SUITE
