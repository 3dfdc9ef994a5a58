#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string_view>

#include "tdeuler/euler.hpp"

namespace tdeuler {

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SnapshotFormat { Binary, Csv };

SnapshotFormat parse_snapshot_format(std::string_view s);

struct SnapshotHeader {
  double t = 0.0;
  int n = 1;
  int N = 16;
  double L = 1.0;
  double gamma = 2.0;
  double lambda = 0.0;
  double mu = 0.0;
};

struct Snapshot {
  SnapshotHeader header;
  ScalarField v;
  VectorField u;
  std::optional<ScalarField> rho;
};

/// Binary layout (little-endian host order): "TDESNAP1", int32 n, N, ncomp,
/// has_rho, doubles t, L, gamma, lambda, mu, then v, u_1..u_n, [rho].
/// CSV: "# t=.. n=.. N=.. L=.. gamma=.. lambda=.. mu=.." then a header row
/// x1[,x2,x3],v,u1[,u2,u3][,rho] and one row per grid point.
void write_snapshot(const std::filesystem::path& path, const EulerState& s, const Grid& grid,
                    const GasLaw& g, const DampingLaw& d, SnapshotFormat fmt, bool with_rho);

/// Reads the binary format.
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace tdeuler
