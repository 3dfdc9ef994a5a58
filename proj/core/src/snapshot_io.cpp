#include "tdeuler/snapshot_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

namespace tdeuler {

namespace {

constexpr char kMagic[8] = {'T', 'D', 'E', 'S', 'N', 'A', 'P', '1'};

template <class T>
void put(std::ofstream& os, T x) {
  os.write(reinterpret_cast<const char*>(&x), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
  T x{};
  is.read(reinterpret_cast<char*>(&x), sizeof(T));
  if (!is) throw SnapshotError("truncated snapshot header");
  return x;
}

void put_field(std::ofstream& os, const ScalarField& f) {
  os.write(reinterpret_cast<const char*>(f.data()), static_cast<std::streamsize>(f.size() * sizeof(double)));
}

ScalarField get_field(std::ifstream& is, std::size_t size) {
  ScalarField f(size);
  is.read(reinterpret_cast<char*>(f.data()), static_cast<std::streamsize>(size * sizeof(double)));
  if (!is) throw SnapshotError("truncated snapshot field data");
  return f;
}

}  // namespace

SnapshotFormat parse_snapshot_format(std::string_view s) {
  if (s == "binary") return SnapshotFormat::Binary;
  if (s == "csv") return SnapshotFormat::Csv;
  throw ParameterError("snapshot format must be \"binary\" or \"csv\" (got \"" + std::string(s) + "\")");
}

void write_snapshot(const std::filesystem::path& path, const EulerState& s, const Grid& grid,
                    const GasLaw& g, const DampingLaw& d, SnapshotFormat fmt, bool with_rho) {
  std::optional<PhysicalState> p;
  if (with_rho) p = from_symmetric(s, g);
  const int n = grid.dim();

  if (fmt == SnapshotFormat::Binary) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw SnapshotError("cannot open " + path.string() + " for writing");
    os.write(kMagic, sizeof(kMagic));
    put<std::int32_t>(os, n);
    put<std::int32_t>(os, grid.points());
    put<std::int32_t>(os, n);
    put<std::int32_t>(os, with_rho ? 1 : 0);
    for (double x : {s.t, grid.half_length(), g.gamma, d.lambda, d.mu}) put<double>(os, x);
    put_field(os, s.v);
    for (const auto& c : s.u) put_field(os, c);
    if (p) put_field(os, p->rho);
    if (!os) throw SnapshotError("write failed for " + path.string());
    return;
  }

  std::ofstream os(path);
  if (!os) throw SnapshotError("cannot open " + path.string() + " for writing");
  os.precision(17);
  os << "# t=" << s.t << " n=" << n << " N=" << grid.points() << " L=" << grid.half_length()
     << " gamma=" << g.gamma << " lambda=" << d.lambda << " mu=" << d.mu << '\n';
  for (int a = 0; a < n; ++a) os << 'x' << a + 1 << ',';
  os << 'v';
  for (int a = 0; a < n; ++a) os << ",u" << a + 1;
  if (p) os << ",rho";
  os << '\n';
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (int a = 0; a < n; ++a) os << grid.coord(i, a) << ',';
    os << s.v[i];
    for (int a = 0; a < n; ++a) os << ',' << s.u[a][i];
    if (p) os << ',' << p->rho[i];
    os << '\n';
  }
  if (!os) throw SnapshotError("write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw SnapshotError("cannot open " + path.string());
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw SnapshotError(path.string() + " is not a binary snapshot");
  Snapshot snap;
  snap.header.n = get<std::int32_t>(is);
  snap.header.N = get<std::int32_t>(is);
  const int ncomp = get<std::int32_t>(is);
  const int has_rho = get<std::int32_t>(is);
  snap.header.t = get<double>(is);
  snap.header.L = get<double>(is);
  snap.header.gamma = get<double>(is);
  snap.header.lambda = get<double>(is);
  snap.header.mu = get<double>(is);
  if (snap.header.n < 1 || snap.header.n > 3 || ncomp != snap.header.n || snap.header.N < 1)
    throw SnapshotError("corrupt snapshot header in " + path.string());
  std::size_t size = 1;
  for (int a = 0; a < snap.header.n; ++a) size *= static_cast<std::size_t>(snap.header.N);
  snap.v = get_field(is, size);
  for (int a = 0; a < ncomp; ++a) snap.u.push_back(get_field(is, size));
  if (has_rho) snap.rho = get_field(is, size);
  return snap;
}

}  // namespace tdeuler
