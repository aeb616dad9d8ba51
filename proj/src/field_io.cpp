#include "harnacklab/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace harnack {

namespace {

void put_le(std::ostream& os, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  char buf[8];
  for (int i = 0; i < 8; ++i) {
    buf[i] = static_cast<char>(bits & 0xffu);
    bits >>= 8;
  }
  os.write(buf, 8);
}

double get_le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | p[i];
  return std::bit_cast<double>(bits);
}

}  // namespace

void save_field(const std::filesystem::path& path, const ScalarField& field) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open '" + path.string() + "' for writing");
  const Grid& g = field.grid();
  os << "FLD1 " << g.dim() << ' ' << g.n() << ' ' << to_string(field.role()) << '\n';
  for (double v : field.values()) put_le(os, v);
  if (!os) throw Error("write failed for '" + path.string() + "'");
}

ScalarField load_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open '" + path.string() + "'");
  std::string header;
  if (!std::getline(is, header)) throw Error("bad magic: empty file '" + path.string() + "'");
  std::istringstream hs(header);
  std::string magic, role;
  int dim = 0, n = 0;
  hs >> magic;
  if (magic != "FLD1") throw Error("bad magic in '" + path.string() + "'");
  if (!(hs >> dim >> n >> role)) throw Error("malformed FLD1 header in '" + path.string() + "'");
  std::string extra;
  if (hs >> extra) throw Error("malformed FLD1 header in '" + path.string() + "'");
  const Grid grid(dim, n);
  const Role r = role_from_string(role);

  std::vector<unsigned char> payload((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (payload.size() != grid.size() * 8)
    throw Error("size mismatch in '" + path.string() + "': expected " + std::to_string(grid.size() * 8) +
                " payload bytes, found " + std::to_string(payload.size()));
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = get_le(payload.data() + 8 * i);
    if (!std::isfinite(values[i])) throw Error("non-finite payload value at node " + std::to_string(i));
  }
  return {grid, std::move(values), r};
}

}  // namespace harnack
