#include <bit>
#include <cstring>
#include <fstream>

#include "lcl/lab.hpp"

namespace lcl {

namespace {

constexpr char kMagic[4] = {'L', 'C', 'L', '1'};
constexpr uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

void put_u32(std::ostream& out, uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }
void put_u64(std::ostream& out, uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); }
void put_f64(std::ostream& out, double v) { out.write(reinterpret_cast<const char*>(&v), 8); }

uint32_t get_u32(std::istream& in) {
  uint32_t v;
  in.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
uint64_t get_u64(std::istream& in) {
  uint64_t v;
  in.read(reinterpret_cast<char*>(&v), 8);
  return v;
}
double get_f64(std::istream& in) {
  double v;
  in.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

}  // namespace

void checkpoint_save(const SimCheckpoint& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("checkpoint_save: cannot open " + path);
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, uint32_t(c.state.u.kmax()));
  put_f64(out, c.state.t);
  for (double a : c.state.u.raw()) put_f64(out, a);
  put_f64(out, c.particle.x[0]);
  put_f64(out, c.particle.x[1]);
  put_f64(out, c.particle.v[0]);
  put_f64(out, c.particle.v[1]);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) put_f64(out, c.tangent.a(i, j));
  put_u64(out, c.rng_seed);
  put_u64(out, c.rng_stream);
  put_u64(out, c.rng_counter);
  put_u32(out, uint32_t(c.accumulators.size()));
  for (double a : c.accumulators) put_f64(out, a);
  if (!out) throw ConfigError("checkpoint_save: write failed for " + path);
}

SimCheckpoint checkpoint_load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("checkpoint_load: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw ConfigError("checkpoint_load: bad magic in " + path);
  const uint32_t version = get_u32(in);
  if (version != kVersion)
    throw ConfigError("checkpoint_load: unsupported format version in " + path);

  SimCheckpoint c;
  const uint32_t kmax = get_u32(in);
  if (kmax < 1 || kmax > 4096) throw ConfigError("checkpoint_load: corrupt truncation");
  c.state.u = SpectralVelocity(int(kmax));
  c.state.t = get_f64(in);
  for (double& a : c.state.u.raw()) a = get_f64(in);
  c.particle.x[0] = get_f64(in);
  c.particle.x[1] = get_f64(in);
  c.particle.v[0] = get_f64(in);
  c.particle.v[1] = get_f64(in);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c.tangent.a(i, j) = get_f64(in);
  c.rng_seed = get_u64(in);
  c.rng_stream = get_u64(in);
  c.rng_counter = get_u64(in);
  const uint32_t nacc = get_u32(in);
  if (nacc > (1u << 24)) throw ConfigError("checkpoint_load: corrupt accumulator count");
  c.accumulators.resize(nacc);
  for (double& a : c.accumulators) a = get_f64(in);
  if (!in) throw ConfigError("checkpoint_load: truncated file " + path);
  return c;
}

}  // namespace lcl
