#include "lipforge/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace lipforge {

namespace {

// The format is little-endian; this code targets little-endian hosts and
// writes native byte order.
static_assert(std::endian::native == std::endian::little);

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw FieldIoError("truncated payload");
  return v;
}

}  // namespace

std::size_t FieldData::lattice_size() const {
  std::size_t n = 1;
  for (auto c : counts) n *= c;
  return n;
}

void write_field(const FieldData& field, const std::string& path) {
  if (field.counts.size() != field.d || field.origin.size() != field.d ||
      field.spacing.size() != field.d)
    throw FieldIoError("inconsistent field header");
  if (field.samples.size() != field.D * field.lattice_size())
    throw FieldIoError("sample count does not match header");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FieldIoError("cannot open '" + path + "' for writing");
  out.write("LIPX", 4);
  put(out, std::uint32_t{1});
  put(out, field.d);
  put(out, field.D);
  for (auto c : field.counts) put(out, c);
  for (std::uint32_t k = 0; k < field.d; ++k) put(out, field.origin[k]);
  for (std::uint32_t k = 0; k < field.d; ++k) put(out, field.spacing[k]);
  out.write(reinterpret_cast<const char*>(field.samples.data()),
            static_cast<std::streamsize>(field.samples.size() * sizeof(double)));
  if (!out) throw FieldIoError("write failed on '" + path + "'");
}

FieldData read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FieldIoError("cannot open '" + path + "'");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "LIPX", 4) != 0)
    throw FieldIoError("bad magic, not a LIPX file");
  if (get<std::uint32_t>(in) != 1) throw FieldIoError("unsupported version");
  FieldData f;
  f.d = get<std::uint32_t>(in);
  f.D = get<std::uint32_t>(in);
  if (f.d == 0 || f.d > static_cast<std::uint32_t>(kMaxDim) || f.D == 0)
    throw FieldIoError("implausible dimensions in header");
  f.counts.resize(f.d);
  for (auto& c : f.counts) c = get<std::uint32_t>(in);
  f.origin = Vec(f.d);
  f.spacing = Vec(f.d);
  for (std::uint32_t k = 0; k < f.d; ++k) f.origin[k] = get<double>(in);
  for (std::uint32_t k = 0; k < f.d; ++k) f.spacing[k] = get<double>(in);
  f.samples.resize(f.D * f.lattice_size());
  in.read(reinterpret_cast<char*>(f.samples.data()),
          static_cast<std::streamsize>(f.samples.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(f.samples.size() * sizeof(double)))
    throw FieldIoError("truncated payload");
  return f;
}

FieldData sample_stack(const BumpStack& u, const Vec& lo, const Vec& hi,
                       const std::vector<std::uint32_t>& counts) {
  FieldData f;
  f.d = static_cast<std::uint32_t>(u.dim());
  f.D = static_cast<std::uint32_t>(u.out_dim());
  if (counts.size() != f.d) throw FieldIoError("counts do not match dimension");
  for (auto c : counts)
    if (c < 2) throw FieldIoError("lattice needs >= 2 samples per axis");
  f.counts = counts;
  f.origin = lo;
  f.spacing = Vec(f.d);
  for (std::uint32_t k = 0; k < f.d; ++k)
    f.spacing[k] = (hi[k] - lo[k]) / (counts[k] - 1);
  const std::size_t n = f.lattice_size();
  f.samples.resize(f.D * n);
  std::vector<std::uint32_t> ix(f.d, 0);
  Vec x(f.d);
  for (std::size_t flat = 0; flat < n; ++flat) {
    for (std::uint32_t k = 0; k < f.d; ++k) x[k] = lo[k] + ix[k] * f.spacing[k];
    Vec v = u.eval(x);
    for (std::uint32_t c = 0; c < f.D; ++c) f.samples[c * n + flat] = v[c];
    for (int k = static_cast<int>(f.d) - 1; k >= 0; --k) {
      if (++ix[k] < f.counts[k]) break;
      ix[k] = 0;
    }
  }
  return f;
}

}  // namespace lipforge
