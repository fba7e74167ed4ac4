#pragma once

#include "lipforge/field.hpp"
#include "lipforge/types.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lipforge {

struct FieldIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sampled field on a uniform lattice: d input axes, D output components,
/// samples stored component-major then row-major (last axis fastest).
struct FieldData {
  std::uint32_t d = 0, D = 0;
  std::vector<std::uint32_t> counts;  // per axis, size d
  Vec origin, spacing;
  std::vector<double> samples;  // D * prod(counts)

  std::size_t lattice_size() const;
};

/// Binary format: magic "LIPX", version u32 = 1, d, D, counts, origin,
/// spacing, then float64 samples; everything little-endian.
void write_field(const FieldData& field, const std::string& path);

/// Throws FieldIoError on a bad header or a truncated payload.
FieldData read_field(const std::string& path);

/// Samples a bump stack on the lattice spanning [lo, hi] with the given
/// per-axis counts (>= 2 each).
FieldData sample_stack(const BumpStack& u, const Vec& lo, const Vec& hi,
                       const std::vector<std::uint32_t>& counts);

}  // namespace lipforge
