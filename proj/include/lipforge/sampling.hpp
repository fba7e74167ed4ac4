#pragma once

#include "lipforge/types.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace lipforge {

/// Van der Corput radical inverse in the given base.
double radical_inverse(std::uint64_t n, std::uint32_t base);

/// n-th point of the Halton sequence in [0,1)^dim (bases 2, 3, 5, ...).
Vec halton_point(std::uint64_t n, int dim);

/// Deterministic low-discrepancy samples inside the ball B(center, radius),
/// obtained by rejection from the Halton sequence on the bounding cube.
std::vector<Vec> halton_ball_samples(const Vec& center, double radius, int count,
                                     std::uint64_t skip = 0);

/// Deterministic unit directions: in 2-d the golden-angle spiral on the circle,
/// in higher dimension normalized Halton offsets. Always includes the
/// coordinate axes (both signs) first.
std::vector<Vec> direction_set(int dim, int count);

/// Seeded uniform point in an axis-aligned box [lo, hi].
Vec uniform_in_box(std::mt19937_64& rng, const Vec& lo, const Vec& hi);

}  // namespace lipforge
