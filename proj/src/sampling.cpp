#include "lipforge/sampling.hpp"

#include <cmath>

namespace lipforge {

namespace {
constexpr std::uint32_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};
}

double radical_inverse(std::uint64_t n, std::uint32_t base) {
  double inv = 1.0 / base;
  double scale = inv;
  double value = 0.0;
  while (n > 0) {
    value += static_cast<double>(n % base) * scale;
    n /= base;
    scale *= inv;
  }
  return value;
}

Vec halton_point(std::uint64_t n, int dim) {
  Vec p(dim);
  for (int k = 0; k < dim; ++k) p[k] = radical_inverse(n + 1, kPrimes[k]);
  return p;
}

std::vector<Vec> halton_ball_samples(const Vec& center, double radius, int count,
                                     std::uint64_t skip) {
  const int d = static_cast<int>(center.size());
  std::vector<Vec> out;
  out.reserve(count);
  std::uint64_t n = skip;
  while (static_cast<int>(out.size()) < count) {
    Vec p = halton_point(n++, d);
    Vec x = center + radius * (2.0 * p.array() - 1.0).matrix();
    if ((x - center).norm() < radius) out.push_back(x);
  }
  return out;
}

std::vector<Vec> direction_set(int dim, int count) {
  std::vector<Vec> dirs;
  dirs.reserve(count);
  for (int k = 0; k < dim && static_cast<int>(dirs.size()) < count; ++k) {
    Vec e = Vec::Zero(dim);
    e[k] = 1.0;
    dirs.push_back(e);
    if (static_cast<int>(dirs.size()) < count) dirs.push_back(-e);
  }
  if (dim == 2) {
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (std::uint64_t n = 0; static_cast<int>(dirs.size()) < count; ++n) {
      double a = golden * static_cast<double>(n + 1);
      Vec e(2);
      e << std::cos(a), std::sin(a);
      dirs.push_back(e);
    }
  } else {
    for (std::uint64_t n = 0; static_cast<int>(dirs.size()) < count; ++n) {
      Vec p = halton_point(n, dim);
      Vec e = (2.0 * p.array() - 1.0).matrix();
      double len = e.norm();
      if (len < 1e-9) continue;
      dirs.push_back(e / len);
    }
  }
  return dirs;
}

Vec uniform_in_box(std::mt19937_64& rng, const Vec& lo, const Vec& hi) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec x(lo.size());
  for (int k = 0; k < lo.size(); ++k) x[k] = lo[k] + (hi[k] - lo[k]) * unit(rng);
  return x;
}

}  // namespace lipforge
