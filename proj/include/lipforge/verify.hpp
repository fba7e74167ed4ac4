#pragma once

#include "lipforge/construct.hpp"
#include "lipforge/expr.hpp"
#include "lipforge/field.hpp"
#include "lipforge/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lipforge {

struct Certificate {
  std::string name;
  int scale = 0;
  bool pass = false;
  bool report_only = false;  // below the asymptotic regime; value reported, not asserted
  double measured = 0.0;
  double bound = 0.0;
  long samples = 0;
  std::optional<Vec> witness;  // attached on failure
};

/// max over V samples of min(dist(x, dV), min_{j<=i} dist(x, U_j)); bound
/// 2^{-i+4} is asserted for i >= 10 and reported otherwise.
Certificate check_coverage(const SegmentLedger& ledger, const Domain& dom, int i,
                           int nsamples = 100000);

/// Monte Carlo volume of Z_i (radius 2^{-i+4} balls around dV and the centers
/// U_j, j <= i/2) against (64 M^{d-1}(dV) + 64^d vol(V)) / 2^i.
Certificate check_exceptional_volume(const SegmentLedger& ledger, const Domain& dom,
                                     int i, double boundary_content, double vol_v,
                                     int nsamples = 1000000, std::uint64_t seed = 42);

/// Exact pairwise segment distances: all distinct pairs in L_s must exceed
/// 2^-s - 4^-s, for every family index s <= i.
Certificate check_separation(const SegmentLedger& ledger, int i);

struct SolutionReport {
  Certificate boundary;     // u = f on Gamma, bit-exact
  Certificate subsolution;  // max (Lu - psi) over V samples <= tol
  std::vector<double> attainment;  // fraction per scale index 1..max_scale
};

/// Three-part certification of a finished run; the attainment entry for scale
/// index i counts V samples with a ledger segment (scale <= i) within
/// 2^{-i+5} whose final-u Lipschitz exceeds psi(x) - 2^{-i/2} - modulus.
SolutionReport check_solution(const BumpStack& u, const MapExpr& psi, const MapExpr& f,
                              const Domain& dom, const SegmentLedger& ledger,
                              double tol, std::uint64_t seed = 42,
                              int gamma_samples = 10000, int v_samples = 100000,
                              int seg_lip_samples = 1000);

/// Sampled modulus of continuity of psi at distance r over the free region.
double sampled_modulus(const MapExpr& psi, const Domain& dom, double r,
                       int pairs = 10000, std::uint64_t seed = 42);

}  // namespace lipforge
