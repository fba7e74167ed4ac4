#pragma once

#include "lipforge/expr.hpp"
#include "lipforge/field.hpp"
#include "lipforge/geometry.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lipforge {

struct ConstructError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OscillatorParams {
  int output_axis = 0;
  std::uint64_t seed = 42;   // enters the per-ball direction hash
  int scale = 0;
  int ball_id = 0;
  int cert_samples = 2000;   // samples for the Lip(chi_t, S) >= t certificate
};

struct Oscillator {
  Bump bump;
  double measured_lip = 0.0;  // along the direction diameter of S
  double continuity_c = 0.0;  // Lip(chi_t - chi_s, S) <= c |t - s| on [0, t]
};

/// Direction policy: first coordinate axis rotated (in the x1-x2 plane) by a
/// deterministic hash angle of (scale, ball id, seed).
Vec hashed_direction(int dim, int scale, int ball_id, std::uint64_t seed);

/// Oscillator with support S, certified Lip >= t along the direction diameter
/// (one retry at doubled sampling, then a hard error). t = 0 gives the zero bump.
Oscillator make_oscillator(const Ball& support, double t, double eps0,
                           const Vec& direction, const OscillatorParams& params,
                           int dim);

struct ConstructConfig {
  double tol_root = 1e-3;
  int h_samples_coarse = 512;  // scales i <= 4
  int h_samples_fine = 128;
  int refine_factor = 2;       // sample doubling on certification retry
  int segment_samples = 256;   // lip_on_segment count during segment search
  int max_halvings = 20;       // dyadic segment-length search depth
  std::uint64_t seed = 42;
  int threads = 1;
  double eps_override = 0.0;   // 0 keeps the 2^-i schedule
  int precondition_samples = 4096;
};

/// max over the low-discrepancy samples of S of (local_lip(u + chi_t) - psi).
/// `argmax` (optional) receives the maximizing sample.
double h_profile(const BumpStack& u, const MapExpr& psi, const Bump& proto,
                 double t, const std::vector<Vec>& samples, Vec* argmax = nullptr);

struct ImprovePointResult {
  bool added = false;   // false when h(0) >= -tol already
  Bump bump;            // valid when added
  Vec witness;
  double t = 0.0;
  double h_at_t = 0.0;
  double t_low = 0.0, t_high = 0.0;  // recorded bracket, h(t_low) < 0 <= h(t_high)
};

/// Bracketing + 60-step bisection on h, backing off to the subsolution side:
/// h(T) in [-tol, 0] at the audit samples. Nothing is appended to u.
ImprovePointResult improve_point(const BumpStack& u, const MapExpr& psi,
                                 const Ball& ball, double tol,
                                 const OscillatorParams& osc, int n_samples);

struct ImproveBallResult {
  ImprovePointResult point;
  Segment segment;
  double segment_lip = 0.0;     // measured pair max on the returned segment
  double psi_max_on_seg = 0.0;  // max sampled psi there
};

/// Improvement inside the open ball W: picks W' = concentric half-radius ball,
/// improves at a point, then searches dyadically shrinking segments through
/// the witness until Lip(v, l) > max psi on l - eps. Nothing is appended.
ImproveBallResult improve_ball(const BumpStack& u, const MapExpr& psi, const Ball& w,
                               double eps, const ConstructConfig& cfg, int scale,
                               int ball_id);

/// Applies improve_ball on Phi(B) for every ball of the packing (parallel over
/// balls; appends in deterministic ball order). Returns the new segments.
std::vector<Segment> improve_packing(BumpStack& u, const MapExpr& psi,
                                     const Packing& packing, double eps,
                                     const ConstructConfig& cfg);

struct ScaleReport {
  int scale = 0;
  int ball_count = 0;
  int segment_count = 0;
  double max_deficit = 0.0;     // max over segments of (max psi on l - measured Lip)
  double coverage_radius = 0.0; // max over samples of min(dist dV, dist to centers)
  double wall_seconds = 0.0;
};

struct IterationReport {
  std::vector<ScaleReport> scales;
};

struct IterationResult {
  BumpStack u;
  SegmentLedger ledger;
  IterationReport report;
  std::vector<std::size_t> snapshot_counts;  // bump count after each scale
  std::vector<Packing> packings;
};

/// The dyadic iteration: for i = 1..i_max, maximal 2^-i packing of V minus the
/// ledger, packing-wide improvement with eps_i = 2^-i, ledger extension.
/// Rejects inputs with sampled L f > psi, with the violating point in the message.
IterationResult iterate(const MapExpr& f, const MapExpr& psi, const Domain& dom,
                        int i_max, const ConstructConfig& cfg);

/// Deformation u_s with every bump parameter scaled by s in [0, 1].
Vec homotopy_eval(const BumpStack& u, double s, const Vec& x);

}  // namespace lipforge
