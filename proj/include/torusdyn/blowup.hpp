#ifndef TORUSDYN_BLOWUP_HPP
#define TORUSDYN_BLOWUP_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "torusdyn/circle.hpp"
#include "torusdyn/geom.hpp"
#include "torusdyn/torus.hpp"

namespace torusdyn {

/// Radial Moebius push g_eps(r, theta) = ((r+eps)/(1+r eps), theta), the basic
/// blow-up map of the unit disk. Strictly increasing in r, fixes r = 1.
double g_radial(double r, double eps);
double g_radial_inverse(double r, double eps);
std::pair<double, double> g_eval(double r, double theta, double eps);

/// Annulus compression q_eps: [eps0, eps] -> [eps', eps] with eps' = (eps+eps0)/2;
/// outer circle fixed, inner circle sent to radius eps'.
double q_radial(double r, double eps, double eps0);
double q_radial_inverse(double r, double eps, double eps0);
std::pair<double, double> q_eval(double r, double theta, double eps, double eps0);

/// Linear chart of the unit disk onto the embedded disk B_{delta0}(z0).
struct RadialChart {
    Vec2 z0;
    double delta0 = 0.25;  // paper's standing bound: 0 < delta0 <= 1/4

    Vec2 to_torus(double r, double theta) const;
    /// radius (in chart units, so boundary = 1) and angle of a torus point
    std::pair<double, double> from_torus(const Vec2& z) const;
};

struct DiskRecord {
    long index = 0;               // k: disk over f^k(z0)
    std::vector<Vec2> boundary;   // closed polyline, M samples
    Box2 bbox;
    Vec2 marker;                  // interior point (the blown-up puncture)
    double diameter = 0.0;        // sampled
    int created_stage = 0;
};

struct StageRecord {
    int n = 0;
    double d_n = 0.0;
    double eps_plus = 0.0, eps_minus = 0.0;
    double eps_prime_plus = 0.0, eps_prime_minus = 0.0;
    Box2 support_plus, support_minus;  // inflated bounding boxes of A_{+n}, A_{-n}
    double measured_diam_plus = 0.0, measured_diam_minus = 0.0;  // sampled, pre safety factor
    Vec2 z_plus, z_minus;              // punctures blown up at this stage
    double perturbation_sup = 0.0;     // sampled sup |f_n - f_{n-1}|
};

struct BlowupConfig {
    double eps0 = 0.5;
    double window_halfwidth = 0.25;  // distance from z0 to the configured window boundary
    int boundary_samples = 256;      // M
    int search_samples = 64;         // boundary samples during the eps search
    double diam_safety = 2.0;        // sampled-diameter inflation factor
    uint64_t rng_seed = 1234;        // perturbation-sup sampling
};

/// Certificate that z0 is a regular point of the semiconjugacy, produced by the
/// module that constructed the factors.
struct RegularPointCert {
    Vec2 z0;
    std::string provenance;
};

class BlowupState;
using BlowupStatePtr = std::shared_ptr<const BlowupState>;

/// Stage-N state of the inductive orbit blow-up. The truncated map f_N and the
/// collapse map phi_N are evaluated through the composition chain
/// f_N = H_N o f o H_N^{-1}, phi_N = H_N^{-1}, where H_N = hhat_N o ... o hhat_1 o h_0.
/// Each hhat link short-circuits to the identity unless the query point lies in
/// the stored support boxes. Completed states are immutable.
class BlowupState {
public:
    const TorusLift& base() const { return base_; }
    const RadialChart& chart() const { return chart_; }
    double eps0() const { return cfg_.eps0; }
    int stages() const { return int(stage_records_.size()); }
    const std::vector<DiskRecord>& disks() const { return disks_; }
    const std::vector<StageRecord>& stage_records() const { return stage_records_; }
    const BlowupConfig& config() const { return cfg_; }
    Vec2 z0() const { return chart_.z0; }

    /// base-orbit point f^k(z0)
    Vec2 base_orbit(long k) const;

    Vec2 H(int n, Vec2 z) const;       // hhat_n o ... o hhat_1 o h0
    Vec2 H_inv(int n, Vec2 z) const;   // h0^{-1} o hhat_1^{-1} o ... o hhat_n^{-1}
    Vec2 f_n(int n, Vec2 z) const;     // stage-n map
    Vec2 f_n_inv(int n, Vec2 z) const;
    Vec2 f_n_pow(int n, long k, Vec2 z) const;  // f_n^k via the telescoped chain
    Vec2 phi_n(int n, Vec2 z) const;   // collapse map (extended: disks -> orbit points)

    Vec2 f_N(Vec2 z) const { return f_n(stages(), z); }
    Vec2 f_N_inv(Vec2 z) const { return f_n_inv(stages(), z); }
    Vec2 phi_N(Vec2 z) const { return phi_n(stages(), z); }

    /// TorusLift view of f_N (shares this state).
    TorusLift lift(const BlowupStatePtr& self) const;

    double tail_bound() const;  // sum_{n > N} d_n <= (1/4)^{N+2}/3

    /// Eq. (3.12) gap bound for the next stage; also returns the candidate
    /// punctures. Throws when a distance degenerates at working precision.
    double gap_bound_next(Vec2& z_plus, Vec2& z_minus) const;

    std::string manifest_json() const;

    friend BlowupStatePtr run_blowup(const TorusLift& f, const RegularPointCert& z0, int N,
                                     const BlowupConfig& cfg);

private:
    TorusLift base_;
    RadialChart chart_;
    BlowupConfig cfg_;
    std::vector<DiskRecord> disks_;         // ordered by creation: 0, +1, -1, +2, ...
    std::vector<StageRecord> stage_records_;

    Vec2 hhat(int n, Vec2 z) const;
    Vec2 hhat_inv(int n, Vec2 z) const;
    Vec2 h_signed(int n, int sign, Vec2 z) const;
    Vec2 h_signed_inv(int n, int sign, Vec2 z) const;
    Vec2 h0(Vec2 z) const;
    Vec2 h0_inv(Vec2 z) const;  // extended: collapses Cl(Sigma_0) to z0
    void run_stage();           // builds stage n = stage_records_.size() + 1
};

/// Run the central blow-up (stage 0, producing Sigma_0) followed by stages 1..N.
BlowupStatePtr run_blowup(const TorusLift& f, const RegularPointCert& z0, int N,
                          const BlowupConfig& cfg = {});

/// Exact gap bound of Eq. (3.12) from precomputed distances, exposed for tests.
double gap_bound_formula(int n, double d_pm, double d_plus_delta, double d_minus_delta);

// ---------------------------------------------------------------------------
// Wedge sampling (Lemma 23 / Lemma 15(2))
// ---------------------------------------------------------------------------

struct WedgeSpec {
    double r = 1.0;       // fraction of delta0
    double theta1 = 0.0;  // rays bounding the wedge; 0 < |theta1-theta2| < pi (short way)
    double theta2 = 1.0;
};

struct WedgeResult {
    WedgeSpec wedge;
    bool hit = false;
    Vec2 witness;
};

struct WedgeReport {
    std::vector<WedgeResult> results;
    int hits = 0;
    int misses = 0;
};

struct WedgeCheckConfig {
    double delta0 = 0.1;
    double tol = 1e-12;
    int scale_levels = 14;    // dyadic distance scales searched per wedge
    int x_candidates = 24;    // uncovered segments tried per scale
    std::vector<Vec2> excluded_orbit;  // realized marked orbit points
    double exclusion_radius = 1e-9;
};

/// For each sampled wedge, search for a point of (Q1_irr x Q2_irr) minus the
/// excluded orbit strictly inside the wedge. Misses are data, not errors.
WedgeReport wedge_sample_check(const CantorSetSpec& Q1, const CantorSetSpec& Q2, Vec2 z0,
                               const std::vector<WedgeSpec>& wedges,
                               const WedgeCheckConfig& cfg);

/// Standard wedge grid: nr radii x ntheta base angles x widths.
std::vector<WedgeSpec> wedge_grid(int nr, int ntheta, const std::vector<double>& widths);

}  // namespace torusdyn

#endif
