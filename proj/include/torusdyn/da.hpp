#ifndef TORUSDYN_DA_HPP
#define TORUSDYN_DA_HPP

#include <memory>
#include <string>
#include <vector>

#include "torusdyn/geom.hpp"
#include "torusdyn/torus.hpp"

namespace torusdyn {

/// Parameters of the vertical-derivative bumps. The chain
/// lambda_u > v > 1 > 1 - delta > vbar > rho_floor > lambda_s = kappa
/// must hold (vbar <= 1 - delta).
struct BumpSpec {
    double v = 1.15;
    double kappa = 0.0;       // filled from the base matrix (= lambda_s)
    double rho_floor = 0.62;
    double delta = 0.30;
    double vbar = 0.68;
    double t_kappa = 0.9;     // t at which the kappa plateau starts (must be <= 1)
    // profile shape: slope budget fraction, ramp width, taper rate and floor
    double slope_margin = 0.9;
    double ramp_width = 0.3;
    double taper_rate = 0.95;
    double taper_floor = 0.3;
};

/// One bump curve: v-plateau, monotone descent with |t lambda'(t)| <= delta,
/// kappa-plateau from t_kappa on. Parametrized in s = ln(t / t_a).
class BumpProfile {
public:
    BumpProfile() = default;
    BumpProfile(double v, double kappa, double rho, double delta, double slope_margin,
                double ramp_width, double taper_rate, double taper_floor, double t_kappa);

    double operator()(double t) const;       // lambda(t)
    double derivative(double t) const;       // lambda'(t), analytic
    double eta(double t) const { return t * (*this)(t); }
    double eta_prime(double t) const { return (*this)(t) + t * derivative(t); }

    double t_plateau_end() const { return t_a_; }
    double t_kappa_start() const { return t_kappa_; }
    /// t0 of Lemma-16(iii): lambda(t0) = rho, independent of kappa below it
    double t0() const;
    /// the unique r0 with lambda(r0) = 1 (requires v > 1)
    double r0() const;
    double v() const { return v_; }
    double kappa() const { return kappa_; }
    double delta() const { return delta_; }

private:
    double v_ = 0, kappa_ = 0, rho_ = 0, delta_ = 0;
    double Qm_ = 0, w_ = 0, c_ = 0, iota_ = 0;
    double t_a_ = 0, t_kappa_ = 0;
    double s_T_ = 0, s_C_ = 0, s_end_ = 0, flat_area_ = 0;

    double area(double s) const;        // integral of the slope profile
    double profile(double s) const;     // q-tilde in [0,1]
    double s_of_value(double value) const;  // inverse of lambda on the descent
};

/// Builds (lambda, lambda_bar) for kappa = lambda_s and caps v, vbar. Rejects
/// infeasible parameter chains with the violated inequality.
std::pair<BumpProfile, BumpProfile> build_bump(const BumpSpec& spec, double lambda_u);

/// Even C^1 partition of unity chi0 + chi1 + chi2 = 1 built from cubic
/// smoothstep transitions; chi0(0)=1, chi0=0 for |t|>=1, chi2=0 for |t|<=1,
/// chi2=1 for |t|>=2, |chi_i'| <= 2.
struct Partition {
    double chi0(double t) const;
    double chi1(double t) const;
    double chi2(double t) const;
};

Partition build_partition();

/// Derived-from-Anosov perturbation of the hyperbolic automorphism induced by
/// A, rescaled into a neighborhood of z0 = p(0). Outside the rescaled support
/// square the map is the linear automorphism. Note: g is isotopic to A, not to
/// the identity; its plane lift satisfies g(z + m) = g(z) + A m.
class DAMap {
public:
    DAMap() = default;

    IntegerMatrix A;
    double lambda_u = 0, lambda_s = 0;
    Vec2 vu, vs;          // unit eigenvectors (columns of U)
    BumpSpec spec;
    BumpProfile lam, lam_bar;
    Partition chi;
    double scale = 0.12;  // support rescaling
    bool perturbed = true;

    Vec2 eigen_coords(const Vec2& local) const;   // U^{-1} local / scale
    Vec2 from_eigen(const Vec2& xi) const;        // U (xi * scale)
    bool in_support(const Vec2& xi) const {
        return std::abs(xi.x) <= 2.0 && std::abs(xi.y) <= 1.0;
    }

    double L(double x, double y) const;
    /// derivative entries of Eq. (3.15): dG = [[lambda_u, 0], [c, N]]
    double c_entry(double x, double y) const;
    double N_entry(double x, double y) const;

    Vec2 evaluate(const Vec2& z) const;
    Vec2 inverse(const Vec2& w) const;

    Vec2 fixed_point() const { return {0.0, 0.0}; }
    double r0_local() const { return lam.r0(); }
    Vec2 saddle(int sign) const;  // z_{+1} or z_{-1} on the torus

private:
    Vec2 apply_U(const Vec2& xi) const;
    Vec2 apply_Uinv(const Vec2& z) const;
};

/// Builds the DA map; rejects non-hyperbolic A or infeasible bump parameters.
DAMap build_da_map(const IntegerMatrix& A, BumpSpec spec, double support_scale = 0.12);

/// Same base data with the perturbation switched off (delta effectively 0).
DAMap linear_variant(const DAMap& g);

struct SectionGrid {
    int mesh = 0;
    std::vector<double> S;              // Lin(E1,E2) value per node, row-major
    std::vector<double> sup_diff_history;
    double sup_abs = 0.0;
    double cone_radius = 0.0;           // 2 delta (lambda_u - nu)^{-1}

    double at(int i, int j) const { return S[size_t(j) * size_t(mesh) + size_t(i)]; }
    double interpolate(const Vec2& z) const;  // bilinear with wrap
};

/// Graph transform for the invariant unstable section: iterates
/// S <- (c~ + N~ S) / lambda_u by pullback along g until sup-differences drop
/// below tol. Throws when contraction fails for three consecutive sweeps.
SectionGrid invariant_section(const DAMap& g, int mesh, int max_iterations = 200,
                              double tol = 1e-13);

/// Precomputed unit direction field of the strong unstable foliation, oriented
/// upward (positive vertical component).
struct LeafField {
    int mesh = 0;
    std::vector<double> ux, uy;
    Vec2 dir(const Vec2& z) const;
};

LeafField leaf_field(const DAMap& g, const SectionGrid& S);

struct LeafAdvanceOptions {
    double step = 1.0 / 2048.0;  // mesh cell / 4 at the default 512 mesh
    long max_steps = 200000000;
    double crossing_tol = 1e-10;
};

/// Integrates the leaf through z until the cumulative (lifted) vertical rise
/// equals `rise` (sign gives the direction). Fixed-step RK4 with bisection
/// refinement at the crossing. Throws when the step budget is exhausted.
Vec2 advance_by_rise(const LeafField& field, Vec2 z, double rise,
                     const LeafAdvanceOptions& opts = {});

/// First crossing of the leaf through z with the horizontal circle at
/// target_height (+1 = upward along the leaf orientation, -1 = downward).
Vec2 leaf_advance(const DAMap& g, const SectionGrid& S, const Vec2& z, double target_height,
                  int direction, const LeafAdvanceOptions& opts = {});

/// The fibered homeomorphism f(x,y) = (f_y(x), y + beta), beta = nu * vu_y,
/// moving points along unstable leaves by a vertical rise of beta per step.
/// Isotopic to the identity; returned as a TorusLift.
TorusLift build_fibered_f(std::shared_ptr<const DAMap> g, std::shared_ptr<const SectionGrid> S,
                          double nu_scale, const LeafAdvanceOptions& opts = {});

/// Total vertical rise per application for the given nu (= nu * vu.y / vu.x
/// normalized so vu = (1, slope)).
double fibered_rise(const DAMap& g, double nu_scale);
Vec2 fibered_rotation_vector(const DAMap& g, double nu_scale);  // (nu, nu*slope) mod 1

enum class BasinVerdict { InBasin, NotWithinBudget };

struct BasinResult {
    BasinVerdict verdict = BasinVerdict::NotWithinBudget;
    long steps_used = 0;
};

/// Iterates g^{-1} from z; InBasin when the backward orbit enters the ball
/// around the repelling fixed point z0 = p(0).
BasinResult basin_membership(const DAMap& g, Vec2 z, long budget, double ball);

}  // namespace torusdyn

#endif
