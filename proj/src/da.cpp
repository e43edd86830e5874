#include "torusdyn/da.hpp"

#include <cmath>
#include <stdexcept>

namespace torusdyn {

namespace {

double smoothstep5(double u) {  // quintic, C^2 at both ends
    if (u <= 0) return 0;
    if (u >= 1) return 1;
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

double smoothstep5_int(double u) {  // integral of smoothstep5 from 0
    if (u <= 0) return 0;
    if (u >= 1) return u - 0.5;
    double u4 = u * u * u * u;
    return u4 * (2.5 + u * (-3.0 + u));
}

double smoothstep3(double u) {
    if (u <= 0) return 0;
    if (u >= 1) return 1;
    return u * u * (3.0 - 2.0 * u);
}

double smoothstep3_deriv(double u) {
    if (u <= 0 || u >= 1) return 0;
    return 6.0 * u * (1.0 - u);
}

}  // namespace

// ---------------------------------------------------------------------------
// BumpProfile
// ---------------------------------------------------------------------------

BumpProfile::BumpProfile(double v, double kappa, double rho, double delta, double slope_margin,
                         double ramp_width, double taper_rate, double taper_floor,
                         double t0_anchor)
    : v_(v), kappa_(kappa), rho_(rho), delta_(delta), Qm_(slope_margin), w_(ramp_width),
      c_(taper_rate), iota_(taper_floor) {
    if (!(v > rho && rho > kappa && kappa > 0))
        throw std::invalid_argument("bump profile: need v > rho > kappa > 0");
    if (!(delta > 0) || !(Qm_ > 0 && Qm_ <= 1) || !(c_ > 0 && c_ <= 1) ||
        !(iota_ > 0 && iota_ < 1) || !(w_ > 0))
        throw std::invalid_argument("bump profile: bad shape parameters");

    double T = (v_ - kappa_) / delta_;
    double ramp_area = Qm_ * w_ * 0.5;
    double taper_area = Qm_ * (1.0 - iota_) / c_;
    double cut_area = Qm_ * iota_ * w_ * 0.5;
    flat_area_ = T - ramp_area - taper_area - cut_area;
    if (flat_area_ <= 0)
        throw std::invalid_argument(
            "bump profile infeasible: transition cannot fit, delta * available log-range "
            "< v - kappa (flat area " + std::to_string(flat_area_) + " <= 0)");
    s_T_ = w_ + flat_area_ / Qm_;
    s_C_ = s_T_ + std::log(1.0 / iota_) / c_;
    s_end_ = s_C_ + w_;

    double s0 = 0.5 * w_ + (v_ - rho_) / (delta_ * Qm_);
    if (s0 < w_ || s0 > s_T_)
        throw std::invalid_argument(
            "bump profile infeasible: rho anchor falls outside the constant-slope zone");
    t_a_ = t0_anchor * std::exp(-s0);
    t_kappa_ = t_a_ * std::exp(s_end_);
    if (t_kappa_ > 1.0)
        throw std::invalid_argument(
            "bump profile infeasible: transition cannot fit below t = 1 "
            "(delta * ln(1/t_a) < v - kappa; kappa plateau would start at t = " +
            std::to_string(t_kappa_) + ")");
    if (t_a_ < 1e-12)
        throw std::invalid_argument("bump profile infeasible: plateau end underflows");
}

double BumpProfile::profile(double s) const {
    if (s <= 0 || s >= s_end_) return 0;
    if (s < w_) return Qm_ * smoothstep5(s / w_);
    if (s <= s_T_) return Qm_;
    if (s <= s_C_) return Qm_ * std::exp(-c_ * (s - s_T_));
    return Qm_ * iota_ * (1.0 - smoothstep5((s - s_C_) / w_));
}

double BumpProfile::area(double s) const {
    if (s <= 0) return 0;
    double ramp_area = Qm_ * w_ * 0.5;
    if (s < w_) return Qm_ * w_ * smoothstep5_int(s / w_);
    double a = ramp_area;
    if (s <= s_T_) return a + Qm_ * (s - w_);
    a += Qm_ * (s_T_ - w_);
    if (s <= s_C_) return a + Qm_ * (1.0 - std::exp(-c_ * (s - s_T_))) / c_;
    a += Qm_ * (1.0 - iota_) / c_;
    if (s < s_end_) {
        double u = (s - s_C_) / w_;
        return a + Qm_ * iota_ * w_ * (u - smoothstep5_int(u));
    }
    return a + Qm_ * iota_ * w_ * 0.5;
}

double BumpProfile::operator()(double t) const {
    if (t <= t_a_) return v_;
    if (t >= t_kappa_) return kappa_;
    return v_ - delta_ * area(std::log(t / t_a_));
}

double BumpProfile::derivative(double t) const {
    if (t <= t_a_ || t >= t_kappa_) return 0;
    return -delta_ * profile(std::log(t / t_a_)) / t;
}

double BumpProfile::s_of_value(double value) const {
    // area(s) = (v - value)/delta, area monotone nondecreasing
    double target = (v_ - value) / delta_;
    double lo = 0, hi = s_end_;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (area(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double BumpProfile::t0() const { return t_a_ * std::exp(s_of_value(rho_)); }

double BumpProfile::r0() const {
    if (v_ <= 1.0) throw std::logic_error("BumpProfile::r0: needs v > 1");
    return t_a_ * std::exp(s_of_value(1.0));
}

std::pair<BumpProfile, BumpProfile> build_bump(const BumpSpec& spec, double lambda_u) {
    if (!(lambda_u > spec.v && spec.v > 1.0))
        throw std::invalid_argument("build_bump: need lambda_u > v > 1");
    if (!(1.0 > spec.rho_floor && spec.rho_floor > spec.kappa))
        throw std::invalid_argument("build_bump: need 1 > rho_floor > lambda_s");
    if (!(1.0 - spec.delta > spec.rho_floor))
        throw std::invalid_argument("build_bump: need 1 - delta > rho_floor");
    if (!(1.0 - spec.delta >= spec.vbar && spec.vbar > spec.rho_floor))
        throw std::invalid_argument("build_bump: need 1 - delta >= vbar > rho_floor");
    BumpProfile lam(spec.v, spec.kappa, spec.rho_floor, spec.delta, spec.slope_margin,
                    spec.ramp_width, spec.taper_rate, spec.taper_floor, spec.t_kappa);
    BumpProfile lam_bar(spec.vbar, spec.kappa, spec.rho_floor, spec.delta, spec.slope_margin,
                        spec.ramp_width, spec.taper_rate, spec.taper_floor, spec.t_kappa);
    return {lam, lam_bar};
}

// ---------------------------------------------------------------------------
// partition of unity
// ---------------------------------------------------------------------------

double Partition::chi0(double t) const {
    double a = std::abs(t);
    if (a <= 0.2) return 1.0;
    if (a >= 1.0) return 0.0;
    return 1.0 - smoothstep3((a - 0.2) / 0.8);
}

double Partition::chi2(double t) const {
    double a = std::abs(t);
    if (a <= 1.0) return 0.0;
    if (a >= 2.0) return 1.0;
    return smoothstep3(a - 1.0);
}

double Partition::chi1(double t) const { return 1.0 - chi0(t) - chi2(t); }

Partition build_partition() { return {}; }

namespace {

double chi0_deriv(double t) {
    double a = std::abs(t);
    if (a <= 0.2 || a >= 1.0) return 0.0;
    double d = -smoothstep3_deriv((a - 0.2) / 0.8) / 0.8;
    return t >= 0 ? d : -d;
}

double chi2_deriv(double t) {
    double a = std::abs(t);
    if (a <= 1.0 || a >= 2.0) return 0.0;
    double d = smoothstep3_deriv(a - 1.0);
    return t >= 0 ? d : -d;
}

}  // namespace

// ---------------------------------------------------------------------------
// DAMap
// ---------------------------------------------------------------------------

Vec2 DAMap::apply_U(const Vec2& xi) const {
    return {vu.x * xi.x + vs.x * xi.y, vu.y * xi.x + vs.y * xi.y};
}

Vec2 DAMap::apply_Uinv(const Vec2& z) const {
    double det = vu.x * vs.y - vs.x * vu.y;
    return {(vs.y * z.x - vs.x * z.y) / det, (-vu.y * z.x + vu.x * z.y) / det};
}

Vec2 DAMap::eigen_coords(const Vec2& local) const { return apply_Uinv(local) / scale; }
Vec2 DAMap::from_eigen(const Vec2& xi) const { return apply_U(xi * scale); }

double DAMap::L(double x, double y) const {
    double t = std::abs(y);
    return chi.chi0(x) * lam(t) + chi.chi1(x) * lam_bar(t) + chi.chi2(x) * lambda_s;
}

double DAMap::c_entry(double x, double y) const {
    double t = std::abs(y);
    return (chi0_deriv(x) * lam(t) + (-chi0_deriv(x) - chi2_deriv(x)) * lam_bar(t) +
            chi2_deriv(x) * lambda_s) * y;
}

double DAMap::N_entry(double x, double y) const {
    double t = std::abs(y);
    return L(x, y) + t * (chi.chi0(x) * lam.derivative(t) + chi.chi1(x) * lam_bar.derivative(t));
}

Vec2 DAMap::evaluate(const Vec2& z) const {
    if (!perturbed) return A.apply(z);
    Vec2 m{std::round(z.x), std::round(z.y)};
    Vec2 rep = z - m;
    Vec2 xi = eigen_coords(rep);
    if (!in_support(xi)) return A.apply(z);
    Vec2 G{lambda_u * xi.x, L(xi.x, xi.y) * xi.y};
    return from_eigen(G) + A.apply(m);
}

Vec2 DAMap::inverse(const Vec2& w) const {
    IntegerMatrix Ai = A.inverse();
    if (!perturbed) return Ai.apply(w);
    Vec2 u = Ai.apply(w);
    Vec2 m{std::round(u.x), std::round(u.y)};
    Vec2 wloc = w - A.apply(m);
    Vec2 xiw = eigen_coords(wloc);
    double xi1 = xiw.x / lambda_u;
    if (std::abs(xi1) > 2.0 || std::abs(xiw.y) > lambda_s) return u;
    // solve L(xi1, y) y = xiw.y on [-1, 1]; the derivative is N >= lambda_s - dip > 0
    double lo = -1.0, hi = 1.0, y = xiw.y / lambda_s;
    y = std::clamp(y, lo, hi);
    for (int it = 0; it < 100; ++it) {
        double f = L(xi1, y) * y - xiw.y;
        if (f > 0)
            hi = y;
        else
            lo = y;
        double dN = N_entry(xi1, y);
        double step = dN > 1e-9 ? f / dN : 0.0;
        double yn = y - step;
        if (!(yn > lo && yn < hi)) yn = 0.5 * (lo + hi);
        if (std::abs(yn - y) < 1e-16) {
            y = yn;
            break;
        }
        y = yn;
    }
    return from_eigen({xi1, y}) + m;
}

Vec2 DAMap::saddle(int sign) const {
    return torus_rep(from_eigen({0.0, double(sign) * r0_local()}));
}

DAMap build_da_map(const IntegerMatrix& A, BumpSpec spec, double support_scale) {
    if (A.det() != 1) throw std::invalid_argument("build_da_map: A must be in SL(2,Z)");
    double tr = double(A.a + A.d);
    if (std::abs(tr) <= 2.0)
        throw std::invalid_argument("build_da_map: A must be hyperbolic (|trace| > 2)");
    DAMap g;
    g.A = A;
    double disc = std::sqrt(tr * tr - 4.0);
    g.lambda_u = 0.5 * (tr + disc);
    g.lambda_s = 0.5 * (tr - disc);
    // eigenvector for lambda: (A - lambda) v = 0 with rows (a-l, b), (c, d-l)
    auto eigvec = [&](double l) {
        Vec2 v;
        if (std::abs(A.b) > 1e-12) {
            v = {double(A.b), l - double(A.a)};
        } else if (std::abs(A.c) > 1e-12) {
            v = {l - double(A.d), double(A.c)};
        } else {
            v = {1.0, 0.0};
        }
        double n = norm(v);
        v = v / n;
        if (v.x < 0) v = v * -1.0;
        return v;
    };
    g.vu = eigvec(g.lambda_u);
    g.vs = eigvec(g.lambda_s);
    spec.kappa = g.lambda_s;
    g.spec = spec;
    auto [lam, lam_bar] = build_bump(spec, g.lambda_u);
    g.lam = lam;
    g.lam_bar = lam_bar;
    g.chi = build_partition();
    g.scale = support_scale;
    // the rescaled support square must embed in a half-cell neighborhood of z0
    double corner = support_scale * std::sqrt(5.0);
    if (corner >= 0.5)
        throw std::invalid_argument("build_da_map: support scale too large to embed");
    double cone = 2.0 * spec.delta / (g.lambda_u - spec.v);
    if (cone > 1.0)
        throw std::invalid_argument("build_da_map: cone radius 2 delta/(lambda_u - v) exceeds 1");
    return g;
}

DAMap linear_variant(const DAMap& g) {
    DAMap lin = g;
    lin.perturbed = false;
    return lin;
}

// ---------------------------------------------------------------------------
// graph transform
// ---------------------------------------------------------------------------

double SectionGrid::interpolate(const Vec2& z) const {
    double x = frac(z.x) * mesh, y = frac(z.y) * mesh;
    int i0 = int(x), j0 = int(y);
    double fx = x - i0, fy = y - j0;
    int i1 = (i0 + 1) % mesh, j1 = (j0 + 1) % mesh;
    i0 %= mesh;
    j0 %= mesh;
    return (1 - fx) * (1 - fy) * at(i0, j0) + fx * (1 - fy) * at(i1, j0) +
           (1 - fx) * fy * at(i0, j1) + fx * fy * at(i1, j1);
}

SectionGrid invariant_section(const DAMap& g, int mesh, int max_iterations, double tol) {
    if (mesh < 8) throw std::invalid_argument("invariant_section: mesh too small");
    SectionGrid grid;
    grid.mesh = mesh;
    grid.S.assign(size_t(mesh) * size_t(mesh), 0.0);
    grid.cone_radius = 2.0 * g.spec.delta / (g.lambda_u - g.spec.v);

    // pullback data per node: source point and derivative entries there
    std::vector<Vec2> src(size_t(mesh) * size_t(mesh));
    std::vector<double> ct(src.size()), Nt(src.size());
    for (int j = 0; j < mesh; ++j) {
        for (int i = 0; i < mesh; ++i) {
            Vec2 w{(i + 0.0) / mesh, (j + 0.0) / mesh};
            Vec2 z = torus_rep(g.inverse(w));
            size_t id = size_t(j) * size_t(mesh) + size_t(i);
            src[id] = z;
            Vec2 rep{z.x - std::round(z.x), z.y - std::round(z.y)};
            Vec2 xi = g.eigen_coords(rep);
            if (g.perturbed && g.in_support(xi)) {
                ct[id] = g.c_entry(xi.x, xi.y);
                Nt[id] = g.N_entry(xi.x, xi.y);
            } else {
                ct[id] = 0.0;
                Nt[id] = g.lambda_s;
            }
        }
    }

    std::vector<double> next(grid.S.size());
    double nu = g.spec.v;
    double allowed = nu / g.lambda_u + 0.05;
    int violations = 0;
    double prev_diff = -1.0;
    for (int sweep = 0; sweep < max_iterations; ++sweep) {
        double diff = 0.0;
        for (size_t id = 0; id < next.size(); ++id) {
            double val = (ct[id] + Nt[id] * grid.interpolate(src[id])) / g.lambda_u;
            diff = std::max(diff, std::abs(val - grid.S[id]));
            next[id] = val;
        }
        grid.S.swap(next);
        grid.sup_diff_history.push_back(diff);
        if (prev_diff > 0) {
            double ratio = diff / prev_diff;
            if (ratio > allowed) {
                if (++violations >= 3)
                    throw std::runtime_error(
                        "invariant_section: contraction failed for 3 consecutive sweeps; "
                        "mesh refinement suggested");
            } else {
                violations = 0;
            }
        }
        prev_diff = diff;
        if (diff < tol) break;
    }
    grid.sup_abs = 0.0;
    for (double v : grid.S) grid.sup_abs = std::max(grid.sup_abs, std::abs(v));
    return grid;
}

// ---------------------------------------------------------------------------
// leaves
// ---------------------------------------------------------------------------

LeafField leaf_field(const DAMap& g, const SectionGrid& S) {
    LeafField f;
    f.mesh = S.mesh;
    f.ux.resize(S.S.size());
    f.uy.resize(S.S.size());
    double min_uy = 1.0;
    for (size_t id = 0; id < S.S.size(); ++id) {
        Vec2 d = g.vu + g.vs * S.S[id];
        if (d.y < 0) d = d * -1.0;
        double n = norm(d);
        f.ux[id] = d.x / n;
        f.uy[id] = d.y / n;
        min_uy = std::min(min_uy, d.y / n);
    }
    if (min_uy < 0.2)
        throw std::runtime_error("leaf_field: leaf direction not transverse to horizontals");
    return f;
}

Vec2 LeafField::dir(const Vec2& z) const {
    double x = frac(z.x) * mesh, y = frac(z.y) * mesh;
    int i0 = int(x), j0 = int(y);
    double fx = x - i0, fy = y - j0;
    int i1 = (i0 + 1) % mesh, j1 = (j0 + 1) % mesh;
    i0 %= mesh;
    j0 %= mesh;
    auto at = [&](const std::vector<double>& a, int i, int j) {
        return a[size_t(j) * size_t(mesh) + size_t(i)];
    };
    Vec2 d{(1 - fx) * (1 - fy) * at(ux, i0, j0) + fx * (1 - fy) * at(ux, i1, j0) +
               (1 - fx) * fy * at(ux, i0, j1) + fx * fy * at(ux, i1, j1),
           (1 - fx) * (1 - fy) * at(uy, i0, j0) + fx * (1 - fy) * at(uy, i1, j0) +
               (1 - fx) * fy * at(uy, i0, j1) + fx * fy * at(uy, i1, j1)};
    double n = norm(d);
    return d / n;
}

Vec2 advance_by_rise(const LeafField& field, Vec2 z, double rise,
                     const LeafAdvanceOptions& opts) {
    if (rise == 0.0) return z;
    double sgn = rise > 0 ? 1.0 : -1.0;
    double target = z.y + rise;
    double h = opts.step;
    auto rk4 = [&](Vec2 p, double step) {
        Vec2 k1 = field.dir(p) * sgn;
        Vec2 k2 = field.dir(p + k1 * (0.5 * step)) * sgn;
        Vec2 k3 = field.dir(p + k2 * (0.5 * step)) * sgn;
        Vec2 k4 = field.dir(p + k3 * step) * sgn;
        return p + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (step / 6.0);
    };
    long steps = 0;
    while (steps < opts.max_steps) {
        Vec2 zn = rk4(z, h);
        ++steps;
        if ((target - zn.y) * sgn <= 0.0) {
            // crossing inside this step: bisect the substep length
            double lo = 0.0, hi = h;
            Vec2 best = zn;
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (lo + hi);
                Vec2 zm = rk4(z, mid);
                if ((target - zm.y) * sgn <= 0.0) {
                    hi = mid;
                    best = zm;
                } else {
                    lo = mid;
                }
                if (std::abs(best.y - target) < opts.crossing_tol) break;
            }
            best.y = target;  // land exactly on the section
            return best;
        }
        z = zn;
    }
    throw std::runtime_error("advance_by_rise: step budget exhausted after arclength " +
                             std::to_string(double(steps) * h));
}

Vec2 leaf_advance(const DAMap& g, const SectionGrid& S, const Vec2& z, double target_height,
                  int direction, const LeafAdvanceOptions& opts) {
    LeafField field = leaf_field(g, S);
    double dy = frac(target_height) - frac(z.y);
    double rise;
    if (direction >= 0) {
        rise = dy > 0 ? dy : dy + 1.0;  // first crossing going up
    } else {
        rise = dy < 0 ? dy : dy - 1.0;  // first crossing going down
    }
    LeafAdvanceOptions o = opts;
    o.step = 1.0 / (4.0 * S.mesh);
    return advance_by_rise(field, z, rise, o);
}

double fibered_rise(const DAMap& g, double nu_scale) {
    return nu_scale * g.vu.y / g.vu.x;  // vu normalized as (1, slope)
}

Vec2 fibered_rotation_vector(const DAMap& g, double nu_scale) {
    return {frac(nu_scale), frac(fibered_rise(g, nu_scale))};
}

TorusLift build_fibered_f(std::shared_ptr<const DAMap> g, std::shared_ptr<const SectionGrid> S,
                          double nu_scale, const LeafAdvanceOptions& opts) {
    Vec2 rho = fibered_rotation_vector(*g, nu_scale);
    IndependenceResult ind = rational_independence(rho.x, rho.y, 50, 1e-9);
    if (ind.relation_found)
        throw std::invalid_argument("build_fibered_f: nu * v^u fails the independence check");
    auto field = std::make_shared<LeafField>(leaf_field(*g, *S));
    double rise = fibered_rise(*g, nu_scale);
    LeafAdvanceOptions o = opts;
    o.step = 1.0 / (4.0 * S->mesh);
    return {[field, rise, o](Vec2 z) { return advance_by_rise(*field, z, rise, o); },
            [field, rise, o](Vec2 z) { return advance_by_rise(*field, z, -rise, o); },
            "da_fibered(nu=" + std::to_string(nu_scale) + ")"};
}

BasinResult basin_membership(const DAMap& g, Vec2 z, long budget, double ball) {
    if (!(ball > 0) || ball >= g.scale)
        throw std::invalid_argument("basin_membership: ball must be positive and below the "
                                    "support scale");
    Vec2 z0 = g.fixed_point();
    z = torus_rep(z);
    for (long i = 0; i <= budget; ++i) {
        if (torus_dist(z, z0) < ball) return {BasinVerdict::InBasin, i};
        z = torus_rep(g.inverse(z));
    }
    return {BasinVerdict::NotWithinBudget, budget};
}

}  // namespace torusdyn
