#include "torusdyn/blowup.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace torusdyn {

// ---------------------------------------------------------------------------
// radial algebra
// ---------------------------------------------------------------------------

double g_radial(double r, double eps) { return (r + eps) / (1.0 + r * eps); }
double g_radial_inverse(double r, double eps) { return (r - eps) / (1.0 - r * eps); }

std::pair<double, double> g_eval(double r, double theta, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("g_eval: eps must be in (0,1)");
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("g_eval: r must be in [0,1]");
    return {g_radial(r, eps), theta};
}

double q_radial(double r, double eps, double eps0) {
    // q_eps = ghat_{eps'/eps} o ghat_{eps0/eps}^{-1} rescaled into [0, eps]
    double epsp = 0.5 * (eps + eps0);
    double u = r / eps;
    double u1 = g_radial_inverse(u, eps0 / eps);
    double u2 = g_radial(u1, epsp / eps);
    return eps * u2;
}

double q_radial_inverse(double r, double eps, double eps0) {
    double epsp = 0.5 * (eps + eps0);
    double u = r / eps;
    double u1 = g_radial_inverse(u, epsp / eps);
    double u2 = g_radial(u1, eps0 / eps);
    return eps * u2;
}

std::pair<double, double> q_eval(double r, double theta, double eps, double eps0) {
    if (!(eps0 > 0.0 && eps0 < eps && eps < 1.0))
        throw std::invalid_argument("q_eval: need 0 < eps0 < eps < 1");
    if (!(r >= eps0 - 1e-15 && r <= eps + 1e-15))
        throw std::invalid_argument("q_eval: r must lie in [eps0, eps]");
    return {q_radial(std::clamp(r, eps0, eps), eps, eps0), theta};
}

double gap_bound_formula(int n, double d_pm, double d_plus_delta, double d_minus_delta) {
    double cap = std::pow(0.25, double(n + 1));
    return 0.25 * std::min(std::min(cap, d_pm), std::min(d_plus_delta, d_minus_delta));
}

// ---------------------------------------------------------------------------
// RadialChart
// ---------------------------------------------------------------------------

Vec2 RadialChart::to_torus(double r, double theta) const {
    return z0 + Vec2{std::cos(theta), std::sin(theta)} * (r * delta0);
}

std::pair<double, double> RadialChart::from_torus(const Vec2& z) const {
    Vec2 d = torus_diff(z, z0);
    return {norm(d) / delta0, std::atan2(d.y, d.x)};
}

// ---------------------------------------------------------------------------
// BlowupState chain evaluation
// ---------------------------------------------------------------------------

Vec2 BlowupState::base_orbit(long k) const {
    Vec2 z = chart_.z0;
    for (long i = 0; i < std::labs(k); ++i)
        z = k > 0 ? base_.evaluate(z) : base_.inverse_evaluate(z);
    return z;
}

Vec2 BlowupState::h0(Vec2 z) const {
    Vec2 d = torus_diff(z, chart_.z0);
    double r = norm(d) / chart_.delta0;
    if (r >= 1.0 || r == 0.0) return z;
    double rp = g_radial(r, cfg_.eps0);
    return z + d * (rp / r - 1.0);
}

Vec2 BlowupState::h0_inv(Vec2 z) const {
    Vec2 d = torus_diff(z, chart_.z0);
    double r = norm(d) / chart_.delta0;
    if (r >= 1.0) return z;
    if (r <= cfg_.eps0) return z - d;  // extended: collapse Cl(Sigma_0) to z0
    double rp = g_radial_inverse(r, cfg_.eps0);
    return z + d * (rp / r - 1.0);
}

Vec2 BlowupState::h_signed(int n, int sign, Vec2 z) const {
    const StageRecord& st = stage_records_[size_t(n - 1)];
    const Box2& box = sign > 0 ? st.support_plus : st.support_minus;
    if (!box.contains_torus(torus_rep(z))) return z;
    double eps = sign > 0 ? st.eps_plus : st.eps_minus;
    Vec2 u = f_n_pow(n - 1, -long(sign) * n, z);
    Vec2 d = torus_diff(u, chart_.z0);
    double r = norm(d) / chart_.delta0;
    if (r < cfg_.eps0 || r > eps || r == 0.0) return z;
    double rp = q_radial(r, eps, cfg_.eps0);
    Vec2 up = u + d * (rp / r - 1.0);
    return f_n_pow(n - 1, long(sign) * n, up);
}

Vec2 BlowupState::h_signed_inv(int n, int sign, Vec2 z) const {
    const StageRecord& st = stage_records_[size_t(n - 1)];
    const Box2& box = sign > 0 ? st.support_plus : st.support_minus;
    if (!box.contains_torus(torus_rep(z))) return z;
    double eps = sign > 0 ? st.eps_plus : st.eps_minus;
    double epsp = 0.5 * (eps + cfg_.eps0);
    Vec2 u = f_n_pow(n - 1, -long(sign) * n, z);
    Vec2 d = torus_diff(u, chart_.z0);
    double r = norm(d) / chart_.delta0;
    if (r > eps || r == 0.0) return z;
    double rp;
    if (r >= epsp) {
        rp = q_radial_inverse(r, eps, cfg_.eps0);
    } else {
        // extended into the open disk so that the collapse map stays defined
        rp = r * (cfg_.eps0 / epsp);
    }
    Vec2 up = u + d * (rp / r - 1.0);
    return f_n_pow(n - 1, long(sign) * n, up);
}

Vec2 BlowupState::hhat(int n, Vec2 z) const { return h_signed(n, -1, h_signed(n, +1, z)); }

Vec2 BlowupState::hhat_inv(int n, Vec2 z) const {
    return h_signed_inv(n, +1, h_signed_inv(n, -1, z));
}

Vec2 BlowupState::H(int n, Vec2 z) const {
    z = h0(z);
    for (int m = 1; m <= n; ++m) z = hhat(m, z);
    return z;
}

Vec2 BlowupState::H_inv(int n, Vec2 z) const {
    for (int m = n; m >= 1; --m) z = hhat_inv(m, z);
    return h0_inv(z);
}

Vec2 BlowupState::f_n_pow(int n, long k, Vec2 z) const {
    if (k == 0) return z;
    Vec2 u = H_inv(n, z);
    for (long i = 0; i < std::labs(k); ++i)
        u = k > 0 ? base_.evaluate(u) : base_.inverse_evaluate(u);
    return H(n, u);
}

Vec2 BlowupState::f_n(int n, Vec2 z) const { return f_n_pow(n, 1, z); }
Vec2 BlowupState::f_n_inv(int n, Vec2 z) const { return f_n_pow(n, -1, z); }
Vec2 BlowupState::phi_n(int n, Vec2 z) const { return H_inv(n, z); }

TorusLift BlowupState::lift(const BlowupStatePtr& self) const {
    int N = stages();
    return {[self, N](Vec2 z) { return self->f_n(N, z); },
            [self, N](Vec2 z) { return self->f_n_inv(N, z); },
            "blowup[N=" + std::to_string(N) + "](" + base_.label + ")"};
}

double BlowupState::tail_bound() const {
    return std::pow(0.25, double(stages() + 2)) / 3.0;
}

double BlowupState::gap_bound_next(Vec2& z_plus, Vec2& z_minus) const {
    int n = stages() + 1;
    z_plus = H(stages(), base_orbit(n));
    z_minus = H(stages(), base_orbit(-n));
    double d_pm = torus_dist(z_plus, z_minus);
    double d_plus = std::numeric_limits<double>::infinity();
    double d_minus = std::numeric_limits<double>::infinity();
    for (const DiskRecord& disk : disks_) {
        if (point_in_closed_polyline(z_plus, disk.boundary) ||
            point_in_closed_polyline(z_minus, disk.boundary))
            throw std::runtime_error("blowup stage " + std::to_string(n) +
                                     ": puncture collided with existing disk");
        d_plus = std::min(d_plus, dist_to_closed_polyline(z_plus, disk.boundary));
        d_minus = std::min(d_minus, dist_to_closed_polyline(z_minus, disk.boundary));
    }
    const double floor_ = 1e-12;
    if (d_pm <= floor_ || d_plus <= floor_ || d_minus <= floor_)
        throw std::runtime_error("blowup stage " + std::to_string(n) +
                                 ": puncture distances below numerical floor");
    return gap_bound_formula(n, d_pm, d_plus, d_minus);
}

// ---------------------------------------------------------------------------
// stage construction
// ---------------------------------------------------------------------------

namespace {

std::vector<Vec2> chart_circle(const RadialChart& chart, double r, int M) {
    std::vector<Vec2> pts;
    pts.reserve(size_t(M));
    for (int j = 0; j < M; ++j) {
        double theta = 2.0 * M_PI * double(j) / double(M);
        pts.push_back(torus_rep(chart.to_torus(r, theta)));
    }
    return pts;
}

}  // namespace

void BlowupState::run_stage() {
    int n = stages() + 1;
    Vec2 z_plus, z_minus;
    double d_n = gap_bound_next(z_plus, z_minus);

    StageRecord rec;
    rec.n = n;
    rec.d_n = d_n;
    rec.z_plus = z_plus;
    rec.z_minus = z_minus;

    const double eps_hi_cap = 0.98;
    for (int sign : {+1, -1}) {
        Vec2 z_punct = sign > 0 ? z_plus : z_minus;
        auto image_diam = [&](double eps, int M) {
            std::vector<Vec2> pts = chart_circle(chart_, eps, M);
            std::vector<Vec2> images;
            images.reserve(pts.size() + 1);
            for (const Vec2& p : pts) images.push_back(torus_rep(f_n_pow(n - 1, sign * n, p)));
            images.push_back(z_punct);
            return std::make_pair(sampled_diameter(images), images);
        };

        // bisection on t in (0,1], eps = eps0 + t (cap - eps0); diameter is
        // monotone in eps by set inclusion, sampled monotone up to noise
        double t_lo = 1e-7, t_hi = 1.0, t_good = -1.0;
        auto eps_of = [&](double t) { return cfg_.eps0 + t * (eps_hi_cap - cfg_.eps0); };
        double dia_hi = image_diam(eps_of(t_hi), cfg_.search_samples).first;
        if (cfg_.diam_safety * dia_hi <= d_n) {
            t_good = t_hi;
        } else {
            double dia_lo = image_diam(eps_of(t_lo), cfg_.search_samples).first;
            if (cfg_.diam_safety * dia_lo > d_n)
                throw std::runtime_error(
                    "blowup stage " + std::to_string(n) + ": eps search failed, min diameter " +
                    std::to_string(dia_lo) + " exceeds bound " + std::to_string(d_n));
            for (int it = 0; it < 48; ++it) {
                double t_mid = 0.5 * (t_lo + t_hi);
                double dia = image_diam(eps_of(t_mid), cfg_.search_samples).first;
                if (cfg_.diam_safety * dia <= d_n) {
                    t_lo = t_mid;
                    t_good = t_mid;
                } else {
                    t_hi = t_mid;
                }
            }
            if (t_good < 0) t_good = t_lo;
        }

        // final verification at full boundary resolution, shrinking if needed
        double eps = eps_of(t_good);
        double dia_final = 0.0;
        std::vector<Vec2> outer;
        for (int attempt = 0; attempt < 12; ++attempt) {
            auto [dia, images] = image_diam(eps, cfg_.boundary_samples);
            if (cfg_.diam_safety * dia <= d_n) {
                dia_final = dia;
                outer = std::move(images);
                break;
            }
            t_good *= 0.5;
            eps = eps_of(t_good);
            if (t_good < 1e-9)
                throw std::runtime_error("blowup stage " + std::to_string(n) +
                                         ": eps search failed at full resolution");
        }
        if (outer.empty())
            throw std::runtime_error("blowup stage " + std::to_string(n) +
                                     ": eps search failed at full resolution");

        double epsp = 0.5 * (eps + cfg_.eps0);
        Box2 box = bounding_box(outer);
        box.inflate(2.0 * dia_final + 1e-12);

        // new disk boundary gamma_{sign n} = f_{n-1}^{sign n}(C_{eps'})
        std::vector<Vec2> gamma;
        gamma.reserve(size_t(cfg_.boundary_samples));
        for (const Vec2& p : chart_circle(chart_, epsp, cfg_.boundary_samples))
            gamma.push_back(torus_rep(f_n_pow(n - 1, sign * n, p)));

        DiskRecord disk;
        disk.index = sign * n;
        disk.boundary = gamma;
        disk.marker = z_punct;
        std::vector<Vec2> with_marker = gamma;
        with_marker.push_back(z_punct);
        disk.diameter = sampled_diameter(with_marker);
        disk.bbox = bounding_box(gamma);
        disk.bbox.inflate(1e-12);
        disk.created_stage = n;

        if (sign > 0) {
            rec.eps_plus = eps;
            rec.eps_prime_plus = epsp;
            rec.support_plus = box;
            rec.measured_diam_plus = dia_final;
        } else {
            rec.eps_minus = eps;
            rec.eps_prime_minus = epsp;
            rec.support_minus = box;
            rec.measured_diam_minus = dia_final;
        }
        disks_.push_back(std::move(disk));
    }

    // disjointness of the new disks against everything existing
    for (size_t i = disks_.size() - 2; i < disks_.size(); ++i) {
        for (size_t j = 0; j < i; ++j) {
            if (!disks_[i].bbox.overlaps_torus(disks_[j].bbox)) continue;
            if (!closed_polylines_disjoint(disks_[i].boundary, disks_[j].boundary))
                throw std::runtime_error("blowup stage " + std::to_string(n) +
                                         ": new disk intersects an existing disk");
        }
    }

    stage_records_.push_back(rec);

    // sampled perturbation sup |f_n - f_{n-1}|
    std::mt19937_64 rng(cfg_.rng_seed + uint64_t(n));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double sup = 0.0;
    for (int i = 0; i < 1000; ++i) {
        Vec2 z{unif(rng), unif(rng)};
        sup = std::max(sup, torus_dist(torus_rep(f_n(n, z)), torus_rep(f_n(n - 1, z))));
    }
    stage_records_.back().perturbation_sup = sup;
}

BlowupStatePtr run_blowup(const TorusLift& f, const RegularPointCert& cert, int N,
                          const BlowupConfig& cfg) {
    if (N < 0) throw std::invalid_argument("run_blowup: N must be >= 0");
    if (!(cfg.eps0 > 0 && cfg.eps0 < 1)) throw std::invalid_argument("run_blowup: bad eps0");
    auto state = std::make_shared<BlowupState>();
    state->base_ = f;
    state->cfg_ = cfg;
    state->chart_.z0 = torus_rep(cert.z0);
    state->chart_.delta0 = std::min(0.25, 0.5 * cfg.window_halfwidth);

    // stage 0: central blow-up, Sigma_0 = Int(B_{eps0 delta0})
    DiskRecord disk0;
    disk0.index = 0;
    disk0.boundary = chart_circle(state->chart_, cfg.eps0, cfg.boundary_samples);
    disk0.marker = state->chart_.z0;
    disk0.diameter = 2.0 * cfg.eps0 * state->chart_.delta0;
    disk0.bbox = bounding_box(disk0.boundary);
    disk0.bbox.inflate(1e-12);
    disk0.created_stage = 0;
    state->disks_.push_back(std::move(disk0));

    for (int n = 1; n <= N; ++n) {
        try {
            state->run_stage();
        } catch (const std::exception& e) {
            throw std::runtime_error("run_blowup[" + cert.provenance + "]: " + e.what());
        }
    }
    return state;
}

std::string BlowupState::manifest_json() const {
    nlohmann::json j;
    j["stages"] = stages();
    j["eps0"] = cfg_.eps0;
    j["delta0"] = chart_.delta0;
    j["z0"] = {chart_.z0.x, chart_.z0.y};
    j["tail_bound"] = tail_bound();
    j["stage_records"] = nlohmann::json::array();
    for (const StageRecord& s : stage_records_) {
        nlohmann::json js;
        js["n"] = s.n;
        js["d_n"] = s.d_n;
        js["eps_plus"] = s.eps_plus;
        js["eps_minus"] = s.eps_minus;
        js["eps_prime_plus"] = s.eps_prime_plus;
        js["eps_prime_minus"] = s.eps_prime_minus;
        js["measured_diam_plus"] = s.measured_diam_plus;
        js["measured_diam_minus"] = s.measured_diam_minus;
        js["perturbation_sup"] = s.perturbation_sup;
        j["stage_records"].push_back(js);
    }
    j["disks"] = nlohmann::json::array();
    for (const DiskRecord& d : disks_) {
        nlohmann::json jd;
        jd["index"] = d.index;
        jd["diameter"] = d.diameter;
        jd["created_stage"] = d.created_stage;
        jd["bbox_center"] = {d.bbox.center.x, d.bbox.center.y};
        jd["bbox_half"] = {d.bbox.half.x, d.bbox.half.y};
        j["disks"].push_back(jd);
    }
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// wedges
// ---------------------------------------------------------------------------

std::vector<WedgeSpec> wedge_grid(int nr, int ntheta, const std::vector<double>& widths) {
    std::vector<WedgeSpec> out;
    for (int i = 0; i < nr; ++i) {
        double r = double(i + 1) / double(nr);
        for (int j = 0; j < ntheta; ++j) {
            double t1 = 2.0 * M_PI * double(j) / double(ntheta) + 0.1;
            for (double w : widths) out.push_back({r, t1, t1 + w});
        }
    }
    return out;
}

namespace {

struct Sector {
    Vec2 e1, e2;  // rays; interior is CCW from e1 to e2, opening < pi
    double R;     // radius

    bool contains(const Vec2& p) const {
        double n2 = dot(p, p);
        if (!(n2 > 0.0) || n2 >= R * R) return false;
        return cross(e1, p) > 0.0 && cross(e2, p) < 0.0;
    }
    // intersection of the sector with the vertical line x = xi: y-interval
    bool y_interval(double xi, double& ylo, double& yhi) const {
        if (std::abs(xi) >= R) return false;
        double circ = std::sqrt(R * R - xi * xi);
        ylo = -circ;
        yhi = circ;
        // cross(e1, (xi, y)) = e1.x y - e1.y xi > 0
        for (int which = 0; which < 2; ++which) {
            Vec2 e = which == 0 ? e1 : e2;
            double sgn = which == 0 ? 1.0 : -1.0;  // e2 constraint is cross < 0
            double a = e.x * sgn, b = -e.y * xi * sgn;
            // need a y + b > 0
            if (a > 1e-300) {
                ylo = std::max(ylo, -b / a);
            } else if (a < -1e-300) {
                yhi = std::min(yhi, -b / a);
            } else if (b <= 0.0) {
                return false;
            }
        }
        return yhi - ylo > 0.0;
    }
    bool x_interval(double yi, double& xlo, double& xhi) const {
        // mirror through the diagonal: swap coordinates flips cross sign
        Sector m{{e2.y, e2.x}, {e1.y, e1.x}, R};
        return m.y_interval(yi, xlo, xhi);
    }
    // axis shadow [lo, hi] of the sector
    void shadow(bool x_axis, double& lo, double& hi) const {
        auto coord = [&](const Vec2& v) { return x_axis ? v.x : v.y; };
        lo = std::min(0.0, std::min(coord(e1), coord(e2)) * R);
        hi = std::max(0.0, std::max(coord(e1), coord(e2)) * R);
        // extreme axis directions inside the sector
        const Vec2 dirs[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (const Vec2& d : dirs) {
            if (cross(e1, d) > 0 && cross(e2, d) < 0) {
                lo = std::min(lo, coord(d) * R);
                hi = std::max(hi, coord(d) * R);
            }
        }
    }
};

}  // namespace

WedgeReport wedge_sample_check(const CantorSetSpec& Q1, const CantorSetSpec& Q2, Vec2 z0,
                               const std::vector<WedgeSpec>& wedges,
                               const WedgeCheckConfig& cfg) {
    WedgeReport report;
    for (const WedgeSpec& w : wedges) {
        double dtheta = w.theta2 - w.theta1;
        dtheta -= 2.0 * M_PI * std::floor(dtheta / (2.0 * M_PI));
        if (!(dtheta > 0 && dtheta < M_PI) || !(w.r > 0 && w.r <= 1.0))
            throw std::invalid_argument("wedge_sample_check: bad wedge spec");
        Sector sec;
        sec.e1 = {std::cos(w.theta1), std::sin(w.theta1)};
        sec.e2 = {std::cos(w.theta1 + dtheta), std::sin(w.theta1 + dtheta)};
        sec.R = w.r * cfg.delta0;

        WedgeResult res;
        res.wedge = w;

        double sxlo, sxhi, sylo, syhi;
        sec.shadow(true, sxlo, sxhi);
        sec.shadow(false, sylo, syhi);
        bool slice_x = (sxhi - sxlo) >= (syhi - sylo);

        auto try_witness = [&](double u, double vlo, double vhi) -> bool {
            // u is the slice coordinate (x if slice_x else y); search the other
            const CantorSetSpec& Qv = slice_x ? Q2 : Q1;
            double base = slice_x ? z0.y : z0.x;
            auto found = Qv.find_irrational_point(base + vlo, base + vhi, cfg.tol, 8);
            if (!found) return false;
            double v = *found - base;
            Vec2 p = slice_x ? Vec2{u, v} : Vec2{v, u};
            if (!sec.contains(p)) return false;
            Vec2 witness = torus_rep(z0 + p);
            // confirm both coordinates against the specs
            if (Q1.classify(witness.x, cfg.tol).cls != CantorClass::IrrationalPart) return false;
            if (Q2.classify(witness.y, cfg.tol).cls != CantorClass::IrrationalPart) return false;
            for (const Vec2& ex : cfg.excluded_orbit)
                if (torus_dist(witness, ex) <= std::max(cfg.exclusion_radius, cfg.tol))
                    return false;
            res.witness = witness;
            return true;
        };

        const CantorSetSpec& Qu = slice_x ? Q1 : Q2;
        double ubase = slice_x ? z0.x : z0.y;
        double ulo = slice_x ? sxlo : sylo;
        double uhi = slice_x ? sxhi : syhi;

        bool hit = false;
        for (int level = 0; level < cfg.scale_levels && !hit; ++level) {
            double scale = std::pow(0.5, double(level));
            double lo = ulo * scale, hi = uhi * scale;
            if (hi - lo < 4.0 * cfg.tol) break;
            auto segs = Qu.uncovered_segments(ubase + lo, ubase + hi);
            int tried = 0;
            for (auto& [a, b] : segs) {
                if (hit || tried >= cfg.x_candidates) break;
                if (b - a < 4.0 * cfg.tol) continue;
                for (double frac_pos : {0.5, 0.25, 0.75}) {
                    double u = a + frac_pos * (b - a) - ubase;
                    double vlo, vhi;
                    bool ok = slice_x ? sec.y_interval(u, vlo, vhi) : sec.x_interval(u, vlo, vhi);
                    if (!ok || vhi - vlo < 4.0 * cfg.tol) continue;
                    // check the slice coordinate itself is irrational part
                    if (Qu.classify(frac(ubase + u), cfg.tol).cls != CantorClass::IrrationalPart)
                        continue;
                    if (try_witness(u, vlo, vhi)) {
                        hit = true;
                        break;
                    }
                }
                ++tried;
            }
        }
        res.hit = hit;
        if (hit)
            ++report.hits;
        else
            ++report.misses;
        report.results.push_back(res);
    }
    return report;
}

}  // namespace torusdyn
