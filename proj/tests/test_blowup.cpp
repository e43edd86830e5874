#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "torusdyn/blowup.hpp"
#include "torusdyn/circle.hpp"
#include "torusdyn/torus.hpp"

using namespace torusdyn;

namespace {

const double kAlpha = std::sqrt(2.0) - 1.0;
const double kBeta = std::sqrt(3.0) - 1.0;

// exact rational arithmetic: the independent oracle for the radial algebra
struct Frac {
    long long n = 0, d = 1;
    static long long g(long long a, long long b) { return b ? g(b, a % b) : a; }
    Frac(long long n_ = 0, long long d_ = 1) : n(n_), d(d_) {
        if (d < 0) { n = -n; d = -d; }
        long long c = g(n < 0 ? -n : n, d);
        if (c > 1) { n /= c; d /= c; }
    }
    Frac operator+(const Frac& o) const { return {n * o.d + o.n * d, d * o.d}; }
    Frac operator-(const Frac& o) const { return {n * o.d - o.n * d, d * o.d}; }
    Frac operator*(const Frac& o) const { return {n * o.n, d * o.d}; }
    Frac operator/(const Frac& o) const { return {n * o.d, d * o.n}; }
    double value() const { return double(n) / double(d); }
};

Frac g_frac(Frac r, Frac e) { return (r + e) / (Frac(1) + r * e); }
Frac g_inv_frac(Frac r, Frac e) { return (r - e) / (Frac(1) - r * e); }

struct Setup {
    DenjoyPair dj;
    TorusLift f;
    Vec2 z0;
    Setup()
        : dj(build_denjoy(kAlpha, geometric_schedule())),
          f(product_map(dj.lift, rotation_lift(kBeta))),
          z0{dj.cantor_point_from_base(0.20787957635076193), 0.45} {}
};

}  // namespace

TEST_CASE("radial algebra identities") {
    CHECK(g_eval(0.0, 1.0, 0.5).first == 0.5);
    for (double eps : {0.1, 0.37, 0.8, 0.99})
        CHECK(g_eval(1.0, 2.0, eps).first == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(g_eval(0.5, 0.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(q_eval(0.4, 0.0, 0.8, 0.5), std::invalid_argument);

    // strict monotonicity of g in r via finite differences
    for (double eps : {0.2, 0.5, 0.9}) {
        for (double r = 0.0; r < 0.999; r += 0.05) {
            CHECK(g_radial(r + 1e-6, eps) > g_radial(r, eps));
        }
    }
    // inverse identity
    for (double r = 0.05; r < 1.0; r += 0.07)
        CHECK(g_radial_inverse(g_radial(r, 0.5), 0.5) == doctest::Approx(r).epsilon(1e-13));
}

TEST_CASE("q map hits the paper boundary values and the exact interior oracle") {
    double eps = 0.8, eps0 = 0.5;
    CHECK(q_radial(eps0, eps, eps0) == doctest::Approx(0.65).epsilon(1e-14));
    CHECK(q_radial(eps, eps, eps0) == doctest::Approx(0.8).epsilon(1e-14));

    // independent evaluation with exact fractions: u = 7/8, composed Moebius maps
    Frac e(4, 5), e0(1, 2), ep = (e + e0) / Frac(2);
    Frac u = Frac(7, 10) / e;
    Frac u1 = g_inv_frac(u, e0 / e);
    Frac u2 = g_frac(u1, ep / e);
    Frac oracle = e * u2;
    CHECK(oracle.n == 6119);
    CHECK(oracle.d == 8120);
    CHECK(std::abs(q_radial(0.7, eps, eps0) - oracle.value()) < 1e-10);
    CHECK(oracle.value() == doctest::Approx(0.75356).epsilon(1e-4));

    // q inverse identity on the annulus
    for (double r = 0.5; r <= 0.8; r += 0.03)
        CHECK(q_radial_inverse(q_radial(r, eps, eps0), eps, eps0) ==
              doctest::Approx(r).epsilon(1e-12));
}

TEST_CASE("gap bound formula") {
    CHECK(gap_bound_formula(1, 0.2, 0.3, 0.4) == doctest::Approx(1.0 / 64.0));
    for (int n = 1; n <= 6; ++n)
        CHECK(gap_bound_formula(n, 1.0, 1.0, 1.0) <= std::pow(0.25, n + 2) + 1e-18);
    // sum of the caps is below 1/48
    double sum = 0;
    for (int n = 1; n <= 40; ++n) sum += std::pow(0.25, n + 2);
    CHECK(sum <= 1.0 / 48.0 + 1e-15);
}

TEST_CASE("stage 0 blow-up produces one disk and conjugates by h0") {
    Setup s;
    BlowupStatePtr st = run_blowup(s.f, {s.z0, "test"}, 0, {});
    CHECK(st->disks().size() == 1);
    CHECK(st->disks()[0].diameter ==
          doctest::Approx(2 * st->eps0() * st->chart().delta0).epsilon(1e-12));
    // f_0 = h0 o f o h0^{-1} on samples
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> unif(0, 1);
    for (int i = 0; i < 300; ++i) {
        Vec2 z{unif(rng), unif(rng)};
        if (torus_dist(z, s.z0) <= st->eps0() * st->chart().delta0 + 1e-6) continue;
        Vec2 expect = st->H(0, s.f.evaluate(st->H_inv(0, z)));
        CHECK(torus_dist(torus_rep(st->f_N(z)), torus_rep(expect)) < 1e-12);
    }
}

TEST_CASE("stage 1 creates three pairwise disjoint disks and is local") {
    Setup s;
    BlowupStatePtr st = run_blowup(s.f, {s.z0, "test"}, 1, {});
    const auto& disks = st->disks();
    REQUIRE(disks.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
        CHECK(polyline_is_simple(disks[i].boundary));
        for (size_t j = i + 1; j < 3; ++j)
            CHECK(closed_polylines_disjoint(disks[i].boundary, disks[j].boundary));
    }
    // f_1 equals f_0 off the stage-1 supports
    const StageRecord& rec = st->stage_records()[0];
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> unif(0, 1);
    int checked = 0;
    while (checked < 500) {
        Vec2 z{unif(rng), unif(rng)};
        if (rec.support_plus.contains_torus(z) || rec.support_minus.contains_torus(z)) continue;
        ++checked;
        CHECK(torus_dist(torus_rep(st->f_n(1, z)), torus_rep(st->f_n(0, z))) < 1e-12);
    }
    // image of gamma_0 lands on gamma_1 (sampled Hausdorff, collar transport)
    int M = 128;
    std::vector<Vec2> transported;
    for (int k = 0; k < M; ++k) {
        double theta = 2 * M_PI * k / M;
        Vec2 p = st->chart().to_torus(st->eps0() * (1 + 1e-9), theta);
        transported.push_back(torus_rep(st->f_N(p)));
    }
    const DiskRecord* g1 = nullptr;
    for (const auto& d : disks)
        if (d.index == 1) g1 = &d;
    REQUIRE(g1 != nullptr);
    double h = std::max(sampled_hausdorff(transported, g1->boundary),
                        sampled_hausdorff(g1->boundary, transported));
    CHECK(h < 1e-6 * st->chart().delta0);
}

TEST_CASE("four-stage blow-up satisfies the paper bounds") {
    Setup s;
    BlowupStatePtr st = run_blowup(s.f, {s.z0, "test"}, 4, {});
    const auto& disks = st->disks();
    REQUIRE(disks.size() == 9);

    SUBCASE("null sequence of diameters") {
        double prev_max = 1e9;
        for (int n = 1; n <= 4; ++n) {
            double mx = 0;
            for (const auto& d : disks)
                if (d.created_stage == n) mx = std::max(mx, d.diameter);
            CHECK(mx <= std::pow(0.25, n + 2));
            CHECK(mx <= prev_max + 1e-15);
            prev_max = mx;
        }
    }

    SUBCASE("stage records carry shrinking gap bounds and perturbation sups") {
        double sum_d = 0;
        for (const auto& rec : st->stage_records()) {
            CHECK(rec.d_n <= std::pow(0.25, rec.n + 2) + 1e-18);
            CHECK(rec.perturbation_sup <= 4.0 * rec.d_n);
            sum_d += rec.d_n;
        }
        CHECK(sum_d <= 1.0 / 48.0);
        CHECK(st->tail_bound() == doctest::Approx(std::pow(0.25, 6) / 3.0));
    }

    SUBCASE("stage monotonicity: earlier disks are bitwise unchanged") {
        BlowupStatePtr st2 = run_blowup(s.f, {s.z0, "test"}, 2, {});
        for (const auto& d2 : st2->disks()) {
            const DiskRecord* match = nullptr;
            for (const auto& d4 : disks)
                if (d4.index == d2.index) match = &d4;
            REQUIRE(match != nullptr);
            REQUIRE(match->boundary.size() == d2.boundary.size());
            for (size_t i = 0; i < d2.boundary.size(); ++i) {
                CHECK(match->boundary[i].x == d2.boundary[i].x);
                CHECK(match->boundary[i].y == d2.boundary[i].y);
            }
        }
    }

    SUBCASE("support locality of the stage maps") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> unif(0, 1);
        for (int n = 1; n <= 4; ++n) {
            const StageRecord& rec = st->stage_records()[size_t(n - 1)];
            int checked = 0;
            while (checked < 200) {
                Vec2 z{unif(rng), unif(rng)};
                if (rec.support_plus.contains_torus(z) ||
                    rec.support_minus.contains_torus(z))
                    continue;
                ++checked;
                CHECK(torus_dist(torus_rep(st->f_n(n, z)), torus_rep(st->f_n(n - 1, z))) <
                      1e-12);
            }
        }
    }

    SUBCASE("collapse map sends disk samples to the base orbit") {
        for (const auto& d : disks) {
            Vec2 target = torus_rep(st->base_orbit(d.index));
            std::mt19937_64 rng(size_t(d.index) + 100);
            std::uniform_real_distribution<double> unif(0, 1);
            // samples of Cl(Sigma_k): interpolate between marker and boundary
            for (int i = 0; i < 50; ++i) {
                double t = 0.9 * unif(rng);
                const Vec2& b = d.boundary[size_t(unif(rng) * (d.boundary.size() - 1))];
                Vec2 p = torus_rep(d.marker + torus_diff(b, d.marker) * t);
                Vec2 collapsed = torus_rep(st->phi_N(p));
                CHECK(torus_dist(collapsed, target) < 1e-8);
            }
        }
    }

    SUBCASE("conjugacy bookkeeping off the disks") {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> unif(0, 1);
        int checked = 0;
        while (checked < 400) {
            Vec2 z{unif(rng), unif(rng)};
            bool near = false;
            for (const auto& d : disks) {
                Box2 b = d.bbox;
                b.inflate(0.01);
                if (b.contains_torus(z)) near = true;
            }
            if (near) continue;
            ++checked;
            Vec2 lhs = torus_rep(st->phi_N(st->f_N(z)));
            Vec2 rhs = torus_rep(s.f.evaluate(st->phi_N(z)));
            CHECK(torus_dist(lhs, rhs) < 1e-8);
        }
    }

    SUBCASE("lift commutes with integer translations") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> unif(0, 1);
        TorusLift lift = st->lift(st);
        for (int i = 0; i < 200; ++i) {
            Vec2 z{unif(rng), unif(rng)};
            Vec2 a = lift.evaluate(z + Vec2{2, -1});
            Vec2 b = lift.evaluate(z) + Vec2{2, -1};
            CHECK(norm(a - b) < 1e-10);
            CHECK(norm(lift.inverse_evaluate(lift.evaluate(z)) - z) < 1e-9);
        }
    }
}

TEST_CASE("wedge grid geometry and hits for vertical-line arguments") {
    // denjoy x full circle: every wedge should find witnesses on vertical lines
    DenjoyPair dj = build_denjoy(kAlpha, geometric_schedule());
    double x0 = dj.cantor_point_from_base(0.20787957635076193);
    CantorSetSpec q2 = full_circle_spec();
    WedgeCheckConfig cfg;
    cfg.delta0 = 0.1;
    WedgeReport report = wedge_sample_check(dj.cantor, q2, {x0, 0.45},
                                            wedge_grid(4, 8, {0.3, 1.2}), cfg);
    CHECK(report.misses == 0);
    CHECK(report.hits == int(report.results.size()));
    for (const auto& res : report.results) {
        if (!res.hit) continue;
        CHECK(cantor_membership(dj.cantor, res.witness.x, cfg.tol).cls ==
              CantorClass::IrrationalPart);
        double dist = torus_dist(res.witness, {x0, 0.45});
        CHECK(dist < res.wedge.r * cfg.delta0);
    }
}

TEST_CASE("quadratic product wedges all hit, linear control misses somewhere") {
    double x0 = 0.3, y0 = 0.62;
    CantorSetSpec quad1 = build_quadratic_gap_cantor(x0, 1.0, {x0 - 0.05, x0 + 0.05}, 200);
    CantorSetSpec quad2 = build_quadratic_gap_cantor(y0, 1.0, {y0 - 0.05, y0 + 0.05}, 200);
    CantorSetSpec lin = build_linear_gap_cantor(x0, {x0 - 0.05, x0 + 0.05}, 200);
    WedgeCheckConfig cfg;
    cfg.delta0 = 0.025;
    auto grid = wedge_grid(6, 8, {M_PI / 24, M_PI / 6, 1.4});
    WedgeReport good = wedge_sample_check(quad1, quad2, {x0, y0}, grid, cfg);
    CHECK(good.misses == 0);
    WedgeReport control = wedge_sample_check(lin, quad2, {x0, y0}, grid, cfg);
    CHECK(control.misses >= 1);
}
