#include "torusdyn/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <random>
#include <sstream>

#include "torusdyn/blowup.hpp"
#include "torusdyn/circle.hpp"
#include "torusdyn/classify.hpp"
#include "torusdyn/da.hpp"
#include "torusdyn/io.hpp"
#include "torusdyn/pipelines.hpp"
#include "torusdyn/torus.hpp"

namespace torusdyn {

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void add(CriterionReport& rep, const std::string& name, bool pass, const std::string& measured) {
    rep.checks.push_back({rep.criterion, name, pass, measured});
}

// exact rational arithmetic over int64, used as the independent oracle for the
// radial-map algebra (criterion 4)
struct Frac {
    long long n = 0, d = 1;
    static long long gcdll(long long a, long long b) { return b ? gcdll(b, a % b) : a; }
    void reduce() {
        if (d < 0) { n = -n; d = -d; }
        long long g = gcdll(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
    }
    Frac(long long n_ = 0, long long d_ = 1) : n(n_), d(d_) { reduce(); }
    Frac operator+(const Frac& o) const { return Frac(n * o.d + o.n * d, d * o.d); }
    Frac operator-(const Frac& o) const { return Frac(n * o.d - o.n * d, d * o.d); }
    Frac operator*(const Frac& o) const { return Frac(n * o.n, d * o.d); }
    Frac operator/(const Frac& o) const { return Frac(n * o.d, d * o.n); }
    double value() const { return double(n) / double(d); }
};

Frac g_frac(const Frac& r, const Frac& eps) {
    return (r + eps) / (Frac(1) + r * eps);
}
Frac g_inv_frac(const Frac& r, const Frac& eps) {
    return (r - eps) / (Frac(1) - r * eps);
}

Frac q_frac(const Frac& r, const Frac& eps, const Frac& eps0) {
    Frac epsp = (eps + eps0) / Frac(2);
    Frac u = r / eps;
    Frac u1 = g_inv_frac(u, eps0 / eps);
    Frac u2 = g_frac(u1, epsp / eps);
    return eps * u2;
}

// --- synthetic bitmaps for the classifier oracle suite ---------------------

OccupancyGrid disk_bitmap(int R, double cx, double cy, double radius, bool complement_disk) {
    OccupancyGrid grid(R);
    for (int j = 0; j < R; ++j)
        for (int i = 0; i < R; ++i) {
            Vec2 c{(i + 0.5) / R, (j + 0.5) / R};
            bool inside = torus_dist(c, {cx, cy}) < radius;
            bool marked = complement_disk ? inside : !inside;
            if (marked) grid.set(i, j);
        }
    grid.provenance = complement_disk ? "complement_of_disk" : "disk";
    return grid;
}

OccupancyGrid strip_bitmap(int R, long p, long q, double width) {
    OccupancyGrid grid(R);
    for (int j = 0; j < R; ++j)
        for (int i = 0; i < R; ++i) {
            Vec2 c{(i + 0.5) / R, (j + 0.5) / R};
            double v = frac(double(q) * c.x - double(p) * c.y);
            bool in_band = std::abs(circle_diff(v, 0.5)) < 0.5 * width;
            if (!in_band) grid.set(i, j);
        }
    grid.provenance = "strip";
    return grid;
}

OccupancyGrid downsample_center(const OccupancyGrid& grid, int R2) {
    OccupancyGrid out(R2);
    int f = grid.R / R2;
    for (int j = 0; j < R2; ++j)
        for (int i = 0; i < R2; ++i)
            if (grid.at(i * f + f / 2, j * f + f / 2)) out.set(i, j);
    out.provenance = grid.provenance + "_downsampled";
    return out;
}

// independent brute-force deck-subgroup oracle on a small grid: DFS over
// (cell, offset) states, offsets in [-4,4]^2, generators in [-2,2]^2
DeckResult brute_force_deck(const OccupancyGrid& grid, const GridComponent& comp) {
    int R = grid.R;
    const int P = 4;
    const int W = 2 * P + 1;
    std::vector<uint8_t> in_comp(size_t(R) * size_t(R), 0);
    for (int c : comp.cells) in_comp[size_t(c)] = 1;
    int base = comp.cells.front();
    std::vector<uint8_t> seen(size_t(R) * size_t(R) * W * W, 0);
    std::vector<std::array<int, 3>> stack{{base, 0, 0}};
    auto sid = [&](int cell, int ox, int oy) {
        return (size_t(cell) * W + size_t(ox + P)) * W + size_t(oy + P);
    };
    seen[sid(base, 0, 0)] = 1;
    std::vector<std::pair<long, long>> found;
    const int dx4[] = {1, -1, 0, 0}, dy4[] = {0, 0, 1, -1};
    while (!stack.empty()) {
        auto [cell, ox, oy] = stack.back();
        stack.pop_back();
        for (int t = 0; t < 4; ++t) {
            int cx = cell % R + dx4[t], cy = cell / R + dy4[t];
            int nox = ox, noy = oy;
            if (cx < 0) { cx += R; nox--; }
            if (cx >= R) { cx -= R; nox++; }
            if (cy < 0) { cy += R; noy--; }
            if (cy >= R) { cy -= R; noy++; }
            if (std::abs(nox) > P || std::abs(noy) > P) continue;
            int nc = cy * R + cx;
            if (!in_comp[size_t(nc)] || seen[sid(nc, nox, noy)]) continue;
            seen[sid(nc, nox, noy)] = 1;
            if (nc == base && (nox || noy) && std::abs(nox) <= 2 && std::abs(noy) <= 2)
                found.emplace_back(nox, noy);
            stack.push_back({nc, nox, noy});
        }
    }
    DeckResult res;
    if (found.empty()) return res;
    auto [p0, q0] = found.front();
    for (auto& [p, q] : found)
        if (p0 * q - q0 * p != 0) {
            res.subgroup = DeckSubgroup::Full;
            return res;
        }
    long bp = p0, bq = q0;
    for (auto& [p, q] : found)
        if (std::labs(p) + std::labs(q) < std::labs(bp) + std::labs(bq)) { bp = p; bq = q; }
    long g = std::gcd(std::labs(bp), std::labs(bq));
    bp /= g;
    bq /= g;
    if (bp < 0 || (bp == 0 && bq < 0)) { bp = -bp; bq = -bq; }
    res.subgroup = DeckSubgroup::Cyclic;
    res.p = bp;
    res.q = bq;
    return res;
}

GridComponent largest_component(const std::vector<GridComponent>& comps) {
    size_t best = 0;
    for (size_t i = 1; i < comps.size(); ++i)
        if (comps[i].size() > comps[best].size()) best = i;
    return comps[best];
}

// --- criteria ---------------------------------------------------------------

CriterionReport criterion_rotation() {
    CriterionReport rep;
    rep.criterion = 1;
    TorusLift tr = translation_map(0.3, 0.7);
    std::vector<Vec2> seeds5{{0.1, 0.2}, {0.3, 0.8}, {0.55, 0.41}, {0.9, 0.05}, {0.62, 0.33}};
    RotationEstimate e1 = rotation_vector_estimate(tr, seeds5, 50);
    double err1 = norm(e1.vector - Vec2{0.3, 0.7});
    add(rep, "translation(0.3,0.7) estimate exact", err1 <= 1e-12, fmt(err1));
    add(rep, "translation spread zero", e1.seed_spread <= 1e-12, fmt(e1.seed_spread));
    add(rep, "translation cauchy gap zero", e1.cauchy_gap <= 1e-12, fmt(e1.cauchy_gap));

    double alpha = std::sqrt(2.0) - 1.0, beta = std::sqrt(3.0) - 1.0;
    DenjoyPair dj = build_denjoy(alpha, geometric_schedule());
    TorusLift f = product_map(dj.lift, rotation_lift(beta));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(0, 1);
    std::vector<Vec2> seeds20;
    for (int i = 0; i < 20; ++i) seeds20.push_back({unif(rng), unif(rng)});
    RotationEstimate e2 = rotation_vector_estimate(f, seeds20, 100000);
    double err2 = norm(e2.vector - Vec2{alpha, beta});
    add(rep, "denjoy x rotation within 1e-3 of (sqrt2-1, sqrt3-1)", err2 < 1e-3, fmt(err2));
    return rep;
}

CriterionReport criterion_denjoy() {
    CriterionReport rep;
    rep.criterion = 2;
    double alpha = std::sqrt(2.0) - 1.0;
    DenjoyPair dj = build_denjoy(alpha, geometric_schedule());
    double sup = 0.0;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(0, 1);
    for (int i = 0; i < 10000; ++i) {
        double x = unif(rng);
        double lhs = dj.collapse(dj.lift.evaluate(x));
        double rhs = frac(dj.collapse(x) + alpha);
        sup = std::max(sup, circle_dist(lhs, rhs));
    }
    add(rep, "semiconjugacy defect sup over 1e4 samples < 1e-9", sup < 1e-9, fmt(sup));
    return rep;
}

BlowupStatePtr build_reference_blowup(int N) {
    double alpha = std::sqrt(2.0) - 1.0, beta = std::sqrt(3.0) - 1.0;
    DenjoyPair dj = build_denjoy(alpha, geometric_schedule());
    TorusLift f = product_map(dj.lift, rotation_lift(beta));
    Vec2 z0{dj.cantor_point_from_base(0.20787957635076193), 0.45};
    return run_blowup(f, {z0, "criterion"}, N, {});
}

CriterionReport criterion_blowup() {
    CriterionReport rep;
    rep.criterion = 3;
    const int N = 4;
    BlowupStatePtr st = build_reference_blowup(N);
    const auto& disks = st->disks();

    add(rep, "exactly 9 disks at N=4", disks.size() == 9, std::to_string(disks.size()));
    bool disjoint = true;
    for (size_t i = 0; i < disks.size() && disjoint; ++i)
        for (size_t j = i + 1; j < disks.size() && disjoint; ++j)
            if (disks[i].bbox.overlaps_torus(disks[j].bbox) &&
                !closed_polylines_disjoint(disks[i].boundary, disks[j].boundary))
                disjoint = false;
    add(rep, "disks pairwise disjoint (polyline test)", disjoint, disjoint ? "ok" : "overlap");

    bool diam_ok = true;
    double worst_ratio = 0.0;
    for (const DiskRecord& d : disks) {
        if (d.created_stage == 0) continue;
        double bound = std::pow(0.25, double(d.created_stage + 2));
        worst_ratio = std::max(worst_ratio, d.diameter / bound);
        if (d.diameter > bound) diam_ok = false;
    }
    add(rep, "stage-n disk diameters <= (1/4)^{n+2}", diam_ok,
        "max diam/bound = " + fmt(worst_ratio));

    // (c) boundary transport: f_N of a collar just outside gamma_k lands on gamma_{k+1}
    double delta0 = st->chart().delta0;
    double worst_h = 0.0;
    const double collar = 1e-9;
    for (int k = -(N - 1); k <= N - 1; ++k) {
        double eps_src;
        if (k == 0) {
            eps_src = st->eps0();
        } else {
            const StageRecord& sr = st->stage_records()[size_t(std::abs(k) - 1)];
            eps_src = k > 0 ? sr.eps_prime_plus : sr.eps_prime_minus;
        }
        int M = 128;
        std::vector<Vec2> transported;
        for (int s = 0; s < M; ++s) {
            double theta = 2.0 * M_PI * s / M;
            Vec2 p = st->chart().to_torus(eps_src * (1.0 + collar), theta);
            Vec2 q = st->f_n_pow(std::max(0, std::abs(k) - 1), k, p);
            transported.push_back(torus_rep(st->f_N(q)));
        }
        // target disk boundary gamma_{k+1}
        const DiskRecord* target = nullptr;
        for (const DiskRecord& d : disks)
            if (d.index == k + 1) target = &d;
        double h = std::max(sampled_hausdorff(transported, target->boundary),
                            sampled_hausdorff(target->boundary, transported));
        worst_h = std::max(worst_h, h);
    }
    add(rep, "sampled Hausdorff f_N(gamma_k) vs gamma_{k+1} < 1e-6 delta0 (|k|<=3)",
        worst_h < 1e-6 * delta0, fmt(worst_h / delta0) + " delta0");

    // (d) conjugacy bookkeeping off the disks
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unif(0, 1);
    double worst_conj = 0.0;
    int tested = 0;
    while (tested < 1000) {
        Vec2 z{unif(rng), unif(rng)};
        bool near_disk = false;
        for (const DiskRecord& d : disks) {
            Box2 b = d.bbox;
            b.inflate(0.01);
            if (b.contains_torus(z)) near_disk = true;
        }
        if (near_disk) continue;
        ++tested;
        Vec2 lhs = st->phi_N(st->f_N(z));
        Vec2 rhs = st->base().evaluate(st->phi_N(z));
        worst_conj = std::max(worst_conj, torus_dist(torus_rep(lhs), torus_rep(rhs)));
    }
    add(rep, "phi_N o f_N = f o phi_N to 1e-8 on 1e3 samples", worst_conj <= 1e-8,
        fmt(worst_conj));
    return rep;
}

CriterionReport criterion_qmaps() {
    CriterionReport rep;
    rep.criterion = 4;
    double b1 = std::abs(g_radial(1.0, 0.37) - 1.0);
    add(rep, "g_eps(1) = 1", b1 <= 1e-12, fmt(b1));
    double b2 = std::abs(q_radial(0.5, 0.8, 0.5) - 0.65);
    add(rep, "q maps inner radius eps0 to eps'", b2 <= 1e-12, fmt(b2));
    double b3 = std::abs(q_radial(0.8, 0.8, 0.5) - 0.8);
    add(rep, "q fixes outer radius", b3 <= 1e-12, fmt(b3));
    Frac oracle = q_frac(Frac(7, 10), Frac(4, 5), Frac(1, 2));
    double d = std::abs(q_radial(0.7, 0.8, 0.5) - oracle.value());
    add(rep, "interior value matches exact rational oracle (" + std::to_string(oracle.n) + "/" +
                 std::to_string(oracle.d) + ") to 1e-10",
        d <= 1e-10, fmt(d));
    return rep;
}

CriterionReport criterion_da_derivative() {
    CriterionReport rep;
    rep.criterion = 5;
    DAMap g = build_da_map({1, 1, 1, 2}, BumpSpec{});
    double two_delta = 2.0 * g.spec.delta;
    double t0 = g.lam.t0();
    int n = 1024;
    double max_c = 0.0, min_N = 1e9, max_N = 0.0, max_N_outer = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            double x = -2.2 + 4.4 * (i + 0.5) / n;
            double y = -1.1 + 2.2 * (j + 0.5) / n;
            double c = std::abs(g.c_entry(x, y));
            double Nv = std::abs(g.N_entry(x, y));
            max_c = std::max(max_c, c);
            min_N = std::min(min_N, Nv);
            max_N = std::max(max_N, Nv);
            if (std::abs(y) >= t0 || std::abs(x) >= 1.0) max_N_outer = std::max(max_N_outer, Nv);
        }
    }
    add(rep, "|c| <= 2 delta", max_c <= two_delta, fmt(max_c) + " vs " + fmt(two_delta));
    add(rep, "lambda_s <= |N| (known-infeasible lower bound, see notes)",
        min_N >= g.lambda_s, fmt(min_N) + " vs lambda_s = " + fmt(g.lambda_s));
    add(rep, "|N| <= v", max_N <= g.spec.v, fmt(max_N) + " vs " + fmt(g.spec.v));
    add(rep, "|N| < 1 when |y| >= t0 or |x| >= 1", max_N_outer < 1.0, fmt(max_N_outer));
    // the bound the paper's own estimates actually provide
    bool soft = min_N >= g.lambda_s - g.spec.delta;
    add(rep, "lambda_s - delta <= |N| (bound provided by the proof)", soft, fmt(min_N));
    return rep;
}

CriterionReport criterion_graph_transform() {
    CriterionReport rep;
    rep.criterion = 6;
    DAMap g = build_da_map({1, 1, 1, 2}, BumpSpec{});
    SectionGrid S = invariant_section(g, 512);
    double allowed = g.spec.v / g.lambda_u + 0.05;
    double worst_ratio = 0.0;
    for (size_t i = 1; i < S.sup_diff_history.size(); ++i) {
        if (S.sup_diff_history[i - 1] <= 0) continue;
        worst_ratio = std::max(worst_ratio, S.sup_diff_history[i] / S.sup_diff_history[i - 1]);
    }
    add(rep, "contraction ratio <= nu/lambda_u + 0.05 for all sweeps", worst_ratio <= allowed,
        fmt(worst_ratio) + " vs " + fmt(allowed));
    add(rep, "sup |S| <= 2 delta (lambda_u - nu)^{-1}", S.sup_abs <= S.cone_radius,
        fmt(S.sup_abs) + " vs " + fmt(S.cone_radius));
    DAMap lin = linear_variant(g);
    SectionGrid S0 = invariant_section(lin, 128);
    add(rep, "unperturbed map: S = 0 after one sweep",
        S0.sup_abs == 0.0 && S0.sup_diff_history.size() <= 2, fmt(S0.sup_abs));
    return rep;
}

CriterionReport criterion_da_pipeline() {
    CriterionReport rep;
    rep.criterion = 7;
    Vec2 target{frac(M_E), frac(M_E * 0.5 * (1.0 + std::sqrt(5.0)))};
    for (int R : {256, 512}) {
        PipelineSpec spec;
        spec.id = ExampleId::Type1DA;
        spec.resolution = R;
        spec.rho_horizon = 10000;
        PipelineBundle bundle = run_pipeline(spec);
        if (R == 256) {
            double err = norm(bundle.rho.vector - target);
            add(rep, "rotation estimate within 1e-2 of (e, e phi) mod 1 at n=1e4", err < 1e-2,
                fmt(err));
        }
        auto marked = marked_components(bundle.grid);
        add(rep, "marked set single 8-connected component at R=" + std::to_string(R),
            marked.size() == 1, std::to_string(marked.size()) + " components");
        bool all_trivial = true;
        for (const auto& c : bundle.report.components)
            if (c.type != DomainType::Trivial) all_trivial = false;
        add(rep, "complement classifies Trivial at R=" + std::to_string(R), all_trivial,
            std::to_string(bundle.report.components.size()) + " components");
    }
    return rep;
}

CriterionReport criterion_classifier() {
    CriterionReport rep;
    rep.criterion = 8;
    struct Case {
        std::string name;
        OccupancyGrid grid;
        DeckSubgroup expect;
        long p, q;
    };
    std::vector<Case> cases;
    cases.push_back({"disk", disk_bitmap(64, 0.5, 0.5, 0.15, false), DeckSubgroup::Zero, 0, 0});
    cases.push_back({"strip(0,1)", strip_bitmap(64, 0, 1, 0.25), DeckSubgroup::Cyclic, 0, 1});
    cases.push_back({"strip(1,0)", strip_bitmap(64, 1, 0, 0.25), DeckSubgroup::Cyclic, 1, 0});
    cases.push_back({"strip(1,1)", strip_bitmap(64, 1, 1, 0.25), DeckSubgroup::Cyclic, 1, 1});
    cases.push_back({"strip(2,1)", strip_bitmap(64, 2, 1, 0.25), DeckSubgroup::Cyclic, 2, 1});
    cases.push_back(
        {"complement_of_disk", disk_bitmap(64, 0.5, 0.5, 0.15, true), DeckSubgroup::Full, 0, 0});
    for (auto& c : cases) {
        auto comps = complement_components(c.grid);
        GridComponent comp = largest_component(comps);
        DeckResult got = deck_subgroup(c.grid, comp, 8);
        bool ok = got.subgroup == c.expect && (c.expect != DeckSubgroup::Cyclic ||
                                               (got.p == c.p && got.q == c.q));
        // independent oracle on the 8x8 downsampled cover
        OccupancyGrid small = downsample_center(c.grid, 8);
        auto small_comps = complement_components(small);
        DeckResult oracle = brute_force_deck(small, largest_component(small_comps));
        bool agree = oracle.subgroup == got.subgroup &&
                     (got.subgroup != DeckSubgroup::Cyclic ||
                      (oracle.p == got.p && oracle.q == got.q));
        add(rep, c.name + " classified " + to_string(got.subgroup), ok,
            "(" + std::to_string(got.p) + "," + std::to_string(got.q) + ")");
        add(rep, c.name + " agrees with 8x8 brute-force oracle", agree,
            to_string(oracle.subgroup));
    }
    return rep;
}

CriterionReport criterion_example3() {
    CriterionReport rep;
    rep.criterion = 9;
    auto essential_chars = [](const DomainReport& report) {
        std::vector<std::pair<long, long>> chars;
        for (const auto& c : report.components)
            if (c.type == DomainType::Essential) chars.emplace_back(c.p, c.q);
        return chars;
    };

    std::vector<std::pair<long, long>> types_r256, types_r512;
    for (int R : {256, 512}) {
        PipelineSpec spec;
        spec.id = ExampleId::Type2Annuli;
        spec.resolution = R;
        PipelineBundle bundle = run_pipeline(spec);
        bool ok = !bundle.report.components.empty();
        for (const auto& c : bundle.report.components)
            if (c.type != DomainType::Essential || c.p != 0 || c.q != 1) ok = false;
        add(rep, "type2_annuli all components Essential(0,1) at R=" + std::to_string(R), ok,
            std::to_string(bundle.report.components.size()) + " components");
        auto& dst = R == 256 ? types_r256 : types_r512;
        dst = essential_chars(bundle.report);
    }
    bool same = !types_r256.empty() && !types_r512.empty() &&
                types_r256.front() == types_r512.front();
    add(rep, "type assignments identical at R=256 vs 512", same, "char (0,1)");

    {
        PipelineSpec spec;
        spec.id = ExampleId::Type2AnnuliConjugated;
        spec.p = 1;
        spec.q = 1;
        spec.resolution = 256;
        PipelineBundle bundle = run_pipeline(spec);
        bool ok = !bundle.report.components.empty();
        for (const auto& c : bundle.report.components)
            if (c.type != DomainType::Essential || c.p != 1 || c.q != 1) ok = false;
        add(rep, "conjugated pipeline all Essential(1,1)", ok,
            std::to_string(bundle.report.components.size()) + " components");
    }

    {
        PipelineSpec spec;
        spec.id = ExampleId::Type2WithDisks;
        spec.stages = 3;
        spec.resolution = 256;
        PipelineBundle bundle = run_pipeline(spec);
        int trivial = 0, essential = 0;
        bool essential_ok = true;
        for (const auto& c : bundle.report.components) {
            if (c.type == DomainType::Trivial) ++trivial;
            if (c.type == DomainType::Essential) {
                ++essential;
                if (c.p != 0 || c.q != 1) essential_ok = false;
            }
        }
        add(rep, "with-disks: >= 7 Trivial components after N=3 blow-up", trivial >= 7,
            std::to_string(trivial) + " trivial");
        add(rep, "with-disks: essential annuli keep characteristic (0,1)",
            essential > 0 && essential_ok, std::to_string(essential) + " essential");
    }
    return rep;
}

CriterionReport criterion_example4() {
    CriterionReport rep;
    rep.criterion = 10;

    {
        PipelineSpec spec;
        spec.id = ExampleId::Type3Extension;
        spec.stages = 3;
        spec.resolution = 512;
        PipelineBundle bundle = run_pipeline(spec);
        add(rep, "quadratic-gap wedge grid 10x10x5 all hits",
            bundle.wedges && bundle.wedges->misses == 0,
            std::to_string(bundle.wedges ? bundle.wedges->hits : 0) + " hits, " +
                std::to_string(bundle.wedges ? bundle.wedges->misses : 0) + " misses");
        // gamma_0 approach distance, stored in the manifest
        double gamma_dist = -1;
        std::istringstream in(bundle.manifest);
        std::string line;
        while (std::getline(in, line))
            if (line.rfind("gamma0_min_dist_to_marked_cells=", 0) == 0)
                gamma_dist = std::stod(line.substr(line.find('=') + 1));
        add(rep, "marked cells approach gamma_0 within 2 grid cells at R=512",
            gamma_dist >= 0 && gamma_dist <= 2.0, fmt(gamma_dist) + " cells");
        bool has_full = false;
        for (const auto& c : bundle.report.components)
            if (c.type == DomainType::DoublyEssential) has_full = true;
        add(rep, "extension pipeline has a DoublyEssential component", has_full, "");
    }

    {
        // linear-gap control: at least one miss at small r
        double x0 = 0.3, y0 = 0.62;
        CantorSetSpec lin = build_linear_gap_cantor(x0, {x0 - 0.05, x0 + 0.05}, 200);
        CantorSetSpec quad = build_quadratic_gap_cantor(y0, 1.0, {y0 - 0.05, y0 + 0.05}, 200);
        WedgeCheckConfig cfg;
        cfg.delta0 = 0.025;
        WedgeReport report = wedge_sample_check(
            lin, quad, {x0, y0},
            wedge_grid(10, 10, {M_PI / 24, M_PI / 12, M_PI / 6, M_PI / 3, 1.4}), cfg);
        add(rep, "linear-gap control exhibits at least one miss", report.misses >= 1,
            std::to_string(report.misses) + " misses of " +
                std::to_string(report.results.size()));
    }

    {
        PipelineSpec spec;
        spec.id = ExampleId::Type3Cantor;
        spec.resolution = 256;
        PipelineBundle bundle = run_pipeline(spec);
        double oracle = -1, measured = -1;
        std::istringstream in(bundle.manifest);
        std::string line;
        while (std::getline(in, line)) {
            if (line.rfind("oracle_cell_cover_product=", 0) == 0)
                oracle = std::stod(line.substr(line.find('=') + 1));
            if (line.rfind("measured_marked_fraction=", 0) == 0)
                measured = std::stod(line.substr(line.find('=') + 1));
        }
        bool ok = oracle > 0 && std::abs(measured - oracle) / oracle <= 0.05;
        add(rep, "type3_cantor marked fraction matches 1-D product oracle within 5%", ok,
            fmt(measured) + " vs oracle " + fmt(oracle));
    }
    return rep;
}

CriterionReport criterion_determinism() {
    CriterionReport rep;
    rep.criterion = 11;
    namespace fs = std::filesystem;
    PipelineSpec spec;
    spec.id = ExampleId::Type2Annuli;
    spec.resolution = 64;
    spec.orbit_steps = 20000;
    spec.rho_horizon = 2000;
    spec.rho_seeds = 5;
    fs::path base = fs::temp_directory_path() / "torusdyn_determinism";
    fs::remove_all(base);
    std::string d1 = (base / "run1").string(), d2 = (base / "run2").string();
    write_bundle(run_pipeline(spec), d1);
    write_bundle(run_pipeline(spec), d2);
    bool identical = true;
    std::string differing;
    for (const auto& entry : fs::recursive_directory_iterator(d1)) {
        if (!entry.is_regular_file()) continue;
        fs::path rel = fs::relative(entry.path(), d1);
        fs::path other = fs::path(d2) / rel;
        if (!fs::exists(other) || read_file(entry.path().string()) != read_file(other.string())) {
            identical = false;
            differing = rel.string();
        }
    }
    add(rep, "pipeline artifacts byte-identical across reruns", identical,
        identical ? "all files match" : "differs: " + differing);
    fs::remove_all(base);
    return rep;
}

}  // namespace

std::vector<int> all_criteria() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}; }

std::vector<int> criteria_for_suite(const std::string& suite) {
    if (suite == "all") return all_criteria();
    if (suite == "rotation") return {1};
    if (suite == "denjoy") return {2};
    if (suite == "blowup") return {3};
    if (suite == "qmaps") return {4};
    if (suite == "da-derivative") return {5};
    if (suite == "graph-transform") return {6};
    if (suite == "da-pipeline") return {7};
    if (suite == "classifier") return {8};
    if (suite == "example3") return {9};
    if (suite == "example4") return {10};
    if (suite == "determinism") return {11};
    throw std::invalid_argument("unknown verify suite: " + suite);
}

CriterionReport run_criterion(int criterion) {
    auto start = std::chrono::steady_clock::now();
    CriterionReport rep;
    switch (criterion) {
        case 1: rep = criterion_rotation(); break;
        case 2: rep = criterion_denjoy(); break;
        case 3: rep = criterion_blowup(); break;
        case 4: rep = criterion_qmaps(); break;
        case 5: rep = criterion_da_derivative(); break;
        case 6: rep = criterion_graph_transform(); break;
        case 7: rep = criterion_da_pipeline(); break;
        case 8: rep = criterion_classifier(); break;
        case 9: rep = criterion_example3(); break;
        case 10: rep = criterion_example4(); break;
        case 11: rep = criterion_determinism(); break;
        default: throw std::invalid_argument("unknown criterion " + std::to_string(criterion));
    }
    rep.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

std::string format_report(const CriterionReport& report) {
    std::string out;
    for (const auto& c : report.checks) {
        out += std::string(c.passed ? "[PASS] " : "[FAIL] ") + "criterion " +
               std::to_string(c.criterion) + ": " + c.name;
        if (!c.measured.empty()) out += " (measured " + c.measured + ")";
        out += "\n";
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "criterion %d %s in %.1f s\n", report.criterion,
                  report.passed() ? "PASSED" : "FAILED", report.seconds);
    out += buf;
    return out;
}

}  // namespace torusdyn
