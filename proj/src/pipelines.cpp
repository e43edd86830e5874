#include "torusdyn/pipelines.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

namespace torusdyn {

std::optional<ExampleId> example_id_from_string(const std::string& s) {
    if (s == "type1_da") return ExampleId::Type1DA;
    if (s == "type2_annuli") return ExampleId::Type2Annuli;
    if (s == "type2_annuli_conjugated") return ExampleId::Type2AnnuliConjugated;
    if (s == "type2_with_disks") return ExampleId::Type2WithDisks;
    if (s == "type3_cantor") return ExampleId::Type3Cantor;
    if (s == "type3_extension") return ExampleId::Type3Extension;
    return std::nullopt;
}

std::string to_string(ExampleId id) {
    switch (id) {
        case ExampleId::Type1DA: return "type1_da";
        case ExampleId::Type2Annuli: return "type2_annuli";
        case ExampleId::Type2AnnuliConjugated: return "type2_annuli_conjugated";
        case ExampleId::Type2WithDisks: return "type2_with_disks";
        case ExampleId::Type3Cantor: return "type3_cantor";
        default: return "type3_extension";
    }
}

PipelineSpec pipeline_spec_from_config(ExampleId id, const Config& cfg) {
    PipelineSpec spec;
    spec.id = id;
    spec.alpha = cfg.alpha;
    spec.beta = cfg.beta;
    spec.stages = cfg.stages;
    spec.resolution = cfg.resolution;
    spec.orbit_steps = cfg.orbit_steps;
    spec.seed = cfg.seed;
    if (id == ExampleId::Type1DA) spec.rho_horizon = 10000;
    if (id == ExampleId::Type2AnnuliConjugated) {
        // target characteristic carried in the matrix column (b, d) = A(0,1)
        spec.p = cfg.matrix.b;
        spec.q = cfg.matrix.d;
    }
    return spec;
}

namespace {

constexpr double kSeedBaseU1 = 0.31830988618379069;  // 1/pi
constexpr double kSeedBaseU2 = 0.36787944117144233;  // 1/e
constexpr double kAnchorBaseU1 = 0.20787957635076193;  // e^{-pi/2}
constexpr double kAnchorBaseU2 = 0.56714329040978384;  // Lambert W(1)

std::vector<Vec2> make_seeds(uint64_t seed, int count) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Vec2> out;
    out.reserve(size_t(count));
    for (int i = 0; i < count; ++i) out.push_back({unif(rng), unif(rng)});
    return out;
}

void require_independence(double a, double b, int H) {
    IndependenceResult ind = rational_independence(a, b, H, 1e-9);
    if (ind.relation_found)
        throw std::invalid_argument(
            "pipeline: (alpha, beta) fail the rational independence check: " +
            std::to_string(ind.N1) + " + " + std::to_string(ind.N2) + " a + " +
            std::to_string(ind.N3) + " b ~ 0");
}

struct ManifestWriter {
    std::string text;
    void put(const std::string& key, const std::string& value) {
        text += key + "=" + value + "\n";
    }
    void putf(const std::string& key, double v) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        put(key, buf);
    }
    void puti(const std::string& key, long v) { put(key, std::to_string(v)); }
};

/// Count of components per type plus matching of analytic disk records; disks
/// below grid resolution are appended as sub-resolution Trivial components.
void merge_disk_records(DomainReport& report, const OccupancyGrid& grid,
                        const std::vector<DiskRecord>& disks) {
    auto comps = complement_components(grid);
    std::vector<int> cell_label(grid.marked.size(), -1);
    for (const auto& comp : comps)
        for (int c : comp.cells) cell_label[size_t(c)] = comp.label;
    int synth = -1;
    for (const DiskRecord& disk : disks) {
        int cx = grid.cell_of(disk.marker.x), cy = grid.cell_of(disk.marker.y);
        int lbl = grid.at(cx, cy) ? -1 : cell_label[grid.idx(cx, cy)];
        bool matched = false;
        if (lbl >= 0) {
            for (auto& cr : report.components) {
                if (cr.label == lbl && cr.type == DomainType::Trivial) {
                    matched = true;  // disk visible as a grid hole
                    break;
                }
            }
        }
        if (!matched) {
            ComponentReport cr;
            cr.label = synth--;
            cr.cells = 0;
            cr.subgroup = DeckSubgroup::Zero;
            cr.type = DomainType::Trivial;
            cr.diameter = disk.diameter;
            cr.sub_resolution = true;
            report.components.push_back(cr);
        }
    }
}

int count_type(const DomainReport& report, DomainType t) {
    int n = 0;
    for (const auto& c : report.components)
        if (c.type == t) ++n;
    return n;
}

}  // namespace

double cantor_cell_cover(const CantorSetSpec& spec, int R, int dilate) {
    std::vector<uint8_t> meets(size_t(R), 1);
    for (const Gap& g : spec.realized_sorted()) {
        for (double shift : {-1.0, 0.0, 1.0}) {
            double l = g.left() + shift, r = g.right() + shift;
            int c0 = int(std::ceil(l * R - 1e-12));
            int c1 = int(std::floor(r * R + 1e-12)) - 1;
            for (int c = c0; c <= c1; ++c) {
                // cell [c/R, (c+1)/R] fully inside the gap
                if (double(c) / R >= l - 1e-15 && double(c + 1) / R <= r + 1e-15) {
                    int cc = ((c % R) + R) % R;
                    meets[size_t(cc)] = 0;
                }
            }
        }
    }
    if (dilate > 0) {
        std::vector<uint8_t> out(meets);
        for (int c = 0; c < R; ++c) {
            if (!meets[size_t(c)]) continue;
            for (int d = -dilate; d <= dilate; ++d) out[size_t(((c + d) % R + R) % R)] = 1;
        }
        meets.swap(out);
    }
    size_t n = 0;
    for (uint8_t v : meets) n += v;
    return double(n) / double(R);
}

OccupancyGrid leaf_trace_occupancy(const DAMap& g, const SectionGrid& S, Vec2 seed,
                                   double total_rise, int R, int dilate) {
    LeafField field = leaf_field(g, S);
    OccupancyGrid grid(R);
    grid.seed = seed;
    grid.dilate_radius = dilate;
    grid.provenance = "leaf_trace";
    double h = 1.0 / (4.0 * S.mesh);
    for (int dir = 0; dir < 2; ++dir) {
        double sgn = dir == 0 ? 1.0 : -1.0;
        Vec2 z = seed;
        double risen = 0.0;
        grid.mark_point(z);
        while (risen < 0.5 * total_rise) {
            Vec2 k1 = field.dir(z) * sgn;
            Vec2 k2 = field.dir(z + k1 * (0.5 * h)) * sgn;
            Vec2 k3 = field.dir(z + k2 * (0.5 * h)) * sgn;
            Vec2 k4 = field.dir(z + k3 * h) * sgn;
            Vec2 zn = z + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            risen += std::abs(zn.y - z.y);
            z = torus_rep(zn);
            grid.mark_point(z);
        }
    }
    grid.orbit_steps = long(total_rise);
    grid.dilate(dilate);
    return grid;
}

PipelineBundle run_pipeline(const PipelineSpec& spec) {
    PipelineBundle bundle;
    bundle.spec = spec;
    ManifestWriter man;
    man.put("example", to_string(spec.id));
    man.puti("seed", long(spec.seed));
    man.puti("resolution", spec.resolution);
    man.puti("orbit_steps", spec.orbit_steps);
    man.put("conjugation_action", conjugation_action_direction());

    const int R = spec.resolution;
    std::vector<Vec2> rho_seeds = make_seeds(spec.seed, spec.rho_seeds);

    switch (spec.id) {
        case ExampleId::Type2Annuli:
        case ExampleId::Type2AnnuliConjugated: {
            require_independence(spec.alpha, spec.beta, spec.independence_height);
            man.putf("alpha", spec.alpha);
            man.putf("beta", spec.beta);
            DenjoyPair denjoy = build_denjoy(spec.alpha, geometric_schedule());
            TorusLift f = product_map(denjoy.lift, rotation_lift(spec.beta));
            Vec2 seed{denjoy.cantor_point_from_base(kSeedBaseU1), kSeedBaseU2};
            TorusLift use = f;
            if (spec.id == ExampleId::Type2AnnuliConjugated) {
                IntegerMatrix A = matrix_sending_01_to(spec.p, spec.q).inverse();
                use = linear_conjugate(f, A);
                seed = torus_rep(A.inverse().apply(seed));
                man.put("matrix", std::to_string(A.a) + "," + std::to_string(A.b) + "," +
                                      std::to_string(A.c) + "," + std::to_string(A.d));
                man.puti("target_p", spec.p);
                man.puti("target_q", spec.q);
            }
            bundle.rho = rotation_vector_estimate(use, rho_seeds, spec.rho_horizon);
            bundle.grid = orbit_occupancy(use, seed, spec.orbit_steps, R, 1);
            bundle.report = classify_domains(bundle.grid);
            bundle.extra["cantor_q1"] = denjoy.cantor.serialize();
            break;
        }
        case ExampleId::Type2WithDisks: {
            require_independence(spec.alpha, spec.beta, spec.independence_height);
            man.putf("alpha", spec.alpha);
            man.putf("beta", spec.beta);
            man.puti("stages", spec.stages);
            DenjoyPair denjoy = build_denjoy(spec.alpha, geometric_schedule());
            TorusLift f = product_map(denjoy.lift, rotation_lift(spec.beta));
            Vec2 z0{denjoy.cantor_point_from_base(kAnchorBaseU1), 0.45};
            RegularPointCert cert{z0, "denjoy-irr x full-circle"};
            BlowupStatePtr blowup = run_blowup(f, cert, spec.stages, {});
            TorusLift fN = blowup->lift(blowup);
            bundle.rho = rotation_vector_estimate(fN, rho_seeds, spec.rho_horizon);
            Vec2 seed{denjoy.cantor_point_from_base(kSeedBaseU1), kSeedBaseU2};
            bundle.grid = orbit_occupancy(fN, seed, spec.orbit_steps, R, 1);
            bundle.report = classify_domains(bundle.grid);
            merge_disk_records(bundle.report, bundle.grid, blowup->disks());
            bundle.extra["blowup_manifest"] = blowup->manifest_json();
            // Lemma 15(2) wedge precondition via the vertical-line argument
            WedgeCheckConfig wcfg;
            wcfg.delta0 = blowup->chart().delta0;
            CantorSetSpec q2 = full_circle_spec();
            bundle.wedges = wedge_sample_check(denjoy.cantor, q2, z0,
                                               wedge_grid(4, 8, {0.3, 0.9, 1.8}), wcfg);
            break;
        }
        case ExampleId::Type3Cantor:
        case ExampleId::Type3Extension: {
            require_independence(spec.alpha, spec.beta, spec.independence_height);
            man.putf("alpha", spec.alpha);
            man.putf("beta", spec.beta);
            DenjoyPair d1, d2;
            double window_halfwidth = 0.25;
            if (spec.id == ExampleId::Type3Cantor) {
                d1 = build_denjoy(spec.alpha, geometric_schedule());
                d2 = build_denjoy(spec.beta, geometric_schedule());
            } else {
                const double Cq = 1.0, base_w = 0.05;
                d1 = build_denjoy(spec.alpha,
                                  quadratic_capped_schedule(spec.alpha, kAnchorBaseU1, Cq));
                d2 = build_denjoy(spec.beta,
                                  quadratic_capped_schedule(spec.beta, kAnchorBaseU2, Cq));
                double x0 = d1.cantor_point_from_base(kAnchorBaseU1);
                double y0 = d2.cantor_point_from_base(kAnchorBaseU2);
                d1.cantor.anchor = x0;
                d2.cantor.anchor = y0;
                double w1 = 0.5 * (d1.cantor_point_from_base(frac(kAnchorBaseU1 + base_w)) -
                                   d1.cantor_point_from_base(frac(kAnchorBaseU1 - base_w)));
                double w2 = 0.5 * (d2.cantor_point_from_base(frac(kAnchorBaseU2 + base_w)) -
                                   d2.cantor_point_from_base(frac(kAnchorBaseU2 - base_w)));
                if (w1 < 0) w1 += 0.5;  // wrap guard; windows are small arcs
                if (w2 < 0) w2 += 0.5;
                d1.cantor.window = {x0 - w1, x0 + w1};
                d2.cantor.window = {y0 - w2, y0 + w2};
                window_halfwidth = std::min(w1, w2);
            }
            TorusLift f = product_map(d1.lift, d2.lift);
            bundle.rho = rotation_vector_estimate(f, rho_seeds, spec.rho_horizon);
            Vec2 seed{d1.cantor_point_from_base(kSeedBaseU1),
                      d2.cantor_point_from_base(kSeedBaseU2)};
            if (spec.id == ExampleId::Type3Cantor) {
                bundle.grid = orbit_occupancy(f, seed, spec.orbit_steps, R, 1);
                bundle.report = classify_domains(bundle.grid);
                double cover1 = cantor_cell_cover(d1.cantor, R, 1);
                double cover2 = cantor_cell_cover(d2.cantor, R, 1);
                man.putf("oracle_cell_cover_product", cover1 * cover2);
                man.putf("measured_marked_fraction", bundle.grid.marked_fraction());
                auto marked = marked_components(bundle.grid);
                size_t max_sz = 0;
                for (const auto& mcomp : marked) max_sz = std::max(max_sz, mcomp.size());
                man.puti("marked_component_count", long(marked.size()));
                man.puti("marked_component_max_cells", long(max_sz));
            } else {
                Vec2 z0{*d1.cantor.anchor, *d2.cantor.anchor};
                RegularPointCert cert{z0, "quadratic-gap anchors"};
                BlowupConfig bcfg;
                bcfg.window_halfwidth = window_halfwidth;
                BlowupStatePtr blowup = run_blowup(f, cert, spec.stages, bcfg);
                TorusLift fN = blowup->lift(blowup);
                bundle.grid = orbit_occupancy(fN, seed, spec.orbit_steps, R, 1);
                bundle.report = classify_domains(bundle.grid);
                merge_disk_records(bundle.report, bundle.grid, blowup->disks());
                bundle.extra["blowup_manifest"] = blowup->manifest_json();
                // distance from gamma_0 samples to the nearest marked cell
                const DiskRecord& disk0 = blowup->disks().front();
                double min_d = 1e9;
                for (const Vec2& p : disk0.boundary) {
                    int px = bundle.grid.cell_of(p.x), py = bundle.grid.cell_of(p.y);
                    for (int dy = -4; dy <= 4; ++dy) {
                        for (int dx = -4; dx <= 4; ++dx) {
                            int cx = (px + dx + R) % R, cy = (py + dy + R) % R;
                            if (!bundle.grid.at(cx, cy)) continue;
                            Vec2 cc{(cx + 0.5) / R, (cy + 0.5) / R};
                            min_d = std::min(min_d, torus_dist(p, cc));
                        }
                    }
                }
                man.putf("gamma0_min_dist_to_marked_cells", min_d * R);
                WedgeCheckConfig wcfg;
                wcfg.delta0 = blowup->chart().delta0;
                bundle.wedges = wedge_sample_check(
                    d1.cantor, d2.cantor, z0,
                    wedge_grid(10, 10, {M_PI / 24, M_PI / 12, M_PI / 6, M_PI / 3, 1.4}), wcfg);
            }
            bundle.extra["cantor_q1"] = d1.cantor.serialize();
            bundle.extra["cantor_q2"] = d2.cantor.serialize();
            break;
        }
        case ExampleId::Type1DA: {
            IntegerMatrix A{1, 1, 1, 2};
            DAMap g = build_da_map(A, BumpSpec{});
            Vec2 rho_expect = fibered_rotation_vector(g, spec.nu_scale);
            require_independence(rho_expect.x, rho_expect.y, 50);
            man.putf("nu", spec.nu_scale);
            man.putf("rho_expect_x", rho_expect.x);
            man.putf("rho_expect_y", rho_expect.y);
            auto gp = std::make_shared<DAMap>(g);
            auto Sp = std::make_shared<SectionGrid>(invariant_section(g, spec.da_mesh));
            TorusLift f = build_fibered_f(gp, Sp, spec.nu_scale);
            bundle.rho = rotation_vector_estimate(f, rho_seeds, spec.rho_horizon);
            // a seed certified off the basin of repulsion
            double ball = 0.5 * g.r0_local() * g.scale;
            Vec2 seed{0.5, 0.25};
            for (int i = 0; i < 64; ++i) {
                if (basin_membership(g, seed, 400, ball).verdict ==
                    BasinVerdict::NotWithinBudget)
                    break;
                seed = torus_rep(seed + Vec2{0.013771, 0.029533});
            }
            bundle.grid = leaf_trace_occupancy(g, *Sp, seed, 4.0 * R, R, 1);
            bundle.report = classify_domains(bundle.grid);
            auto marked = marked_components(bundle.grid);
            man.puti("marked_component_count", long(marked.size()));
            man.putf("section_sup", Sp->sup_abs);
            man.putf("section_cone_radius", Sp->cone_radius);
            break;
        }
    }

    man.putf("rho_est_x", bundle.rho.vector.x);
    man.putf("rho_est_y", bundle.rho.vector.y);
    man.putf("rho_seed_spread", bundle.rho.seed_spread);
    man.putf("rho_cauchy_gap", bundle.rho.cauchy_gap);
    man.puti("components_trivial", count_type(bundle.report, DomainType::Trivial));
    man.puti("components_essential", count_type(bundle.report, DomainType::Essential));
    man.puti("components_doubly_essential",
             count_type(bundle.report, DomainType::DoublyEssential));
    if (bundle.wedges) {
        man.puti("wedge_hits", bundle.wedges->hits);
        man.puti("wedge_misses", bundle.wedges->misses);
    }
    bundle.manifest = man.text;
    return bundle;
}

void write_bundle(const PipelineBundle& bundle, const std::string& out_dir) {
    ensure_directory(out_dir);
    write_file_atomic(out_dir + "/manifest.txt", bundle.manifest);
    write_file_atomic(out_dir + "/grids/occupancy.pgm", pgm_encode(bundle.grid));
    write_file_atomic(out_dir + "/reports/domains.csv", bundle.report.csv());
    write_file_atomic(out_dir + "/reports/rho.csv", rotation_estimate_csv(bundle.rho));
    if (bundle.wedges) {
        std::string csv = "r,theta1,theta2,hit,witness_x,witness_y\n";
        char buf[160];
        for (const auto& wr : bundle.wedges->results) {
            std::snprintf(buf, sizeof buf, "%.8g,%.8g,%.8g,%d,%.12g,%.12g\n", wr.wedge.r,
                          wr.wedge.theta1, wr.wedge.theta2, wr.hit ? 1 : 0, wr.witness.x,
                          wr.witness.y);
            csv += buf;
        }
        write_file_atomic(out_dir + "/reports/wedges.csv", csv);
    }
    for (const auto& [name, payload] : bundle.extra)
        write_file_atomic(out_dir + "/reports/" + name + (payload[0] == '{' ? ".json" : ".txt"),
                          payload);
    write_file_atomic(out_dir + "/renders/domains.ppm",
                      render_domains(bundle.grid, bundle.report));
}

}  // namespace torusdyn
