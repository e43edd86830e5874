// Command-line surface: build examples, estimate rotation vectors, classify
// grids, run wedge checks, render, and run the verification suites.

#include <cstdio>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "torusdyn/blowup.hpp"
#include "torusdyn/circle.hpp"
#include "torusdyn/classify.hpp"
#include "torusdyn/da.hpp"
#include "torusdyn/io.hpp"
#include "torusdyn/pipelines.hpp"
#include "torusdyn/verify.hpp"

using namespace torusdyn;

namespace {

int cmd_example(const std::string& id_str, Config cfg, long p, long q) {
    auto id = example_id_from_string(id_str);
    if (!id) {
        std::cerr << "unknown example id: " << id_str << "\n";
        return 2;
    }
    PipelineSpec spec = pipeline_spec_from_config(*id, cfg);
    if (*id == ExampleId::Type2AnnuliConjugated) {
        spec.p = p;
        spec.q = q;
    }
    PipelineBundle bundle = run_pipeline(spec);
    write_bundle(bundle, cfg.out_dir);
    std::cout << bundle.manifest;
    std::cout << "bundle written to " << cfg.out_dir << "\n";
    return 0;
}

int cmd_estimate_rho(const std::string& map_name, const Config& cfg, long n, int nseeds) {
    TorusLift lift = identity_torus();
    if (map_name == "translation") {
        lift = translation_map(cfg.alpha, cfg.beta);
    } else if (map_name == "denjoy-rotation") {
        DenjoyPair dj = build_denjoy(cfg.alpha, geometric_schedule());
        lift = product_map(dj.lift, rotation_lift(cfg.beta));
    } else if (map_name == "denjoy-denjoy") {
        DenjoyPair d1 = build_denjoy(cfg.alpha, geometric_schedule());
        DenjoyPair d2 = build_denjoy(cfg.beta, geometric_schedule());
        lift = product_map(d1.lift, d2.lift);
    } else if (map_name == "conjugated") {
        DenjoyPair dj = build_denjoy(cfg.alpha, geometric_schedule());
        lift = linear_conjugate(product_map(dj.lift, rotation_lift(cfg.beta)), cfg.matrix);
    } else if (map_name == "da") {
        DAMap g = build_da_map({1, 1, 1, 2}, BumpSpec{});
        auto gp = std::make_shared<DAMap>(g);
        auto Sp = std::make_shared<SectionGrid>(invariant_section(g, 512));
        lift = build_fibered_f(gp, Sp, M_E);
    } else {
        std::cerr << "unknown map: " << map_name << "\n";
        return 2;
    }
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Vec2> seeds;
    for (int i = 0; i < nseeds; ++i) seeds.push_back({unif(rng), unif(rng)});
    RotationEstimate est = rotation_vector_estimate(lift, seeds, n);
    std::printf("%.12g %.12g spread %.3g cauchy_gap %.3g\n", est.vector.x, est.vector.y,
                est.seed_spread, est.cauchy_gap);
    if (!cfg.out_dir.empty() && cfg.out_dir != "out")
        write_file_atomic(cfg.out_dir + "/rho.csv", rotation_estimate_csv(est));
    return 0;
}

int cmd_classify(const std::string& grid_path, const std::string& out_path, int pmax) {
    OccupancyGrid grid = pgm_decode(read_file(grid_path));
    DomainReport report = classify_domains(grid, pmax);
    if (out_path.empty()) {
        std::cout << report.csv();
    } else {
        write_file_atomic(out_path, report.csv());
    }
    return 0;
}

int cmd_render(const std::string& grid_path, const std::string& out_path, int pmax) {
    OccupancyGrid grid = pgm_decode(read_file(grid_path));
    DomainReport report = classify_domains(grid, pmax);
    write_file_atomic(out_path, render_domains(grid, report));
    return 0;
}

int cmd_wedge_check(const std::string& kind, const std::string& out_path) {
    double x0 = 0.3, y0 = 0.62;
    CantorSetSpec q1 = kind == "linear"
                           ? build_linear_gap_cantor(x0, {x0 - 0.05, x0 + 0.05}, 200)
                           : build_quadratic_gap_cantor(x0, 1.0, {x0 - 0.05, x0 + 0.05}, 200);
    CantorSetSpec q2 = build_quadratic_gap_cantor(y0, 1.0, {y0 - 0.05, y0 + 0.05}, 200);
    WedgeCheckConfig cfg;
    cfg.delta0 = 0.025;
    WedgeReport report = wedge_sample_check(
        q1, q2, {x0, y0}, wedge_grid(10, 10, {M_PI / 24, M_PI / 12, M_PI / 6, M_PI / 3, 1.4}),
        cfg);
    std::printf("wedges: %d hits, %d misses\n", report.hits, report.misses);
    if (!out_path.empty()) {
        std::string csv = "r,theta1,theta2,hit,witness_x,witness_y\n";
        char buf[160];
        for (const auto& wr : report.results) {
            std::snprintf(buf, sizeof buf, "%.8g,%.8g,%.8g,%d,%.12g,%.12g\n", wr.wedge.r,
                          wr.wedge.theta1, wr.wedge.theta2, wr.hit ? 1 : 0, wr.witness.x,
                          wr.witness.y);
            csv += buf;
        }
        write_file_atomic(out_path, csv);
    }
    return 0;
}

int cmd_verify(const std::string& suite) {
    bool all_pass = true;
    for (int criterion : criteria_for_suite(suite)) {
        CriterionReport report = run_criterion(criterion);
        std::cout << format_report(report);
        if (!report.passed()) all_pass = false;
    }
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"torusdyn: minimal sets of non-resonant torus homeomorphisms"};
    app.require_subcommand(1);

    Config cfg;
    std::string config_file;
    // load the config file first so explicit flags override its values
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                cfg = Config::parse_file(argv[i + 1]);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                return 2;
            }
        }
    }
    app.add_option("--config", config_file, "key=value configuration file");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--alpha", cfg.alpha, "first rotation number");
        sub->add_option("--beta", cfg.beta, "second rotation number");
        sub->add_option("--resolution", cfg.resolution, "grid resolution R");
        sub->add_option("--orbit-steps", cfg.orbit_steps, "orbit length");
        sub->add_option("--stages", cfg.stages, "blow-up stages N");
        sub->add_option("--seed", cfg.seed, "rng seed");
        sub->add_option("--out", cfg.out_dir, "output directory");
    };

    auto* ex = app.add_subcommand("example", "run an example pipeline");
    std::string example_id;
    long pchar = 1, qchar = 1;
    ex->add_option("id", example_id, "pipeline id")->required();
    ex->add_option("--p", pchar, "target characteristic p (conjugated)");
    ex->add_option("--q", qchar, "target characteristic q (conjugated)");
    add_common(ex);

    auto* rho = app.add_subcommand("estimate-rho", "estimate a rotation vector");
    std::string map_name = "translation";
    long horizon = 50;
    int nseeds = 5;
    rho->add_option("--map", map_name, "translation|denjoy-rotation|denjoy-denjoy|conjugated|da");
    rho->add_option("-n,--n", horizon, "iteration horizon");
    rho->add_option("--seeds", nseeds, "number of seeds");
    std::string matrix_str;
    rho->add_option("--matrix", matrix_str, "a,b,c,d for the conjugated map");
    add_common(rho);

    auto* cls = app.add_subcommand("classify", "classify a PGM occupancy grid");
    std::string grid_path, out_path;
    int pmax = 8;
    cls->add_option("--grid", grid_path, "input PGM")->required();
    cls->add_option("--out", out_path, "output CSV (stdout when omitted)");
    cls->add_option("--pmax", pmax, "deck-subgroup offset clamp");

    auto* ren = app.add_subcommand("render", "render a classified grid to PPM");
    std::string rgrid, rout = "render.ppm";
    ren->add_option("--grid", rgrid, "input PGM")->required();
    ren->add_option("--out", rout, "output PPM");
    ren->add_option("--pmax", pmax, "deck-subgroup offset clamp");

    auto* wed = app.add_subcommand("wedge-check", "run a wedge density check");
    std::string kind = "quad", wout;
    wed->add_option("--kind", kind, "quad|linear (first factor)");
    wed->add_option("--out", wout, "output CSV");

    auto* ver = app.add_subcommand("verify", "run acceptance suites");
    std::string suite = "all";
    ver->add_option("suite", suite, "suite name or 'all'");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (ex->parsed()) return cmd_example(example_id, cfg, pchar, qchar);
        if (rho->parsed()) {
            if (!matrix_str.empty()) {
                IntegerMatrix m;
                if (std::sscanf(matrix_str.c_str(), "%ld,%ld,%ld,%ld", &m.a, &m.b, &m.c,
                                &m.d) != 4 ||
                    !m.unimodular()) {
                    std::cerr << "bad --matrix\n";
                    return 2;
                }
                cfg.matrix = m;
            }
            return cmd_estimate_rho(map_name, cfg, horizon, nseeds);
        }
        if (cls->parsed()) return cmd_classify(grid_path, out_path, pmax);
        if (ren->parsed()) return cmd_render(rgrid, rout, pmax);
        if (wed->parsed()) return cmd_wedge_check(kind, wout);
        if (ver->parsed()) return cmd_verify(suite);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
