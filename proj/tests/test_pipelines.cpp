#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "torusdyn/io.hpp"
#include "torusdyn/pipelines.hpp"

using namespace torusdyn;

namespace {

PipelineSpec small_spec(ExampleId id) {
    PipelineSpec spec;
    spec.id = id;
    spec.resolution = 64;
    spec.orbit_steps = 60000;
    spec.rho_horizon = 4000;
    spec.rho_seeds = 6;
    spec.stages = 2;
    return spec;
}

}  // namespace

TEST_CASE("config parsing rejects unknown keys and bad ranges") {
    CHECK_THROWS_AS(Config::parse({{"bogus", "1"}}), std::invalid_argument);
    CHECK_THROWS_AS(Config::parse({{"alpha", "1.5"}}), std::invalid_argument);
    CHECK_THROWS_AS(Config::parse({{"resolution", "5"}}), std::invalid_argument);
    CHECK_THROWS_AS(Config::parse({{"matrix", "2,0,0,2"}}), std::invalid_argument);
    Config cfg = Config::parse({{"alpha", "0.25"}, {"resolution", "128"}});
    CHECK(cfg.alpha == 0.25);
    CHECK(cfg.resolution == 128);
    CHECK(cfg.manifest().find("alpha=0.25") != std::string::npos);
}

TEST_CASE("pipelines refuse rationally dependent rotation numbers") {
    PipelineSpec spec = small_spec(ExampleId::Type2Annuli);
    spec.alpha = 0.5;
    CHECK_THROWS_AS(run_pipeline(spec), std::invalid_argument);
}

TEST_CASE("type2_annuli small run classifies vertical annuli") {
    PipelineBundle bundle = run_pipeline(small_spec(ExampleId::Type2Annuli));
    REQUIRE(!bundle.report.components.empty());
    for (const auto& c : bundle.report.components) {
        CHECK(c.type == DomainType::Essential);
        CHECK(c.p == 0);
        CHECK(c.q == 1);
        CHECK(c.diameter == -1.0);  // unbounded in the (0,1) direction
    }
    CHECK(bundle.rho.seed_spread < 1e-2);
    CHECK(bundle.manifest.find("example=type2_annuli") != std::string::npos);
}

TEST_CASE("type2_annuli_conjugated realizes the requested characteristic") {
    PipelineSpec spec = small_spec(ExampleId::Type2AnnuliConjugated);
    spec.p = 1;
    spec.q = 1;
    PipelineBundle bundle = run_pipeline(spec);
    REQUIRE(!bundle.report.components.empty());
    for (const auto& c : bundle.report.components) {
        CHECK(c.type == DomainType::Essential);
        CHECK(c.p == 1);
        CHECK(c.q == 1);
    }
    CHECK(bundle.rho.seed_spread < 1e-2);
}

TEST_CASE("type2_with_disks adds trivial components and passes the wedge precheck") {
    PipelineSpec spec = small_spec(ExampleId::Type2WithDisks);
    spec.resolution = 128;
    PipelineBundle bundle = run_pipeline(spec);
    int trivial = 0, essential = 0;
    for (const auto& c : bundle.report.components) {
        if (c.type == DomainType::Trivial) ++trivial;
        if (c.type == DomainType::Essential) ++essential;
    }
    CHECK(trivial >= 2 * spec.stages + 1);
    CHECK(essential >= 1);
    REQUIRE(bundle.wedges.has_value());
    CHECK(bundle.wedges->misses == 0);
    CHECK(bundle.extra.count("blowup_manifest") == 1);
}

TEST_CASE("type3_cantor matches the product-measure oracle") {
    PipelineSpec spec = small_spec(ExampleId::Type3Cantor);
    spec.resolution = 128;
    spec.orbit_steps = 400000;
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
    REQUIRE(oracle > 0);
    CHECK(std::abs(measured - oracle) / oracle < 0.05);
    bool has_full = false;
    for (const auto& c : bundle.report.components)
        if (c.type == DomainType::DoublyEssential) has_full = true;
    CHECK(has_full);
}

TEST_CASE("bundles land on disk with the documented layout") {
    namespace fs = std::filesystem;
    PipelineSpec spec = small_spec(ExampleId::Type2Annuli);
    spec.resolution = 48;
    spec.orbit_steps = 20000;
    PipelineBundle bundle = run_pipeline(spec);
    fs::path dir = fs::temp_directory_path() / "torusdyn_bundle_test";
    fs::remove_all(dir);
    write_bundle(bundle, dir.string());
    CHECK(fs::exists(dir / "manifest.txt"));
    CHECK(fs::exists(dir / "grids/occupancy.pgm"));
    CHECK(fs::exists(dir / "reports/domains.csv"));
    CHECK(fs::exists(dir / "reports/rho.csv"));
    CHECK(fs::exists(dir / "renders/domains.ppm"));
    std::string ppm = read_file((dir / "renders/domains.ppm").string());
    CHECK(ppm.rfind("P6\n48 48\n255\n", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("resolution ladder keeps type assignments stable") {
    PipelineSpec lo = small_spec(ExampleId::Type2Annuli);
    PipelineSpec hi = lo;
    hi.resolution = 128;
    hi.orbit_steps = 200000;
    PipelineBundle a = run_pipeline(lo);
    PipelineBundle b = run_pipeline(hi);
    auto kinds = [](const DomainReport& r) {
        std::set<std::tuple<int, long, long>> s;
        for (const auto& c : r.components)
            s.insert({int(c.type), c.p, c.q});
        return s;
    };
    CHECK(kinds(a.report) == kinds(b.report));
}
