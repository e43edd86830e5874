#ifndef TORUSDYN_PIPELINES_HPP
#define TORUSDYN_PIPELINES_HPP

#include <map>
#include <optional>
#include <string>

#include "torusdyn/blowup.hpp"
#include "torusdyn/classify.hpp"
#include "torusdyn/da.hpp"
#include "torusdyn/io.hpp"

namespace torusdyn {

enum class ExampleId {
    Type1DA,
    Type2Annuli,
    Type2AnnuliConjugated,
    Type2WithDisks,
    Type3Cantor,
    Type3Extension,
};

std::optional<ExampleId> example_id_from_string(const std::string& s);
std::string to_string(ExampleId id);

struct PipelineSpec {
    ExampleId id = ExampleId::Type2Annuli;
    double alpha = std::sqrt(2.0) - 1.0;   // first-factor rotation number
    double beta = std::sqrt(3.0) - 1.0;    // second-factor rotation number
    long p = 1, q = 1;                     // target characteristic (conjugated variant)
    int stages = 3;                        // blow-up stages N
    int resolution = 256;
    long orbit_steps = 1000000;
    long rho_horizon = 100000;             // rotation-estimate iterations
    int rho_seeds = 20;
    uint64_t seed = 1;
    int independence_height = 100;
    double nu_scale = M_E;                 // DA pipeline: nu with nu v^u = (alpha, beta)
    int da_mesh = 512;
};

PipelineSpec pipeline_spec_from_config(ExampleId id, const Config& cfg);

struct PipelineBundle {
    PipelineSpec spec;
    OccupancyGrid grid;
    DomainReport report;
    RotationEstimate rho;
    std::string manifest;                      // plain text parameters + measurements
    std::map<std::string, std::string> extra;  // named artifacts (csv/json payloads)
    std::optional<WedgeReport> wedges;
};

/// Runs one of the example pipelines end to end: build the homeomorphism,
/// estimate the rotation vector, approximate the minimal set, classify the
/// complementary domains. The (alpha, beta) pair must pass the independence
/// check before anything runs.
PipelineBundle run_pipeline(const PipelineSpec& spec);

/// Writes manifest.txt, grids/*.pgm, reports/*.csv, renders/*.ppm under out_dir.
void write_bundle(const PipelineBundle& bundle, const std::string& out_dir);

/// Marks every cell crossed by the leaf trace through the seed. For the DA
/// fibered map the orbit lies on a single invariant leaf whose closure equals
/// the orbit closure, so tracing the leaf approximates the same minimal set at
/// a fraction of the cost.
OccupancyGrid leaf_trace_occupancy(const DAMap& g, const SectionGrid& S, Vec2 seed,
                                   double total_rise, int R, int dilate);

/// Fraction of R cells meeting the realized complement of the Cantor set, after
/// a 1-cell dilation: the 1-D oracle whose product predicts the 2-D occupancy.
double cantor_cell_cover(const CantorSetSpec& spec, int R, int dilate);

}  // namespace torusdyn

#endif
