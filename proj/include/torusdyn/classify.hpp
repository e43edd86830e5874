#ifndef TORUSDYN_CLASSIFY_HPP
#define TORUSDYN_CLASSIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "torusdyn/geom.hpp"
#include "torusdyn/torus.hpp"

namespace torusdyn {

/// R x R bitmap over the unit torus approximating a closed invariant set.
struct OccupancyGrid {
    int R = 0;
    std::vector<uint8_t> marked;  // row-major, 1 = marked
    std::string provenance;
    long orbit_steps = 0;
    Vec2 seed;
    int dilate_radius = 1;

    explicit OccupancyGrid(int R_ = 0) : R(R_), marked(size_t(R_) * size_t(R_), 0) {}

    size_t idx(int cx, int cy) const { return size_t(cy) * size_t(R) + size_t(cx); }
    bool at(int cx, int cy) const { return marked[idx(cx, cy)] != 0; }
    void set(int cx, int cy) { marked[idx(cx, cy)] = 1; }
    int cell_of(double coord) const {
        int c = int(std::floor(frac(coord) * R));
        return c >= R ? R - 1 : c;
    }
    void mark_point(const Vec2& z) { set(cell_of(z.x), cell_of(z.y)); }
    double marked_fraction() const;
    void dilate(int radius);  // Chebyshev (square) dilation with wrap
};

/// Marks cells visited by the forward and backward orbit halves, then dilates.
OccupancyGrid orbit_occupancy(const TorusLift& F, const Vec2& seed, long steps, int R,
                              int dilate);

struct GridComponent {
    int label = 0;
    std::vector<int> cells;  // flat indices, sorted ascending
    size_t size() const { return cells.size(); }
};

/// 4-connected components of the unmarked cells (torus wraparound); labels are
/// assigned in order of smallest contained cell index.
std::vector<GridComponent> complement_components(const OccupancyGrid& grid);

/// 8-connected components of the marked cells.
std::vector<GridComponent> marked_components(const OccupancyGrid& grid);

enum class DeckSubgroup { Zero, Cyclic, Full };
enum class DomainType { Trivial, Essential, DoublyEssential };

struct DeckResult {
    DeckSubgroup subgroup = DeckSubgroup::Zero;
    long p = 0, q = 0;     // primitive characteristic when Cyclic
    bool truncated = false;  // offset clamp reached with frontier open
};

/// Deck-transformation subgroup of the component: BFS over (cell, offset)
/// states on the universal cover, offsets clamped to [-P_max, P_max]^2. The
/// subgroup generated by all offsets joining the base cell to itself is the
/// computational proxy for the pi_1 inclusion.
DeckResult deck_subgroup(const OccupancyGrid& grid, const GridComponent& comp, int P_max = 8);

struct ComponentReport {
    int label = 0;
    size_t cells = 0;
    DeckSubgroup subgroup = DeckSubgroup::Zero;
    DomainType type = DomainType::Trivial;
    long p = 0, q = 0;
    double diameter = 0.0;   // torus units; -1 when unbounded in direction (p,q)
    bool truncated = false;
    bool sub_resolution = false;  // injected from analytic records, below grid scale
};

struct DomainReport {
    std::vector<ComponentReport> components;
    std::string csv() const;
};

DomainReport classify_domains(const OccupancyGrid& grid, int P_max = 8);

DomainType type_of(DeckSubgroup s);
std::string to_string(DeckSubgroup s);
std::string to_string(DomainType t);

enum class SierpinskiVerdict { Sierpinski, QuasiSierpinski, Neither };

struct SierpinskiReport {
    SierpinskiVerdict verdict = SierpinskiVerdict::Neither;
    bool boundaries_simple = true;
    int max_closure_overlap = 0;     // cells shared by any two component closures
    bool diameters_decay = true;     // across the supplied resolution ladder
    double max_diameter = 0.0;       // torus units at the base resolution
};

/// Definition-2 check on a grid whose complement components are all Trivial:
/// (a) each component boundary is a single cell cycle, (b) pairwise closure
/// intersections cover at most one cell, (c) max component diameter does not
/// grow along the resolution ladder (vector of grids at increasing R).
SierpinskiReport quasi_sierpinski_check(const std::vector<const OccupancyGrid*>& ladder,
                                        int P_max = 8);

}  // namespace torusdyn

#endif
