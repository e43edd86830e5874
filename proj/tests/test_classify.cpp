#include <cmath>
#include <random>

#include "doctest.h"
#include "torusdyn/circle.hpp"
#include "torusdyn/classify.hpp"
#include "torusdyn/io.hpp"
#include "torusdyn/pipelines.hpp"

using namespace torusdyn;

namespace {

const double kAlpha = std::sqrt(2.0) - 1.0;
const double kBeta = std::sqrt(3.0) - 1.0;

OccupancyGrid bitmap_from(const std::vector<std::string>& rows) {
    int R = int(rows.size());
    OccupancyGrid grid(R);
    for (int j = 0; j < R; ++j)
        for (int i = 0; i < R; ++i)
            if (rows[size_t(j)][size_t(i)] == '#') grid.set(i, j);
    return grid;
}

// brute-force 4-connectivity oracle used against the flood fill
bool brute_connected(const OccupancyGrid& grid, int a, int b) {
    int R = grid.R;
    if (grid.marked[size_t(a)] || grid.marked[size_t(b)]) return false;
    std::vector<uint8_t> seen(grid.marked.size(), 0);
    std::vector<int> stack{a};
    seen[size_t(a)] = 1;
    const int dx[] = {1, -1, 0, 0}, dy[] = {0, 0, 1, -1};
    while (!stack.empty()) {
        int cur = stack.back();
        stack.pop_back();
        if (cur == b) return true;
        for (int t = 0; t < 4; ++t) {
            int cx = (cur % R + dx[t] + R) % R, cy = (cur / R + dy[t] + R) % R;
            int ni = cy * R + cx;
            if (!grid.marked[size_t(ni)] && !seen[size_t(ni)]) {
                seen[size_t(ni)] = 1;
                stack.push_back(ni);
            }
        }
    }
    return false;
}

OccupancyGrid strip_bitmap(int R, long p, long q, double width) {
    OccupancyGrid grid(R);
    for (int j = 0; j < R; ++j)
        for (int i = 0; i < R; ++i) {
            double v = frac(double(q) * (i + 0.5) / R - double(p) * (j + 0.5) / R);
            if (!(std::abs(circle_diff(v, 0.5)) < 0.5 * width)) grid.set(i, j);
        }
    return grid;
}

}  // namespace

TEST_CASE("occupancy of an irrational translation fills the torus") {
    TorusLift t = translation_map(kAlpha, kBeta);
    OccupancyGrid grid = orbit_occupancy(t, {0.2, 0.7}, 1000000, 256, 1);
    CHECK(grid.marked_fraction() > 0.99);
}

TEST_CASE("occupancy of a rational translation marks two cells before dilation") {
    TorusLift t = translation_map(0.5, 0.0);
    OccupancyGrid grid = orbit_occupancy(t, {0.1, 0.6}, 1000, 64, 0);
    size_t marked = 0;
    std::vector<int> cells;
    for (size_t i = 0; i < grid.marked.size(); ++i)
        if (grid.marked[i]) {
            ++marked;
            cells.push_back(int(i));
        }
    REQUIRE(marked == 2);
    CHECK(cells[0] / 64 == cells[1] / 64);               // same row
    CHECK(cells[0] % 64 != cells[1] % 64);               // two distinct columns
    CHECK(std::abs(cells[0] % 64 - cells[1] % 64) == 32);  // half a turn apart
}

TEST_CASE("denjoy product occupancy is stable under step doubling") {
    DenjoyPair dj = build_denjoy(kAlpha, geometric_schedule());
    TorusLift f = product_map(dj.lift, rotation_lift(kBeta));
    Vec2 seed{dj.cantor_point_from_base(0.318309886), 0.36787944};
    OccupancyGrid g1 = orbit_occupancy(f, seed, 500000, 256, 1);
    OccupancyGrid g2 = orbit_occupancy(f, seed, 1000000, 256, 1);
    CHECK(g1.marked_fraction() < 1.0);
    CHECK(g2.marked_fraction() < 1.0);
    CHECK(std::abs(g2.marked_fraction() - g1.marked_fraction()) <
          0.02 * g1.marked_fraction());
}

TEST_CASE("complement components: degenerate grids") {
    OccupancyGrid full(8);
    for (auto& v : full.marked) v = 1;
    CHECK(complement_components(full).empty());

    OccupancyGrid one(8);
    for (auto& v : one.marked) v = 1;
    one.marked[3 * 8 + 4] = 0;
    auto comps = complement_components(one);
    REQUIRE(comps.size() == 1);
    CHECK(comps[0].size() == 1);
}

TEST_CASE("complement components wrap around the torus") {
    // vertical strip of unmarked columns crossing the seam
    OccupancyGrid grid(16);
    for (int j = 0; j < 16; ++j)
        for (int i = 0; i < 16; ++i)
            if (!(i >= 14 || i <= 1)) grid.set(i, j);
    auto comps = complement_components(grid);
    REQUIRE(comps.size() == 1);
    CHECK(comps[0].size() == 4 * 16);
    // oracle: seam cells connect
    CHECK(brute_connected(grid, 0 * 16 + 15, 8 * 16 + 0));
}

TEST_CASE("deck subgroup on synthetic bitmaps with a brute-force oracle") {
    struct Case {
        OccupancyGrid grid;
        DeckSubgroup expect;
        long p, q;
    };
    auto disk = [](int R) {
        OccupancyGrid g(R);
        for (int j = 0; j < R; ++j)
            for (int i = 0; i < R; ++i)
                if (torus_dist({(i + 0.5) / R, (j + 0.5) / R}, {0.5, 0.5}) >= 0.2) g.set(i, j);
        return g;
    };
    std::vector<Case> cases;
    cases.push_back({disk(32), DeckSubgroup::Zero, 0, 0});
    cases.push_back({strip_bitmap(32, 0, 1, 0.25), DeckSubgroup::Cyclic, 0, 1});
    cases.push_back({strip_bitmap(32, 1, 0, 0.25), DeckSubgroup::Cyclic, 1, 0});
    cases.push_back({strip_bitmap(32, 1, 1, 0.25), DeckSubgroup::Cyclic, 1, 1});
    cases.push_back({strip_bitmap(32, 2, 1, 0.25), DeckSubgroup::Cyclic, 2, 1});
    for (auto& c : cases) {
        auto comps = complement_components(c.grid);
        size_t big = 0;
        for (size_t i = 1; i < comps.size(); ++i)
            if (comps[i].size() > comps[big].size()) big = i;
        DeckResult res = deck_subgroup(c.grid, comps[big], 8);
        CHECK(res.subgroup == c.expect);
        if (c.expect == DeckSubgroup::Cyclic) {
            CHECK(res.p == c.p);
            CHECK(res.q == c.q);
        }
    }
    // complement of a small disk is doubly essential
    OccupancyGrid cod(32);
    for (int j = 0; j < 32; ++j)
        for (int i = 0; i < 32; ++i)
            if (torus_dist({(i + 0.5) / 32, (j + 0.5) / 32}, {0.5, 0.5}) < 0.2) cod.set(i, j);
    auto comps = complement_components(cod);
    REQUIRE(comps.size() == 1);
    CHECK(deck_subgroup(cod, comps[0], 8).subgroup == DeckSubgroup::Full);
    CHECK_THROWS_AS(deck_subgroup(cod, GridComponent{}, 8), std::invalid_argument);
}

TEST_CASE("deck subgroup characteristic is primitive and sign-normalized") {
    OccupancyGrid grid = strip_bitmap(48, 2, 1, 0.2);
    auto comps = complement_components(grid);
    size_t big = 0;
    for (size_t i = 1; i < comps.size(); ++i)
        if (comps[i].size() > comps[big].size()) big = i;
    DeckResult res = deck_subgroup(grid, comps[big], 8);
    REQUIRE(res.subgroup == DeckSubgroup::Cyclic);
    CHECK(std::gcd(std::labs(res.p), std::labs(res.q)) == 1);
    CHECK((res.p > 0 || (res.p == 0 && res.q > 0)));
}

TEST_CASE("domain report CSV and renders") {
    OccupancyGrid grid = strip_bitmap(32, 0, 1, 0.25);
    DomainReport report = classify_domains(grid);
    std::string csv = report.csv();
    CHECK(csv.rfind("component_id,size_cells,subgroup,p,q,type,diameter,flags\n", 0) == 0);
    std::string ppm = render_domains(grid, report);
    CHECK(ppm.rfind("P6\n32 32\n255\n", 0) == 0);
    CHECK(ppm.size() == 15 + 32 * 32 * 3);

    std::string pgm = pgm_encode(grid);
    CHECK(pgm.rfind("P5\n32 32\n255\n", 0) == 0);
    OccupancyGrid back = pgm_decode(pgm);
    CHECK(back.marked == grid.marked);
}

TEST_CASE("quasi-sierpinski verdicts on constructed carpets") {
    // depth-3 separated carpet: delete the open middle ninth recursively
    int R = 81;
    OccupancyGrid carpet(R);
    for (auto& v : carpet.marked) v = 1;
    std::function<void(int, int, int)> carve = [&](int x, int y, int size) {
        if (size < 3) return;
        int third = size / 3;
        for (int j = y + third; j < y + 2 * third; ++j)
            for (int i = x + third; i < x + 2 * third; ++i)
                carpet.marked[size_t(j) * size_t(R) + size_t(i)] = 0;
        for (int dj = 0; dj < 3; ++dj)
            for (int di = 0; di < 3; ++di)
                if (di != 1 || dj != 1) carve(x + di * third, y + dj * third, third);
    };
    carve(0, 0, R);
    std::vector<const OccupancyGrid*> ladder{&carpet};
    SierpinskiReport rep = quasi_sierpinski_check(ladder);
    CHECK(rep.verdict == SierpinskiVerdict::Sierpinski);
    CHECK(rep.max_closure_overlap == 0);

    // add a square sharing exactly one corner cell with the central hole
    OccupancyGrid quasi = carpet;
    // central hole is [27,54) x [27,54); carve a 6x6 hole touching its corner
    for (int j = 21; j < 26; ++j)
        for (int i = 21; i < 26; ++i) quasi.marked[size_t(j) * size_t(R) + size_t(i)] = 0;
    std::vector<const OccupancyGrid*> ladder2{&quasi};
    SierpinskiReport rep2 = quasi_sierpinski_check(ladder2);
    CHECK(rep2.verdict == SierpinskiVerdict::QuasiSierpinski);
    CHECK(rep2.max_closure_overlap == 1);

    // two squares sharing an edge of more than one cell: neither
    OccupancyGrid bad = carpet;
    for (int j = 30; j < 50; ++j)
        for (int i = 22; i < 27; ++i) bad.marked[size_t(j) * size_t(R) + size_t(i)] = 0;
    std::vector<const OccupancyGrid*> ladder3{&bad};
    SierpinskiReport rep3 = quasi_sierpinski_check(ladder3);
    CHECK(rep3.verdict == SierpinskiVerdict::Neither);

    // mixed component types are rejected
    OccupancyGrid strip = strip_bitmap(27, 0, 1, 0.3);
    std::vector<const OccupancyGrid*> ladder4{&strip};
    CHECK_THROWS_AS(quasi_sierpinski_check(ladder4), std::invalid_argument);
}

TEST_CASE("cantor cell cover oracle matches a direct count") {
    DenjoyPair dj = build_denjoy(kAlpha, geometric_schedule());
    double cover = cantor_cell_cover(dj.cantor, 256, 1);
    CHECK(cover > 0.5);
    CHECK(cover < 1.0);
    // full circle: everything covered
    CHECK(cantor_cell_cover(full_circle_spec(), 64, 0) == 1.0);
}
