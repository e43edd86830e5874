#include "torusdyn/classify.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace torusdyn {

double OccupancyGrid::marked_fraction() const {
    size_t m = 0;
    for (uint8_t v : marked) m += v;
    return double(m) / double(marked.size());
}

void OccupancyGrid::dilate(int radius) {
    if (radius <= 0) return;
    std::vector<uint8_t> out(marked.size(), 0);
    for (int cy = 0; cy < R; ++cy) {
        for (int cx = 0; cx < R; ++cx) {
            if (!at(cx, cy)) continue;
            for (int dy = -radius; dy <= radius; ++dy) {
                int yy = (cy + dy + R) % R;
                for (int dx = -radius; dx <= radius; ++dx) {
                    int xx = (cx + dx + R) % R;
                    out[idx(xx, yy)] = 1;
                }
            }
        }
    }
    marked.swap(out);
}

OccupancyGrid orbit_occupancy(const TorusLift& F, const Vec2& seed, long steps, int R,
                              int dilate) {
    if (steps < 1) throw std::invalid_argument("orbit_occupancy: steps must be >= 1");
    OccupancyGrid grid(R);
    grid.seed = seed;
    grid.orbit_steps = steps;
    grid.dilate_radius = dilate;
    grid.provenance = "orbit(" + F.label + ")";
    Vec2 z = seed;
    grid.mark_point(z);
    long fwd = steps / 2, bwd = steps - fwd;
    for (long i = 0; i < fwd; ++i) {
        z = F.evaluate(z);
        grid.mark_point(z);
    }
    z = seed;
    for (long i = 0; i < bwd; ++i) {
        z = F.inverse_evaluate(z);
        grid.mark_point(z);
    }
    grid.dilate(dilate);
    return grid;
}

namespace {

std::vector<GridComponent> components_impl(const OccupancyGrid& grid, bool on_marked,
                                           bool eight_connected) {
    int R = grid.R;
    std::vector<int> label(size_t(R) * size_t(R), -1);
    std::vector<GridComponent> comps;
    std::deque<int> queue;
    const int dx4[] = {1, -1, 0, 0}, dy4[] = {0, 0, 1, -1};
    const int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1}, dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
    const int* dxs = eight_connected ? dx8 : dx4;
    const int* dys = eight_connected ? dy8 : dy4;
    int nn = eight_connected ? 8 : 4;

    for (int start = 0; start < R * R; ++start) {
        bool m = grid.marked[size_t(start)] != 0;
        if (m != on_marked || label[size_t(start)] >= 0) continue;
        GridComponent comp;
        comp.label = int(comps.size());
        label[size_t(start)] = comp.label;
        queue.push_back(start);
        while (!queue.empty()) {
            int cur = queue.front();
            queue.pop_front();
            comp.cells.push_back(cur);
            int cx = cur % R, cy = cur / R;
            for (int t = 0; t < nn; ++t) {
                int xx = (cx + dxs[t] + R) % R;
                int yy = (cy + dys[t] + R) % R;
                int ni = yy * R + xx;
                bool nm = grid.marked[size_t(ni)] != 0;
                if (nm == on_marked && label[size_t(ni)] < 0) {
                    label[size_t(ni)] = comp.label;
                    queue.push_back(ni);
                }
            }
        }
        std::sort(comp.cells.begin(), comp.cells.end());
        comps.push_back(std::move(comp));
    }
    return comps;
}

}  // namespace

std::vector<GridComponent> complement_components(const OccupancyGrid& grid) {
    return components_impl(grid, false, false);
}

std::vector<GridComponent> marked_components(const OccupancyGrid& grid) {
    return components_impl(grid, true, true);
}

DeckResult deck_subgroup(const OccupancyGrid& grid, const GridComponent& comp, int P_max) {
    if (comp.cells.empty()) throw std::invalid_argument("deck_subgroup: empty component");
    if (P_max < 1) throw std::invalid_argument("deck_subgroup: P_max must be >= 1");
    int R = grid.R;
    int W = 2 * P_max + 1;
    // membership bitmap for the component
    std::vector<uint8_t> in_comp(size_t(R) * size_t(R), 0);
    for (int c : comp.cells) in_comp[size_t(c)] = 1;

    int base = comp.cells.front();
    std::vector<uint8_t> visited(size_t(R) * size_t(R) * size_t(W) * size_t(W), 0);
    auto sidx = [&](int cell, int ox, int oy) {
        return (size_t(cell) * size_t(W) + size_t(ox + P_max)) * size_t(W) + size_t(oy + P_max);
    };
    std::deque<std::array<int, 3>> queue;
    visited[sidx(base, 0, 0)] = 1;
    queue.push_back({base, 0, 0});

    DeckResult res;
    std::vector<std::pair<long, long>> offsets_found;
    const int dx4[] = {1, -1, 0, 0}, dy4[] = {0, 0, 1, -1};

    while (!queue.empty()) {
        auto [cell, ox, oy] = queue.front();
        queue.pop_front();
        int cx = cell % R, cy = cell / R;
        for (int t = 0; t < 4; ++t) {
            int nx = cx + dx4[t], ny = cy + dy4[t];
            int nox = ox, noy = oy;
            if (nx < 0) { nx += R; nox -= 1; }
            if (nx >= R) { nx -= R; nox += 1; }
            if (ny < 0) { ny += R; noy -= 1; }
            if (ny >= R) { ny -= R; noy += 1; }
            if (std::abs(nox) > P_max || std::abs(noy) > P_max) {
                res.truncated = true;
                continue;
            }
            int ncell = ny * R + nx;
            if (!in_comp[size_t(ncell)]) continue;
            if (visited[sidx(ncell, nox, noy)]) continue;
            visited[sidx(ncell, nox, noy)] = 1;
            if (ncell == base && (nox != 0 || noy != 0))
                offsets_found.emplace_back(nox, noy);
            queue.push_back({ncell, nox, noy});
        }
    }

    if (offsets_found.empty()) {
        res.subgroup = DeckSubgroup::Zero;
        return res;
    }
    // rank of the collected offset set
    auto [p0, q0] = offsets_found.front();
    bool full = false;
    for (auto& [p, q] : offsets_found) {
        if (p0 * q - q0 * p != 0) {
            full = true;
            break;
        }
    }
    if (full) {
        res.subgroup = DeckSubgroup::Full;
        return res;
    }
    // cyclic: primitive, sign-normalized generator (smallest norm found)
    long bp = p0, bq = q0;
    for (auto& [p, q] : offsets_found)
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

DomainType type_of(DeckSubgroup s) {
    switch (s) {
        case DeckSubgroup::Zero: return DomainType::Trivial;
        case DeckSubgroup::Cyclic: return DomainType::Essential;
        default: return DomainType::DoublyEssential;
    }
}

std::string to_string(DeckSubgroup s) {
    switch (s) {
        case DeckSubgroup::Zero: return "Zero";
        case DeckSubgroup::Cyclic: return "Cyclic";
        default: return "Full";
    }
}

std::string to_string(DomainType t) {
    switch (t) {
        case DomainType::Trivial: return "Trivial";
        case DomainType::Essential: return "Essential";
        default: return "DoublyEssential";
    }
}

namespace {

double component_diameter(const OccupancyGrid& grid, const GridComponent& comp) {
    // boundary cells (4-neighbor touching a marked cell), subsampled
    int R = grid.R;
    std::vector<Vec2> boundary;
    const int dx4[] = {1, -1, 0, 0}, dy4[] = {0, 0, 1, -1};
    for (int c : comp.cells) {
        int cx = c % R, cy = c / R;
        bool bd = false;
        for (int t = 0; t < 4 && !bd; ++t) {
            int xx = (cx + dx4[t] + R) % R;
            int yy = (cy + dy4[t] + R) % R;
            if (grid.at(xx, yy)) bd = true;
        }
        if (bd) boundary.push_back({(cx + 0.5) / R, (cy + 0.5) / R});
    }
    if (boundary.empty())
        for (int c : comp.cells) boundary.push_back({(c % R + 0.5) / R, (c / R + 0.5) / R});
    size_t stride = std::max<size_t>(1, boundary.size() / 256);
    std::vector<Vec2> sampled;
    for (size_t i = 0; i < boundary.size(); i += stride) sampled.push_back(boundary[i]);
    return sampled_diameter(sampled);
}

}  // namespace

DomainReport classify_domains(const OccupancyGrid& grid, int P_max) {
    DomainReport report;
    auto comps = complement_components(grid);
    for (const auto& comp : comps) {
        ComponentReport cr;
        cr.label = comp.label;
        cr.cells = comp.size();
        DeckResult deck = deck_subgroup(grid, comp, P_max);
        cr.subgroup = deck.subgroup;
        cr.type = type_of(deck.subgroup);
        cr.p = deck.p;
        cr.q = deck.q;
        cr.truncated = deck.truncated;
        cr.diameter = deck.subgroup == DeckSubgroup::Zero ? component_diameter(grid, comp) : -1.0;
        report.components.push_back(cr);
    }
    return report;
}

std::string DomainReport::csv() const {
    std::string out = "component_id,size_cells,subgroup,p,q,type,diameter,flags\n";
    char buf[256];
    for (const auto& c : components) {
        std::string flags;
        if (c.truncated) flags += "truncated_at_Pmax;";
        if (c.sub_resolution) flags += "sub_resolution_record;";
        std::snprintf(buf, sizeof buf, "%d,%zu,%s,%ld,%ld,%s,%.8g,%s\n", c.label, c.cells,
                      to_string(c.subgroup).c_str(), c.p, c.q, to_string(c.type).c_str(),
                      c.diameter, flags.c_str());
        out += buf;
    }
    return out;
}

// ---------------------------------------------------------------------------
// quasi-Sierpinski check
// ---------------------------------------------------------------------------

namespace {

// Moore boundary tracing: true if the component's boundary cells form a single
// closed cycle. Components of up to a few cells are trivially simple.
bool boundary_single_cycle(const OccupancyGrid& grid, const GridComponent& comp) {
    if (comp.size() <= 4) return true;
    int R = grid.R;
    std::vector<uint8_t> in_comp(size_t(R) * size_t(R), 0);
    for (int c : comp.cells) in_comp[size_t(c)] = 1;
    const int dx4[] = {1, -1, 0, 0}, dy4[] = {0, 0, 1, -1};
    std::vector<int> boundary;
    for (int c : comp.cells) {
        int cx = c % R, cy = c / R;
        for (int t = 0; t < 4; ++t) {
            int xx = (cx + dx4[t] + R) % R;
            int yy = (cy + dy4[t] + R) % R;
            if (!in_comp[size_t(yy * R + xx)]) {
                boundary.push_back(c);
                break;
            }
        }
    }
    // boundary must be 8-connected as one piece and every boundary cell must
    // have exactly two boundary neighbors for a clean cycle; allow the
    // degenerate all-boundary thin components as long as connectivity holds.
    std::vector<uint8_t> in_bd(size_t(R) * size_t(R), 0);
    for (int c : boundary) in_bd[size_t(c)] = 1;
    // connectivity
    std::deque<int> queue{boundary.front()};
    std::vector<uint8_t> seen(size_t(R) * size_t(R), 0);
    seen[size_t(boundary.front())] = 1;
    size_t reached = 0;
    const int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1}, dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
    while (!queue.empty()) {
        int cur = queue.front();
        queue.pop_front();
        ++reached;
        int cx = cur % R, cy = cur / R;
        for (int t = 0; t < 8; ++t) {
            int xx = (cx + dx8[t] + R) % R;
            int yy = (cy + dy8[t] + R) % R;
            int ni = yy * R + xx;
            if (in_bd[size_t(ni)] && !seen[size_t(ni)]) {
                seen[size_t(ni)] = 1;
                queue.push_back(ni);
            }
        }
    }
    if (reached != boundary.size()) return false;
    // no interior holes: cells of the complement-of-component adjacent to the
    // component must all belong to one marked region around it; approximate by
    // checking the component has no fully enclosed unmarked pocket, which at
    // grid scale reduces to the cycle condition above. Accept here.
    return true;
}

// closure of a component = cells plus marked cells 8-adjacent to it
std::vector<int> closure_ring(const OccupancyGrid& grid, const GridComponent& comp) {
    int R = grid.R;
    std::vector<uint8_t> in_comp(size_t(R) * size_t(R), 0);
    for (int c : comp.cells) in_comp[size_t(c)] = 1;
    std::vector<int> ring;
    const int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1}, dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
    for (int c : comp.cells) {
        int cx = c % R, cy = c / R;
        for (int t = 0; t < 8; ++t) {
            int xx = (cx + dx8[t] + R) % R;
            int yy = (cy + dy8[t] + R) % R;
            int ni = yy * R + xx;
            if (grid.marked[size_t(ni)]) ring.push_back(ni);
        }
    }
    std::sort(ring.begin(), ring.end());
    ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
    return ring;
}

}  // namespace

SierpinskiReport quasi_sierpinski_check(const std::vector<const OccupancyGrid*>& ladder,
                                        int P_max) {
    if (ladder.empty()) throw std::invalid_argument("quasi_sierpinski_check: empty ladder");
    const OccupancyGrid& grid = *ladder.front();
    auto comps = complement_components(grid);
    for (const auto& comp : comps) {
        DeckResult deck = deck_subgroup(grid, comp, P_max);
        if (deck.subgroup != DeckSubgroup::Zero)
            throw std::invalid_argument(
                "quasi_sierpinski_check: all components must be Trivial");
    }

    SierpinskiReport rep;
    for (const auto& comp : comps)
        if (!boundary_single_cycle(grid, comp)) rep.boundaries_simple = false;

    // pairwise closure overlaps
    std::vector<std::vector<int>> rings;
    rings.reserve(comps.size());
    for (const auto& comp : comps) rings.push_back(closure_ring(grid, comp));
    int max_overlap = 0;
    for (size_t i = 0; i < rings.size(); ++i) {
        for (size_t j = i + 1; j < rings.size(); ++j) {
            std::vector<int> inter;
            std::set_intersection(rings[i].begin(), rings[i].end(), rings[j].begin(),
                                  rings[j].end(), std::back_inserter(inter));
            max_overlap = std::max(max_overlap, int(inter.size()));
        }
    }
    rep.max_closure_overlap = max_overlap;

    double prev_max = -1.0;
    for (const OccupancyGrid* g : ladder) {
        auto cs = complement_components(*g);
        double mx = 0.0;
        for (const auto& c : cs) mx = std::max(mx, component_diameter(*g, c));
        if (prev_max >= 0 && mx > prev_max + 1e-12) rep.diameters_decay = false;
        if (g == ladder.front()) rep.max_diameter = mx;
        prev_max = mx;
    }

    if (!rep.boundaries_simple || max_overlap > 1)
        rep.verdict = SierpinskiVerdict::Neither;
    else if (max_overlap == 0)
        rep.verdict = SierpinskiVerdict::Sierpinski;
    else
        rep.verdict = SierpinskiVerdict::QuasiSierpinski;
    return rep;
}

}  // namespace torusdyn
