#include "torusdyn/circle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "torusdyn/geom.hpp"

namespace torusdyn {

CircleLift rotation_lift(double theta) {
    return {[theta](double x) { return x + theta; },
            [theta](double x) { return x - theta; },
            "rotation(" + std::to_string(theta) + ")"};
}

CircleLift identity_lift() {
    return {[](double x) { return x; }, [](double x) { return x; }, "identity"};
}

CircleRotationEstimate rotation_number_estimate(const CircleLift& F, double x, long n) {
    if (n < 1) throw std::invalid_argument("rotation_number_estimate: n must be >= 1");
    const double h = 1e-7;
    double z = x, zc = x + h;
    double half_value = 0.0;
    long half = n / 2;
    for (long i = 1; i <= n; ++i) {
        z = F.evaluate(z);
        zc = F.evaluate(zc);
        if (!(zc > z) || !std::isfinite(z))
            throw std::runtime_error("rotation_number_estimate: non-monotone lift detected during iteration");
        if (i == half) half_value = (z - x) / double(half);
    }
    CircleRotationEstimate est;
    est.value = (z - x) / double(n);
    est.cauchy_gap = half > 0 ? std::abs(est.value - half_value) : 0.0;
    return est;
}

// ---------------------------------------------------------------------------
// CantorSetSpec
// ---------------------------------------------------------------------------

CantorSetSpec::CantorSetSpec(Generator gen, size_t default_depth, double total_gap_length,
                             std::function<double(size_t)> tail_length_bound)
    : gen_(std::move(gen)),
      default_depth_(default_depth),
      total_gap_length_(total_gap_length),
      tail_bound_(std::move(tail_length_bound)) {}

void CantorSetSpec::realize_to_depth(size_t depth) const {
    while (realized_rank_ < depth && !exhausted_) {
        std::optional<Gap> g = gen_ ? gen_(realized_rank_) : std::nullopt;
        if (!g) {
            exhausted_ = true;
            break;
        }
        ++realized_rank_;
        auto it = std::lower_bound(sorted_.begin(), sorted_.end(), g->center,
                                   [](const Gap& a, double c) { return a.center < c; });
        sorted_.insert(it, *g);
    }
}

double CantorSetSpec::unrealized_length_bound() const {
    if (exhausted_ || !gen_) return 0.0;
    return tail_bound_ ? tail_bound_(realized_rank_) : total_gap_length_;
}

CantorMembership CantorSetSpec::classify(double x, double tol) const {
    if (tol <= 0) throw std::invalid_argument("cantor_membership: tol must be > 0");
    realize_to_depth(default_depth_);
    if (anchor && circle_dist(x, *anchor) < 1e-15)
        return {CantorClass::IrrationalPart, 0, 0};
    for (const Gap& g : sorted_) {
        double d = circle_diff(x, g.center);
        if (std::abs(d) <= 0.5 * g.length + tol) {
            if (circle_dist(x, g.left()) <= tol) return {CantorClass::RationalPart, g.index, -1};
            if (circle_dist(x, g.right()) <= tol) return {CantorClass::RationalPart, g.index, +1};
            if (std::abs(d) < 0.5 * g.length) return {CantorClass::InGap, g.index, 0};
        }
    }
    if (unrealized_length_bound() >= tol) return {CantorClass::Undetermined, 0, 0};
    return {CantorClass::IrrationalPart, 0, 0};
}

std::vector<std::pair<double, double>> CantorSetSpec::uncovered_segments(double lo,
                                                                         double hi) const {
    realize_to_depth(default_depth_);
    std::vector<std::pair<double, double>> segs{{lo, hi}};
    if (hi <= lo) return {};
    for (const Gap& g : sorted_) {
        // consider lifted copies of the gap that can touch [lo, hi]
        for (double shift = std::floor(lo) - 1.0; shift <= std::ceil(hi) + 1.0; shift += 1.0) {
            double gl = g.left() + shift, gr = g.right() + shift;
            if (gr <= lo || gl >= hi) continue;
            std::vector<std::pair<double, double>> next;
            next.reserve(segs.size() + 1);
            for (auto& [a, b] : segs) {
                if (gr <= a || gl >= b) {
                    next.emplace_back(a, b);
                    continue;
                }
                if (gl > a) next.emplace_back(a, gl);
                if (gr < b) next.emplace_back(gr, b);
            }
            segs.swap(next);
        }
    }
    std::sort(segs.begin(), segs.end(), [](const auto& u, const auto& v) {
        return (u.second - u.first) > (v.second - v.first);
    });
    return segs;
}

std::optional<double> CantorSetSpec::find_irrational_point(double lo, double hi, double tol,
                                                           int budget) const {
    auto segs = uncovered_segments(lo, hi);
    int tried = 0;
    if (anchor) {
        for (auto& [a, b] : segs) {
            double rep = *anchor + std::round(((a + b) * 0.5) - *anchor);
            if (rep > a && rep < b) return rep;
        }
    }
    for (auto& [a, b] : segs) {
        if (tried >= budget) break;
        double mid = 0.5 * (a + b);
        ++tried;
        CantorMembership m = classify(frac(mid), tol);
        if (m.cls == CantorClass::IrrationalPart) return mid;
    }
    return std::nullopt;
}

std::string CantorSetSpec::serialize() const {
    realize_to_depth(default_depth_);
    std::vector<Gap> by_index = sorted_;
    std::sort(by_index.begin(), by_index.end(),
              [](const Gap& a, const Gap& b) { return a.index < b.index; });
    std::string out = "# cantor gaps: index center length\n";
    char buf[96];
    for (const Gap& g : by_index) {
        std::snprintf(buf, sizeof buf, "%ld %.17g %.17g\n", g.index, g.center, g.length);
        out += buf;
    }
    return out;
}

CantorSetSpec CantorSetSpec::deserialize(const std::string& text) {
    auto gaps = std::make_shared<std::vector<Gap>>();
    std::istringstream in(text);
    std::string line;
    double total = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        Gap g;
        if (std::sscanf(line.c_str(), "%ld %lg %lg", &g.index, &g.center, &g.length) == 3) {
            gaps->push_back(g);
            total += g.length;
        }
    }
    CantorSetSpec spec(
        [gaps](size_t rank) -> std::optional<Gap> {
            if (rank >= gaps->size()) return std::nullopt;
            return (*gaps)[rank];
        },
        gaps->size(), total, [](size_t) { return 0.0; });
    spec.realize_to_depth(gaps->size());
    return spec;
}

// ---------------------------------------------------------------------------
// Denjoy construction
// ---------------------------------------------------------------------------

GapSchedule geometric_schedule(double amplitude, double ratio) {
    if (amplitude <= 0 || ratio <= 1)
        throw std::invalid_argument("geometric_schedule: need amplitude > 0, ratio > 1");
    double total = amplitude * (1.0 + 2.0 / (ratio - 1.0));
    return {[amplitude, ratio](long k) { return amplitude * std::pow(ratio, -double(std::labs(k))); },
            [amplitude, ratio](long K) {
                // sum over |k| > K
                return 2.0 * amplitude * std::pow(ratio, -double(K)) / (ratio - 1.0);
            },
            total};
}

GapSchedule quadratic_capped_schedule(double alpha, double y0, double C, double amplitude,
                                      double ratio) {
    GapSchedule geo = geometric_schedule(amplitude, ratio);
    auto len = [alpha, y0, C, geo](long k) {
        double d = circle_dist(y0, frac(double(k) * alpha));
        return std::min(geo.length(k), C * d * d);
    };
    double total = 0;
    long K = 2048;
    for (long k = -K; k <= K; ++k) total += len(k);
    total += geo.tail_bound(K);
    return {len, geo.tail_bound, total};
}

namespace {

struct DenjoyCore {
    double alpha = 0;
    double s = 0;  // total inserted length
    // realized bookkeeping orbit, sorted by base coordinate y
    std::vector<double> y;       // orbit point {k alpha}
    std::vector<long> k_of;      // construction index of slot i
    std::vector<double> len;     // gap length
    std::vector<double> a, b;    // gap endpoints in the new circle
    std::vector<double> pre;     // pre[i] = sum of len[j], j < i (size n+1)
    long K = 0;                  // |k| <= K realized
    std::vector<size_t> slot_of; // k+K -> sorted slot
    GapSchedule schedule;

    size_t slot(long k) const { return slot_of[size_t(k + K)]; }

    // position of base point yy in the new circle (left limit at orbit points)
    double position(double yy) const {
        size_t idx = size_t(std::lower_bound(y.begin(), y.end(), yy) - y.begin());
        return (1.0 - s) * yy + pre[idx];
    }

    // collapse: new-circle coordinate x in [0,1) -> base coordinate in [0,1)
    double collapse(double x) const {
        size_t idx = size_t(std::upper_bound(a.begin(), a.end(), x) - a.begin());
        if (idx > 0 && x <= b[idx - 1]) return y[idx - 1];
        if (idx == 0) return x / (1.0 - s);
        return y[idx - 1] + (x - b[idx - 1]) / (1.0 - s);
    }

    // image of x under the rotated insertion structure; shift = +1 forward, -1 inverse
    double image_of(double x, int shift) const {
        size_t idx = size_t(std::upper_bound(a.begin(), a.end(), x) - a.begin());
        if (idx > 0 && x <= b[idx - 1]) {  // inside realized gap idx-1
            size_t i = idx - 1;
            long k = k_of[i] + shift;
            double t = len[i] > 0 ? (x - a[i]) / len[i] : 0.5;
            if (std::labs(k) <= K) {
                size_t j = slot(k);
                return a[j] + t * len[j];
            }
            // image gap unrealized: below working precision, collapse to its position
            return position(frac(y[i] + shift * alpha));
        }
        double yy = idx == 0 ? x / (1.0 - s) : y[idx - 1] + (x - b[idx - 1]) / (1.0 - s);
        double yn = yy + shift * alpha;
        yn -= std::floor(yn);
        size_t jdx = size_t(std::lower_bound(y.begin(), y.end(), yn) - y.begin());
        double image = (1.0 - s) * yn + pre[jdx];
        if (jdx < y.size() && y[jdx] == yn) image = a[jdx];
        return image;
    }

    double displacement(double x) const {
        double d = image_of(x, +1) - x;
        d -= std::floor(d);
        return d;
    }

    double inv_displacement(double x) const {
        double d = image_of(x, -1) - x;
        d -= std::ceil(d);
        if (d == 0.0) d = -1.0;  // exact wrap; displacement is in (-1,0)
        return d;
    }
};

}  // namespace

std::optional<std::pair<long, long>> find_rational_relation(double alpha, int height, double tol) {
    for (long q = 1; q <= height; ++q) {
        double v = double(q) * alpha;
        long p = long(std::llround(v));
        if (std::abs(v - double(p)) < tol) return std::make_pair(p, q);
    }
    return std::nullopt;
}

DenjoyPair build_denjoy(double alpha, const GapSchedule& schedule, const DenjoyOptions& opts) {
    alpha = frac(alpha);
    if (alpha <= 0.0 || alpha >= 1.0)
        throw std::invalid_argument("build_denjoy: alpha must lie in (0,1)");
    if (auto rel = find_rational_relation(alpha, opts.rationality_height, opts.rationality_tol))
        throw std::invalid_argument("build_denjoy: alpha is rational to working precision: " +
                                    std::to_string(rel->first) + "/" + std::to_string(rel->second));
    if (!(schedule.total < 1.0 - 1e-9))
        throw std::invalid_argument("build_denjoy: gap schedule sums to >= 1");

    auto core = std::make_shared<DenjoyCore>();
    core->alpha = alpha;
    core->schedule = schedule;
    long K = long(opts.bookkeeping_points);
    while (schedule.tail_bound(K) > 1e-18 && K < (1 << 22)) K *= 2;
    if (schedule.tail_bound(K) > 1e-18)
        throw std::invalid_argument("build_denjoy: schedule tail does not reach working precision");
    core->K = K;

    struct Entry {
        double y;
        long k;
        double l;
    };
    std::vector<Entry> entries;
    entries.reserve(size_t(2 * K + 1));
    double s = 0.0;
    for (long k = -K; k <= K; ++k) {
        double l = schedule.length(k);
        if (l < 0) throw std::invalid_argument("build_denjoy: negative gap length");
        s += l;
        entries.push_back({frac(double(k) * alpha), k, l});
    }
    core->s = s;  // realized mass; tail below 1e-18 is treated as zero
    std::sort(entries.begin(), entries.end(),
              [](const Entry& u, const Entry& v) { return u.y < v.y; });

    size_t n = entries.size();
    core->y.resize(n);
    core->k_of.resize(n);
    core->len.resize(n);
    core->a.resize(n);
    core->b.resize(n);
    core->pre.resize(n + 1);
    core->slot_of.resize(n);
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        core->y[i] = entries[i].y;
        core->k_of[i] = entries[i].k;
        core->len[i] = entries[i].l;
        core->pre[i] = acc;
        core->a[i] = (1.0 - s) * entries[i].y + acc;
        core->b[i] = core->a[i] + entries[i].l;
        acc += entries[i].l;
        core->slot_of[size_t(entries[i].k + K)] = i;
    }
    core->pre[n] = acc;

    DenjoyPair pair;
    pair.alpha = alpha;
    pair.inserted_total = s;
    std::string label = "denjoy(alpha=" + std::to_string(alpha) + ")";
    pair.lift = {[core](double x) {
                     double x0 = frac(x);
                     return x + core->displacement(x0);
                 },
                 [core](double x) {
                     double x0 = frac(x);
                     return x + core->inv_displacement(x0);
                 },
                 label};
    pair.collapse = [core](double x) { return core->collapse(frac(x)); };
    pair.cantor_point_from_base = [core](double yy) { return core->position(frac(yy)); };

    // Cantor spec: gaps enumerated by |k| (0, +1, -1, +2, -2, ...)
    auto sched = schedule;
    double s_total = s;
    pair.cantor = CantorSetSpec(
        [core, sched](size_t rank) -> std::optional<Gap> {
            long m = long((rank + 1) / 2);
            long k = (rank == 0) ? 0 : (rank % 2 == 1 ? m : -m);
            Gap g;
            g.index = k;
            double l, apos;
            if (std::labs(k) <= core->K) {
                size_t i = core->slot(k);
                l = core->len[i];
                apos = core->a[i];
            } else {
                l = sched.length(k);
                apos = core->position(frac(double(k) * core->alpha));
            }
            g.length = l;
            g.center = frac(apos + 0.5 * l);
            return g;
        },
        opts.spec_depth, s_total,
        [sched](size_t rank) {
            long m = long((rank + 1) / 2);
            return sched.tail_bound(std::max(0L, m - 1));
        });
    pair.cantor.base_rotation = alpha;
    pair.cantor.realize_to_depth(opts.spec_depth);
    return pair;
}

// ---------------------------------------------------------------------------
// Lemma-22 style sets
// ---------------------------------------------------------------------------

CantorSetSpec build_quadratic_gap_cantor(double x0, double C, std::pair<double, double> J,
                                         size_t depth) {
    double W = 0.5 * (J.second - J.first);
    if (!(C > 0) || !(W > 0) || W >= 0.5)
        throw std::invalid_argument("build_quadratic_gap_cantor: need C > 0 and a proper arc J");
    if (circle_dist(frac(0.5 * (J.first + J.second)), frac(x0)) > 1e-9)
        throw std::invalid_argument("build_quadratic_gap_cantor: x0 must be the midpoint of J");
    const double q = 0.5;
    double total = 0;
    for (size_t j = 1; j <= 4096; ++j) {
        double r = W * std::pow(q, double(j));
        total += 2.0 * std::min(C * r * r, 0.45 * (1.0 - q) * r);
        if (r < 1e-300) break;
    }
    CantorSetSpec spec(
        [x0, C, W, q](size_t rank) -> std::optional<Gap> {
            size_t j = rank / 2 + 1;
            int side = rank % 2 == 0 ? +1 : -1;
            double r = W * std::pow(q, double(j));
            if (r < 1e-300) return std::nullopt;
            Gap g;
            g.index = long(j) * side;
            g.length = std::min(C * r * r, 0.45 * (1.0 - q) * r);
            g.center = frac(x0 + side * r);
            return g;
        },
        2 * depth, total,
        [C, W, q](size_t rank) {
            size_t j = rank / 2 + 1;
            double r = W * std::pow(q, double(j));
            return std::min(C * r * r, 0.45 * (1.0 - q) * r);
        });
    spec.anchor = frac(x0);
    spec.window = J;
    spec.realize_to_depth(2 * depth);
    return spec;
}

CantorSetSpec build_linear_gap_cantor(double x0, std::pair<double, double> J, size_t depth,
                                      double sliver) {
    double W = 0.5 * (J.second - J.first);
    if (!(W > 0) || W >= 0.5 || sliver <= 0 || sliver >= 0.2)
        throw std::invalid_argument("build_linear_gap_cantor: bad window or sliver width");
    const double q = 0.5;
    double total = 0;
    for (size_t j = 1; j <= 4096; ++j) {
        double r = W * std::pow(q, double(j));
        double l = r * (1.0 - sliver) - r * q * (1.0 + sliver);
        if (l <= 0 || r < 1e-300) break;
        total += 2.0 * l;
    }
    CantorSetSpec spec(
        [x0, W, q, sliver](size_t rank) -> std::optional<Gap> {
            size_t j = rank / 2 + 1;
            int side = rank % 2 == 0 ? +1 : -1;
            double rj = W * std::pow(q, double(j));
            double inner = rj * q * (1.0 + sliver);
            double outer = rj * (1.0 - sliver);
            if (outer <= inner || rj < 1e-300) return std::nullopt;
            Gap g;
            g.index = long(j) * side;
            g.length = outer - inner;
            g.center = frac(x0 + side * 0.5 * (outer + inner));
            return g;
        },
        2 * depth, total,
        [W, q, sliver](size_t rank) {
            size_t j = rank / 2 + 1;
            double rj = W * std::pow(q, double(j));
            return rj * (1.0 - sliver - q * (1.0 + sliver));
        });
    spec.anchor = frac(x0);
    spec.window = J;
    spec.realize_to_depth(2 * depth);
    return spec;
}

CantorSetSpec full_circle_spec() {
    CantorSetSpec spec([](size_t) -> std::optional<Gap> { return std::nullopt; }, 0, 0.0,
                       [](size_t) { return 0.0; });
    spec.realize_to_depth(1);
    return spec;
}

CantorMembership cantor_membership(const CantorSetSpec& spec, double x, double tol) {
    return spec.classify(frac(x), tol);
}

}  // namespace torusdyn
