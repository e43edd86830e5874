#ifndef TORUSDYN_CIRCLE_HPP
#define TORUSDYN_CIRCLE_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace torusdyn {

/// Monotone degree-one lift of an orientation preserving circle homeomorphism.
/// F(x+1) = F(x)+1; evaluate/inverse are total on R. Immutable once built.
struct CircleLift {
    std::function<double(double)> evaluate;
    std::function<double(double)> inverse_evaluate;
    std::string label;
};

CircleLift rotation_lift(double theta);
CircleLift identity_lift();

struct CircleRotationEstimate {
    double value = 0.0;       // (F^n(x) - x)/n
    double cauchy_gap = 0.0;  // |estimate(n) - estimate(n/2)|
};

/// Birkhoff-style rotation number estimate. Iterates the lift n times; a
/// companion point x + h is advanced alongside, and an order inversion between
/// the two orbits is reported as a construction-integrity error.
CircleRotationEstimate rotation_number_estimate(const CircleLift& F, double x, long n);

/// One deleted interval of a circle Cantor set.
struct Gap {
    long index = 0;     // construction index k
    double center = 0;  // circle coordinate in [0,1)
    double length = 0;  // arc length
    double left() const { return center - 0.5 * length; }
    double right() const { return center + 0.5 * length; }
};

enum class CantorClass { InGap, RationalPart, IrrationalPart, Undetermined };

struct CantorMembership {
    CantorClass cls = CantorClass::Undetermined;
    long gap_index = 0;  // for InGap / RationalPart
    int side = 0;        // -1 left endpoint, +1 right endpoint (RationalPart)
};

/// A circle Cantor set specified by its family of deleted open intervals.
/// Gaps are realized lazily in enumeration-rank order; realized gaps are kept
/// sorted by position. Construction is single-threaded; the realized view is
/// immutable once realize_to_depth has been called.
class CantorSetSpec {
public:
    using Generator = std::function<std::optional<Gap>(size_t rank)>;

    CantorSetSpec() = default;
    CantorSetSpec(Generator gen, size_t default_depth, double total_gap_length,
                  std::function<double(size_t)> tail_length_bound);

    void realize_to_depth(size_t depth) const;
    const std::vector<Gap>& realized_sorted() const { return sorted_; }
    size_t realized_count() const { return realized_rank_; }

    /// Largest possible length among gaps not yet realized.
    double unrealized_length_bound() const;

    double total_gap_length() const { return total_gap_length_; }

    std::optional<double> anchor;            // x0 of Lemma-22 style sets
    std::optional<std::pair<double, double>> window;  // closed arc J = [lo, hi] (lifted, lo < hi)
    std::optional<double> base_rotation;     // rotation whose orbit indexes the gaps

    /// Classify x against the realized gaps; tol > 0 and below the shortest
    /// realized gap of interest. Points within tol of a realized endpoint are
    /// RationalPart; points clear of all realized gaps are IrrationalPart once
    /// the unrealized gaps cannot hide x (their length bound is below tol).
    CantorMembership classify(double x, double tol) const;

    /// Uncovered closed sub-segments of [lo, hi] after removing realized gaps,
    /// sorted by descending length. Coordinates are lifted (lo may be < 0).
    std::vector<std::pair<double, double>> uncovered_segments(double lo, double hi) const;

    /// Deterministic search for a point of the irrational part inside [lo, hi].
    std::optional<double> find_irrational_point(double lo, double hi, double tol,
                                                int budget = 16) const;

    /// Plain-text table, one realized gap per line: index center length.
    std::string serialize() const;
    static CantorSetSpec deserialize(const std::string& text);

private:
    Generator gen_;
    size_t default_depth_ = 0;
    double total_gap_length_ = 0.0;
    std::function<double(size_t)> tail_bound_;
    mutable std::vector<Gap> sorted_;
    mutable size_t realized_rank_ = 0;
    mutable bool exhausted_ = false;
};

/// Summable gap-length schedule for the Denjoy construction, k in Z.
struct GapSchedule {
    std::function<double(long)> length;        // l_k
    std::function<double(long)> tail_bound;    // bound on sum over |k| > K
    double total;                              // sum over all k (must be < 1)
};

/// Default schedule l_k = (1/8) 3^{-|k|}; total 1/4.
GapSchedule geometric_schedule(double amplitude = 0.125, double ratio = 3.0);

/// Schedule min(geometric, C (d(y0, {k a}))^2) measured in base-rotation
/// coordinates; forces the quadratic-gap property at the image of y0.
GapSchedule quadratic_capped_schedule(double alpha, double y0, double C,
                                      double amplitude = 0.125, double ratio = 3.0);

struct DenjoyOptions {
    size_t bookkeeping_points = 64;  // realized orbit points per side for the affine core
    size_t spec_depth = 256;         // gaps realized eagerly on the returned spec
    int rationality_height = 4096;   // reject alpha with |q a - p| < tol for q <= height
    double rationality_tol = 1e-9;
};

struct DenjoyPair {
    CircleLift lift;
    CantorSetSpec cantor;
    /// Semiconjugacy collapse map: pi1 o f = r_alpha o pi1, closed form.
    std::function<double(double)> collapse;
    /// Image of a base-circle point under the gap-insertion map; lands in the
    /// irrational part whenever y is not on the alpha-orbit of 0.
    std::function<double(double)> cantor_point_from_base;
    double alpha = 0.0;
    double inserted_total = 0.0;
};

/// Classical Denjoy counterexample over the rotation r_alpha: the orbit point
/// {k alpha} is blown up into a gap of length l_k, the map is affine on each
/// gap (gap k onto gap k+1) and conjugate to the rotation elsewhere.
DenjoyPair build_denjoy(double alpha, const GapSchedule& schedule,
                        const DenjoyOptions& opts = {});

/// Lemma-22 style Cantor set inside the arc J: dyadically placed gaps on both
/// sides of the midpoint x0 with |I_k| <= C d(x0, x_k)^2; x0 and the endpoints
/// of J stay in the irrational part.
CantorSetSpec build_quadratic_gap_cantor(double x0, double C, std::pair<double, double> J,
                                         size_t depth);

/// Control set with linearly decaying gaps (|I_k| comparable to d(x0, x_k));
/// leaves only thin slivers at geometric radii around x0.
CantorSetSpec build_linear_gap_cantor(double x0, std::pair<double, double> J, size_t depth,
                                      double sliver = 0.02);

/// Degenerate spec with no gaps at all: models a factor whose minimal set is
/// the full circle (an irrational rotation).
CantorSetSpec full_circle_spec();

CantorMembership cantor_membership(const CantorSetSpec& spec, double x, double tol);

/// Evidence-style rationality check: a relation |q a - p| < tol with q <= height.
std::optional<std::pair<long, long>> find_rational_relation(double alpha, int height, double tol);

}  // namespace torusdyn

#endif
