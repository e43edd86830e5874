#ifndef TORUSDYN_TORUS_HPP
#define TORUSDYN_TORUS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "torusdyn/circle.hpp"
#include "torusdyn/geom.hpp"

namespace torusdyn {

/// Lift of a torus homeomorphism: a plane map commuting with integer
/// translations. Immutable once built; safe to evaluate concurrently.
struct TorusLift {
    std::function<Vec2(Vec2)> evaluate;
    std::function<Vec2(Vec2)> inverse_evaluate;
    std::string label;
};

TorusLift translation_map(double alpha, double beta);
TorusLift identity_torus();
TorusLift product_map(const CircleLift& phi, const CircleLift& psi);

struct RotationEstimate {
    Vec2 vector;              // mean of per-seed estimates
    long horizon = 0;         // n
    double cauchy_gap = 0.0;  // |mean(n) - mean(n/2)|
    double seed_spread = 0.0; // max pairwise distance of per-seed estimates
    std::vector<Vec2> seeds;
    std::vector<Vec2> per_seed;
};

RotationEstimate rotation_vector_estimate(const TorusLift& F, const std::vector<Vec2>& seeds,
                                          long n);

/// CSV export: seed_x,seed_y,n,est_x,est_y
std::string rotation_estimate_csv(const RotationEstimate& est);

struct IntegerMatrix {
    long a = 1, b = 0, c = 0, d = 1;  // [[a,b],[c,d]]

    long det() const { return a * d - b * c; }
    bool unimodular() const { return det() == 1 || det() == -1; }
    IntegerMatrix inverse() const;
    Vec2 apply(const Vec2& v) const { return {double(a) * v.x + double(b) * v.y,
                                              double(c) * v.x + double(d) * v.y}; }
    std::pair<long, long> apply_int(long p, long q) const { return {a * p + b * q, c * p + d * q}; }
    double op_norm() const;  // largest singular value
};

/// An SL(2,Z) matrix sending the homotopy class (0,1) to (p,q); gcd(p,q) = 1.
IntegerMatrix matrix_sending_01_to(long p, long q);

struct IndependenceResult {
    bool relation_found = false;
    long N1 = 0, N2 = 0, N3 = 0;
    double residual = 0.0;
};

/// Exhaustive scan over |N_i| <= H for |N1 + N2 a + N3 b| < tol. A clean scan
/// is evidence, not proof, of rational independence.
IndependenceResult rational_independence(double alpha, double beta, int H = 100,
                                         double tol = 1e-9);

/// L_A^{-1} o F o L_A. Rejects non-unimodular A.
TorusLift linear_conjugate(const TorusLift& F, const IntegerMatrix& A);

/// Which matrix action the conjugation realizes on rotation vectors, decided
/// empirically on a translation at build time: returns "inverse" if
/// rho(L_A^{-1} F L_A) = A^{-1} rho(F), "direct" if it equals A rho(F).
std::string conjugation_action_direction();

}  // namespace torusdyn

#endif
