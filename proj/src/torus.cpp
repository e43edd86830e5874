#include "torusdyn/torus.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace torusdyn {

TorusLift translation_map(double alpha, double beta) {
    Vec2 v{alpha, beta};
    return {[v](Vec2 z) { return z + v; },
            [v](Vec2 z) { return z - v; },
            "translation(" + std::to_string(alpha) + "," + std::to_string(beta) + ")"};
}

TorusLift identity_torus() { return translation_map(0.0, 0.0); }

TorusLift product_map(const CircleLift& phi, const CircleLift& psi) {
    auto fx = phi.evaluate, fy = psi.evaluate;
    auto gx = phi.inverse_evaluate, gy = psi.inverse_evaluate;
    return {[fx, fy](Vec2 z) { return Vec2{fx(z.x), fy(z.y)}; },
            [gx, gy](Vec2 z) { return Vec2{gx(z.x), gy(z.y)}; },
            phi.label + " x " + psi.label};
}

RotationEstimate rotation_vector_estimate(const TorusLift& F, const std::vector<Vec2>& seeds,
                                          long n) {
    if (n < 2) throw std::invalid_argument("rotation_vector_estimate: n must be >= 2");
    if (seeds.empty()) throw std::invalid_argument("rotation_vector_estimate: seeds required");
    RotationEstimate est;
    est.horizon = n;
    est.seeds = seeds;
    est.per_seed.reserve(seeds.size());
    long half = n / 2;
    Vec2 mean{0, 0}, mean_half{0, 0};
    for (const Vec2& seed : seeds) {
        Vec2 z = seed;
        Vec2 at_half{0, 0};
        for (long i = 1; i <= n; ++i) {
            z = F.evaluate(z);
            if (i == half) at_half = (z - seed) / double(half);
        }
        Vec2 v = (z - seed) / double(n);
        est.per_seed.push_back(v);
        mean += v;
        mean_half += at_half;
    }
    mean = mean / double(seeds.size());
    mean_half = mean_half / double(seeds.size());
    est.vector = mean;
    est.cauchy_gap = norm(mean - mean_half);
    double spread = 0.0;
    for (size_t i = 0; i < est.per_seed.size(); ++i)
        for (size_t j = i + 1; j < est.per_seed.size(); ++j)
            spread = std::max(spread, norm(est.per_seed[i] - est.per_seed[j]));
    est.seed_spread = spread;
    return est;
}

std::string rotation_estimate_csv(const RotationEstimate& est) {
    std::string out = "seed_x,seed_y,n,est_x,est_y\n";
    char buf[160];
    for (size_t i = 0; i < est.seeds.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%ld,%.17g,%.17g\n", est.seeds[i].x,
                      est.seeds[i].y, est.horizon, est.per_seed[i].x, est.per_seed[i].y);
        out += buf;
    }
    return out;
}

IntegerMatrix IntegerMatrix::inverse() const {
    long dt = det();
    if (dt != 1 && dt != -1)
        throw std::invalid_argument("IntegerMatrix::inverse: determinant must be +-1");
    return {d / dt, -b / dt, -c / dt, a / dt};
}

double IntegerMatrix::op_norm() const {
    double aa = double(a), bb = double(b), cc = double(c), dd = double(d);
    double t = aa * aa + bb * bb + cc * cc + dd * dd;
    double det2 = double(det()) * double(det());
    double disc = std::sqrt(std::max(0.0, t * t - 4.0 * det2));
    return std::sqrt(0.5 * (t + disc));
}

IntegerMatrix matrix_sending_01_to(long p, long q) {
    if (std::gcd(std::labs(p), std::labs(q)) != 1)
        throw std::invalid_argument("matrix_sending_01_to: gcd(p,q) must be 1");
    // find x, y with x q - y p = 1 (extended Euclid), then B = [[x,p],[y,q]]
    long x0 = 0, y0 = 0;
    auto ext_gcd = [](long u, long v, long& x, long& y) {
        long old_r = u, r = v, old_s = 1, s = 0, old_t = 0, t = 1;
        while (r != 0) {
            long q = old_r / r;
            long tmp = old_r - q * r; old_r = r; r = tmp;
            tmp = old_s - q * s; old_s = s; s = tmp;
            tmp = old_t - q * t; old_t = t; t = tmp;
        }
        x = old_s;
        y = old_t;
        return old_r;
    };
    long g = ext_gcd(q, -p, x0, y0);  // x0 q + y0 (-p) = g
    if (g < 0) {
        g = -g;
        x0 = -x0;
        y0 = -y0;
    }
    if (g != 1) throw std::invalid_argument("matrix_sending_01_to: gcd(p,q) must be 1");
    IntegerMatrix B{x0, p, y0, q};
    if (B.det() != 1) throw std::runtime_error("matrix_sending_01_to: construction failed");
    return B;
}

IndependenceResult rational_independence(double alpha, double beta, int H, double tol) {
    if (H < 1 || tol <= 0)
        throw std::invalid_argument("rational_independence: need H >= 1 and tol > 0");
    // scan by growing max-norm shells so small relations are found first
    for (int shell = 0; shell <= H; ++shell) {
        for (long n2 = -shell; n2 <= shell; ++n2) {
            for (long n3 = -shell; n3 <= shell; ++n3) {
                if (std::max(std::labs(n2), std::labs(n3)) != shell) continue;
                double v = double(n2) * alpha + double(n3) * beta;
                for (long n1 = -H; n1 <= H; ++n1) {
                    if (n1 == 0 && n2 == 0 && n3 == 0) continue;
                    double r = double(n1) + v;
                    if (std::abs(r) < tol) {
                        IndependenceResult res;
                        res.relation_found = true;
                        res.N1 = n1;
                        res.N2 = n2;
                        res.N3 = n3;
                        res.residual = std::abs(r);
                        // sign-normalize: first nonzero of (N2, N3) positive
                        long lead = res.N2 != 0 ? res.N2 : res.N3;
                        if (lead < 0) {
                            res.N1 = -res.N1;
                            res.N2 = -res.N2;
                            res.N3 = -res.N3;
                        }
                        return res;
                    }
                }
            }
        }
    }
    return {};
}

TorusLift linear_conjugate(const TorusLift& F, const IntegerMatrix& A) {
    if (!A.unimodular())
        throw std::invalid_argument("linear_conjugate: matrix must have determinant +-1");
    IntegerMatrix Ai = A.inverse();
    auto f = F.evaluate, g = F.inverse_evaluate;
    return {[A, Ai, f](Vec2 z) { return Ai.apply(f(A.apply(z))); },
            [A, Ai, g](Vec2 z) { return Ai.apply(g(A.apply(z))); },
            "conj[" + std::to_string(A.a) + "," + std::to_string(A.b) + ";" +
                std::to_string(A.c) + "," + std::to_string(A.d) + "](" + F.label + ")"};
}

std::string conjugation_action_direction() {
    // decide once, numerically, on a translation
    IntegerMatrix A{1, 1, 0, 1};
    Vec2 rho{0.37, 0.61};
    TorusLift f = translation_map(rho.x, rho.y);
    TorusLift fc = linear_conjugate(f, A);
    RotationEstimate est = rotation_vector_estimate(fc, {{0.2, 0.4}}, 16);
    Vec2 direct = A.apply(rho);
    Vec2 inverse = A.inverse().apply(rho);
    double dd = norm(est.vector - direct);
    double di = norm(est.vector - inverse);
    return di < dd ? "inverse" : "direct";
}

}  // namespace torusdyn
