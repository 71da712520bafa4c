#ifndef ZKLAB_DIAGNOSTICS_HPP
#define ZKLAB_DIAGNOSTICS_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "zklab/fft.hpp"
#include "zklab/quadrature.hpp"
#include "zklab/grid.hpp"
#include "zklab/params.hpp"
#include "zklab/weights.hpp"

namespace zklab {
namespace diag {

struct OmegaOverflowError : std::runtime_error {
    explicit OmegaOverflowError(const std::string& what) : std::runtime_error(what) {}
};

// Weight factors below 1e-14 are treated as numerically absent; their
// support must stay inside the central half of the periodic box.
inline constexpr double kSupportDecades = 14.0;
inline double support_half_width(double scale) {
    return scale * (std::log(3.0) + kSupportDecades * std::log(10.0));
}

inline void check_support(const Grid& g, int axis, double center, double width,
                          const char* label) {
    if (std::abs(center) + width > 0.5 * g.half_len[axis])
        throw OmegaOverflowError(std::string(label) +
                                 ": weight support leaves the central half-box on axis " +
                                 std::to_string(axis));
}

struct DiagnosticSeries {
    std::string name;
    std::vector<double> t;
    std::vector<double> value;

    void append(double time, double v) {
        if (!t.empty() && !(time > t.back()))
            throw std::invalid_argument("series times must be strictly increasing");
        if (!std::isfinite(v)) throw std::invalid_argument("series values must be finite");
        t.push_back(time);
        value.push_back(v);
    }
    std::size_t size() const { return t.size(); }
};

struct WeightParams2D {
    double sigma = 5.0;
    double delta1 = 5.0;
    double delta2 = 5.0;
};

struct WeightParams3D {
    double sigma = 5.0;
    double delta1 = 5.0;
    double delta2 = 5.0;
    double delta3 = 5.0;
};

using AxisWeight = SeparableQuadrature::AxisWeight;

// ---- virial functionals ------------------------------------------------

// Xi(t) = (1/eta) int u psi_sigma(X/l1) phi_d1(X/l1^q) phi_d2(Y/l2), with
// X = x - cx, Y = y - cy and (cx, cy) the region center (0 when centered).
inline double xi_2d(const Field& u, double t, const params::RegionParams2D& rg,
                    const WeightParams2D& w, SeparableQuadrature& quad) {
    if (!(t >= 2.0)) throw std::invalid_argument("xi_2d needs t >= 2");
    const params::ScaleLaws2D law(rg.b, rg.r);
    const double l1 = law.lambda1(t), l2 = law.lambda2(t), eta = law.eta(t);
    const double l1q = std::pow(l1, rg.q);
    const Grid& g = u.grid();
    const double cx = rg.centered ? 0.0 : rg.sign_m * std::pow(t, rg.m);
    const double cy = rg.centered ? 0.0 : rg.sign_n * std::pow(t, rg.n);
    check_support(g, 0, cx, support_half_width(w.delta1 * l1q), "xi_2d");
    check_support(g, 1, cy, support_half_width(w.delta2 * l2), "xi_2d");
    const double s = quad.integrate(
        u,
        {[=](double x) {
            return weights::psi_sigma(w.sigma, (x - cx) / l1) *
                   weights::phi_delta(w.delta1, (x - cx) / l1q);
        }},
        {[=](double y) { return weights::phi_delta(w.delta2, (y - cy) / l2); }});
    return s / eta;
}

// Cauchy-Schwarz envelope for |Xi(t)| with the measured weight norms.
inline double xi_bound_2d(double t, double u0_l2, const params::RegionParams2D& rg,
                          const WeightParams2D& w) {
    const params::ScaleLaws2D law(rg.b, rg.r);
    const double l1q = std::pow(law.lambda1(t), rg.q);
    const double l2 = law.lambda2(t);
    const double psi_inf = w.sigma * weights::psi_sup();
    const double phi2 = weights::phi_l2();
    return u0_l2 * psi_inf * std::sqrt(w.delta1 * l1q) * phi2 * std::sqrt(w.delta2 * l2) * phi2 /
           law.eta(t);
}

inline double xi_3d(const Field& u, double t, const params::ScaleLaws3D& law,
                    const WeightParams3D& w, SeparableQuadrature& quad) {
    if (!(t >= 2.0)) throw std::invalid_argument("xi_3d needs t >= 2");
    const double l1 = law.lambda1(t), l2 = law.lambda2(t), l3 = law.lambda3(t),
                 l4 = law.lambda4(t);
    const Grid& g = u.grid();
    check_support(g, 0, 0.0, support_half_width(w.delta1 * l2), "xi_3d");
    check_support(g, 1, 0.0, support_half_width(w.delta2 * l3), "xi_3d");
    check_support(g, 2, 0.0, support_half_width(w.delta3 * l4), "xi_3d");
    const double s = quad.integrate(
        u,
        {[=](double x) {
            return weights::psi_sigma(w.sigma, x / l1) * weights::phi_delta(w.delta1, x / l2);
        }},
        {[=](double y) { return weights::phi_delta(w.delta2, y / l3); }},
        {[=](double z) { return weights::phi_delta(w.delta3, z / l4); }});
    return s / law.eta(t);
}

inline double xi_bound_3d(double t, double u0_l2, const params::ScaleLaws3D& law,
                          const WeightParams3D& w) {
    const double phi2 = weights::phi_l2();
    const double prod = w.delta1 * law.lambda2(t) * w.delta2 * law.lambda3(t) * w.delta3 *
                        law.lambda4(t);
    return u0_l2 * w.sigma * weights::psi_sup() * std::sqrt(prod) * phi2 * phi2 * phi2 /
           law.eta(t);
}

// H1-mode functional: (1/eta) int u^2 psi_sigma'(x/l1) ... with the scale
// compatibility 1/sigma + 1/delta1 <= 1/sigma'.
inline double q_functional_2d(const Field& u, double t, const params::RegionParams2D& rg,
                              double sigma_prime, const WeightParams2D& w,
                              SeparableQuadrature& quad) {
    if (!(t >= 2.0)) throw std::invalid_argument("q_functional needs t >= 2");
    if (!(rg.r > 1.0)) throw std::invalid_argument("q_functional needs r > 1");
    if (1.0 / w.sigma + 1.0 / w.delta1 > 1.0 / sigma_prime)
        throw std::invalid_argument("sigma' must satisfy 1/sigma + 1/delta1 <= 1/sigma'");
    const params::ScaleLaws2D law(rg.b, rg.r);
    const double l1 = law.lambda1(t), l2 = law.lambda2(t);
    check_support(u.grid(), 1, 0.0, support_half_width(w.delta2 * l2), "q_functional");
    const double s = quad.integrate_square(
        u, {[=](double x) { return weights::psi_sigma(sigma_prime, x / l1); }},
        {[=](double y) { return weights::phi_delta(w.delta2, y / l2); }});
    return s / law.eta(t);
}

inline double q_functional_3d(const Field& u, double t, const params::ScaleLaws3D& law,
                              double sigma_prime, const WeightParams3D& w,
                              SeparableQuadrature& quad) {
    if (!(t >= 2.0)) throw std::invalid_argument("q_functional needs t >= 2");
    if (1.0 / w.sigma + 1.0 / w.delta1 > 1.0 / sigma_prime)
        throw std::invalid_argument("sigma' must satisfy 1/sigma + 1/delta1 <= 1/sigma'");
    const double l1 = law.lambda1(t), l3 = law.lambda3(t), l4 = law.lambda4(t);
    check_support(u.grid(), 1, 0.0, support_half_width(w.delta2 * l3), "q_functional");
    check_support(u.grid(), 2, 0.0, support_half_width(w.delta3 * l4), "q_functional");
    const double s = quad.integrate_square(
        u, {[=](double x) { return weights::psi_sigma(sigma_prime, x / l1); }},
        {[=](double y) { return weights::phi_delta(w.delta2, y / l3); }},
        {[=](double z) { return weights::phi_delta(w.delta3, z / l4); }});
    return s / law.eta(t);
}

// ---- sharp-window masses -------------------------------------------------

// A cell belongs to the box when its center does.
inline double local_mass(const Field& u, const params::RegionBox& box) {
    const Grid& g = u.grid();
    if (box.dim != g.dim) throw std::invalid_argument("box dimension mismatch");
    const auto& v = u.values();
    double s = 0;
    for (int i = 0; i < g.n[0]; ++i) {
        if (std::abs(g.coord(0, i) - box.center[0]) > box.half[0]) continue;
        for (int j = 0; j < g.n[1]; ++j) {
            if (g.dim >= 2 && std::abs(g.coord(1, j) - box.center[1]) > box.half[1]) continue;
            for (int k = 0; k < g.n[2]; ++k) {
                if (g.dim >= 3 && std::abs(g.coord(2, k) - box.center[2]) > box.half[2]) continue;
                const double val = v[g.index(i, j, k)];
                s += val * val;
            }
        }
    }
    return s * g.cell_volume();
}

inline double local_h1(const Field& u, const params::RegionBox& box, SpectralWorkspace& ws) {
    double s = local_mass(u, box);
    for (int a = 0; a < u.grid().dim; ++a) s += local_mass(derivative(u, a, ws), box);
    return s;
}

// Monitored integrand of the virial derivative:
// (1/(l1 eta)) int u^2 psi_sigma'(X/l1) phi_d1(X/l1^q) phi_d2(Y/l2).
inline double weighted_local_mass_2d(const Field& u, double t, const params::RegionParams2D& rg,
                                     const WeightParams2D& w, SeparableQuadrature& quad) {
    if (!(t >= 2.0)) throw std::invalid_argument("weighted_local_mass needs t >= 2");
    const params::ScaleLaws2D law(rg.b, rg.r);
    const double l1 = law.lambda1(t), l2 = law.lambda2(t), eta = law.eta(t);
    const double l1q = std::pow(l1, rg.q);
    const Grid& g = u.grid();
    const double cx = rg.centered ? 0.0 : rg.sign_m * std::pow(t, rg.m);
    const double cy = rg.centered ? 0.0 : rg.sign_n * std::pow(t, rg.n);
    check_support(g, 0, cx, support_half_width(std::min(w.sigma * l1, w.delta1 * l1q)),
                  "weighted_local_mass");
    check_support(g, 1, cy, support_half_width(w.delta2 * l2), "weighted_local_mass");
    const double s = quad.integrate_square(
        u,
        {[=](double x) {
            return weights::psi_sigma_d(w.sigma, (x - cx) / l1, 1) *
                   weights::phi_delta(w.delta1, (x - cx) / l1q);
        }},
        {[=](double y) { return weights::phi_delta(w.delta2, (y - cy) / l2); }});
    return s / (l1 * eta);
}

inline double weighted_local_mass_3d(const Field& u, double t, const params::ScaleLaws3D& law,
                                     const WeightParams3D& w, SeparableQuadrature& quad) {
    if (!(t >= 2.0)) throw std::invalid_argument("weighted_local_mass needs t >= 2");
    const double l1 = law.lambda1(t), l2 = law.lambda2(t), l3 = law.lambda3(t),
                 l4 = law.lambda4(t);
    const Grid& g = u.grid();
    check_support(g, 0, 0.0, support_half_width(std::min(w.sigma * l1, w.delta1 * l2)),
                  "weighted_local_mass");
    check_support(g, 1, 0.0, support_half_width(w.delta2 * l3), "weighted_local_mass");
    check_support(g, 2, 0.0, support_half_width(w.delta3 * l4), "weighted_local_mass");
    const double s = quad.integrate_square(
        u,
        {[=](double x) {
            return weights::psi_sigma_d(w.sigma, x / l1, 1) *
                   weights::phi_delta(w.delta1, x / l2);
        }},
        {[=](double y) { return weights::phi_delta(w.delta2, y / l3); }},
        {[=](double z) { return weights::phi_delta(w.delta3, z / l4); }});
    return s / (l1 * law.eta(t));
}

// Smallest value of the 2D virial weight product over the box Omega(t); used
// by the domination check weighted * l1 eta >= min_weight * local_mass.
inline double min_weight_on_region_2d(double t, const params::RegionParams2D& rg,
                                      const WeightParams2D& w, const params::RegionBox& box) {
    const params::ScaleLaws2D law(rg.b, rg.r);
    const double l1 = law.lambda1(t), l2 = law.lambda2(t);
    const double l1q = std::pow(l1, rg.q);
    // every factor is even and non-increasing in |.|, so the corner is the min
    const double x = box.half[0], y = box.half[1];
    return weights::psi_sigma_d(w.sigma, x / l1, 1) * weights::phi_delta(w.delta1, x / l1q) *
           weights::phi_delta(w.delta2, y / l2);
}

// ---- far region ------------------------------------------------------------

inline double far_region_mass(const Field& u, double t, const params::FarRegionLaw& law,
                              int axis, int sign) {
    if (!(t >= 2.0)) throw std::invalid_argument("far_region_mass needs t >= 2");
    const Grid& g = u.grid();
    if (axis < 0 || axis >= g.dim) throw std::invalid_argument("axis outside grid dimension");
    const double theta = law.theta1(t);
    if (2.0 * theta > g.half_len[axis])
        throw OmegaOverflowError("far region [theta, 2 theta] leaves the box");
    const auto& v = u.values();
    double s = 0;
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                const int idx3[3] = {i, j, k};
                const double xa = sign * g.coord(axis, idx3[axis]);
                if (xa < theta || xa > 2.0 * theta) continue;
                const double val = v[g.index(i, j, k)];
                s += val * val;
            }
    return s * g.cell_volume();
}

// ---- far-region flux identity ----------------------------------------------

// Terms of d/dt (1/2) int u^2 chi((x_j + theta)/theta). For the propagation
// axis (j = 0) the identity carries six terms in 2D and seven in 3D; for
// transverse axes only the mixed-derivative term enters.
struct IdentityTerms {
    double I = 0;         // (1/2) int u^2 chi
    double A[7] = {0};    // filled terms, in the order of the identity
    int n_terms = 0;
    double sum() const {
        double s = 0;
        for (int i = 0; i < n_terms; ++i) s += A[i];
        return s;
    }
};

inline IdentityTerms identity_terms(const Field& u, double t, const params::FarRegionLaw& law,
                                    int axis, SeparableQuadrature& quad) {
    const Grid& g = u.grid();
    if (g.dim < 2) throw std::invalid_argument("flux identity is for the 2D/3D flow");
    if (axis < 0 || axis >= g.dim) throw std::invalid_argument("axis outside grid dimension");
    const double theta = law.theta1(t), dtheta = law.dtheta1(t);
    if (2.0 * theta > g.half_len[axis])
        throw OmegaOverflowError("identity window leaves the box");

    const AxisWeight c0{[=](double x) { return weights::chi((x + theta) / theta); }};
    const AxisWeight c1{[=](double x) { return weights::chi_prime((x + theta) / theta); }};
    const AxisWeight c1xi{[=](double x) {
        const double z = (x + theta) / theta;
        return weights::chi_prime(z) * z;
    }};
    const AxisWeight c3{[=](double x) { return weights::chi_d3((x + theta) / theta); }};
    auto sq = [&](const Field& f, const AxisWeight& wa) {
        AxisWeight slot[3];
        slot[axis] = wa;
        return quad.integrate_square(f, slot[0], slot[1], slot[2]);
    };
    auto prod = [&](const Field& fa, const Field& fb, const AxisWeight& wa) {
        AxisWeight slot[3];
        slot[axis] = wa;
        return quad.integrate_product(fa, fb, slot[0], slot[1], slot[2]);
    };

    SpectralWorkspace& ws = quad.workspace();
    IdentityTerms out;
    out.I = 0.5 * sq(u, c0);
    const double rate = dtheta / theta;
    out.A[0] = -0.5 * rate * sq(u, c1);
    out.A[1] = 0.5 * rate * sq(u, c1xi);
    if (axis == 0) {
        Field ux = derivative(u, 0, ws);
        Field uy = derivative(u, 1, ws);
        out.A[2] = 1.5 / theta * sq(ux, c1);
        out.A[3] = 0.5 / theta * sq(uy, c1);
        int idx = 4;
        if (g.dim == 3) {
            Field uz = derivative(u, 2, ws);
            out.A[idx++] = 0.5 / theta * sq(uz, c1);
        }
        out.A[idx++] = -0.5 / (theta * theta * theta) * sq(u, c3);
        {
            AxisWeight slot[3];
            slot[axis] = c1;
            out.A[idx++] = -1.0 / (3.0 * theta) * quad.integrate_cube(u, slot[0], slot[1], slot[2]);
        }
        out.n_terms = idx;
    } else {
        Field ux = derivative(u, 0, ws);
        Field uj = derivative(u, axis, ws);
        out.A[2] = 1.0 / theta * prod(ux, uj, c1);
        out.n_terms = 3;
    }
    return out;
}

struct IdentityResidual {
    double residual = 0;  // |dI/dt + sum A|
    double scale = 0;     // largest participating term
    IdentityTerms first, second;
};

// Central two-snapshot check of the flux identity: the time derivative by
// finite difference plus the trapezoid average of the space terms vanishes
// up to discretization error.
inline IdentityResidual identity_residual(const Field& ua, double ta, const Field& ub, double tb,
                                          const params::FarRegionLaw& law, int axis,
                                          SeparableQuadrature& quad) {
    if (!(tb > ta)) throw std::invalid_argument("snapshots must be time-ordered");
    IdentityResidual r;
    r.first = identity_terms(ua, ta, law, axis, quad);
    r.second = identity_terms(ub, tb, law, axis, quad);
    const double didt = (r.second.I - r.first.I) / (tb - ta);
    const double terms = 0.5 * (r.first.sum() + r.second.sum());
    r.residual = std::abs(didt + terms);
    r.scale = std::abs(didt);
    for (int i = 0; i < r.first.n_terms; ++i)
        r.scale = std::max(r.scale, 0.5 * std::abs(r.first.A[i] + r.second.A[i]));
    return r;
}

// ---- decay accumulator -------------------------------------------------------

struct Accumulator {
    std::vector<double> t;
    std::vector<double> partial;  // trapezoid partial sums of value/(s ln s)
    double first_quartile_increment = 0;
    double last_quartile_increment = 0;
    double total() const { return partial.empty() ? 0.0 : partial.back(); }
};

inline Accumulator decay_accumulator(const std::vector<double>& t,
                                     const std::vector<double>& value) {
    if (t.size() != value.size()) throw std::invalid_argument("mismatched series");
    if (t.size() < 2) throw std::invalid_argument("need at least two samples");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] >= 10.0)) throw std::invalid_argument("accumulator t-grid starts at 10");
        if (i > 0 && !(t[i] > t[i - 1]))
            throw std::invalid_argument("t-grid must be strictly increasing");
    }
    Accumulator acc;
    acc.t = t;
    acc.partial.resize(t.size());
    auto f = [&](std::size_t i) { return value[i] / (t[i] * std::log(t[i])); };
    acc.partial[0] = 0;
    for (std::size_t i = 1; i < t.size(); ++i)
        acc.partial[i] = acc.partial[i - 1] + 0.5 * (f(i) + f(i - 1)) * (t[i] - t[i - 1]);
    const double t_lo = t.front() + 0.25 * (t.back() - t.front());
    const double t_hi = t.back() - 0.25 * (t.back() - t.front());
    double p_lo = 0, p_hi = acc.partial.back();
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] <= t_lo) p_lo = acc.partial[i];
        if (t[i] <= t_hi) p_hi = acc.partial[i];
    }
    acc.first_quartile_increment = p_lo - acc.partial.front();
    acc.last_quartile_increment = acc.partial.back() - p_hi;
    return acc;
}

// Majorant shape int_a^t ds / (s ln^{1/b} s), plus the boundary term
// 1/ln^{1/b}(a); multiplied by the fitted constant by the caller.
inline double decay_majorant(double a, double t, double b) {
    const double e = 1.0 / b;
    // antiderivative of 1/(s ln^e s) is ln^{1-e}(s)/(1-e)
    const double tail = (std::pow(std::log(t), 1.0 - e) - std::pow(std::log(a), 1.0 - e)) /
                        (1.0 - e);
    return std::pow(std::log(a), -e) + tail;
}

// ---- explicit time sequence ----------------------------------------------------

struct TimeSequence {
    double t0, eps, c0, b;
    std::vector<double> times;  // t1..tN (or fewer when truncated)
    bool truncated = false;
};

// t_{n+1} = t_n ^ exp(2 c0 / (eps ln^{1/b - 1} t_n))
inline TimeSequence times_sequence(double t0, double eps, double c0, double b, int n) {
    if (!(t0 >= 10.0)) throw std::invalid_argument("t0 must be >= 10");
    if (!(eps > 0) || !(c0 > 0)) throw std::invalid_argument("eps and c0 must be positive");
    if (!(b > 0) || !(b < 0.4)) throw std::invalid_argument("b must lie in (0, 2/5)");
    if (n < 1) throw std::invalid_argument("need n >= 1");
    TimeSequence seq{t0, eps, c0, b, {}, false};
    double lnt = std::log(t0);
    for (int i = 0; i < n; ++i) {
        const double expo = std::exp(2.0 * c0 / (eps * std::pow(lnt, 1.0 / b - 1.0)));
        lnt *= expo;
        if (lnt > 700.0) {  // exp would overflow double
            seq.truncated = true;
            break;
        }
        seq.times.push_back(std::exp(lnt));
    }
    return seq;
}

// Flags the sequence entries where F(t_n) <= c0 / ln^{1/b - 1}(t_n).
inline std::vector<bool> rate_certificate(const std::vector<double>& F,
                                          const std::vector<double>& times, double b, double c0) {
    if (F.size() != times.size()) throw std::invalid_argument("mismatched series");
    std::vector<bool> ok(F.size());
    for (std::size_t i = 0; i < F.size(); ++i)
        ok[i] = F[i] <= c0 / std::pow(std::log(times[i]), 1.0 / b - 1.0);
    return ok;
}

}  // namespace diag
}  // namespace zklab

#endif
