#ifndef ZKLAB_WEIGHTS_HPP
#define ZKLAB_WEIGHTS_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "zklab/jet.hpp"

namespace zklab {
namespace weights {

// Smooth step s: 0 for t <= 0, 1 for t >= 1, built from the C-infinity bump
// g(t) = exp(-1/t) as s = g(t) / (g(t) + g(1-t)).
inline Jet bump(const Jet& t) {
    return exp(-reciprocal(t));
}

inline Jet smooth_step(const Jet& t) {
    // Below ~1e-6 the true value is under exp(-1e6); return the exact limit
    // to avoid overflowing the 1/t powers in the jet.
    if (t.v <= 1e-6) return Jet::constant(0.0);
    if (t.v >= 1.0 - 1e-6) return Jet::constant(1.0);
    const Jet a = bump(t);
    const Jet b = bump(Jet::constant(1.0) - t);
    Jet s = a / (a + b);
    // s in [0,1] and s' >= 0 hold exactly in real arithmetic; the quotient
    // rule can leak one ulp across, which would break the sign invariants.
    s.v = std::min(std::max(s.v, 0.0), 1.0);
    s.d1 = std::max(s.d1, 0.0);
    return s;
}

// The blend of phi from 1 to exp(-x) is finished by x = kPhiCut. The step is
// compressed by kPhiRate so that phi stays under 3 exp(-x) throughout (the
// slowest admissible compression, keeping the transition as quadrature
// friendly as possible); the realized margin is checked by verify_profile.
inline constexpr double kPhiRate = 2.0;
inline constexpr double kPhiCut = 1.0 + 1.0 / kPhiRate;

// phi evaluated at x >= 0 together with derivatives d/dx^1..3.
inline Jet phi_jet_positive(double x) {
    if (x <= 1.0) return Jet::constant(1.0);
    if (x >= kPhiCut) {
        const double e = std::exp(-x);
        return {e, -e, e, -e};
    }
    const Jet xj = Jet::variable(x);
    const Jet tau = kPhiRate * (xj - Jet::constant(1.0));
    const Jet step = smooth_step(tau);
    return exp(-(xj * step));
}

inline Jet phi_jet(double x) {
    if (x >= 0.0) return phi_jet_positive(x);
    Jet p = phi_jet_positive(-x);
    return {p.v, -p.d1, p.d2, -p.d3};  // even reflection
}

inline double phi(double x) { return phi_jet(x).v; }
inline double phi_d1(double x) { return phi_jet(x).d1; }
inline double phi_d2(double x) { return phi_jet(x).d2; }
inline double phi_d3(double x) { return phi_jet(x).d3; }

// 64-point Gauss-Legendre rule on [-1,1], nodes by Newton on P_n.
struct GaussLegendre {
    std::array<double, 64> node{}, weight{};
    GaussLegendre() {
        const int n = 64;
        for (int i = 0; i < n / 2; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double pp = 0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
                }
                pp = n * (x * p0 - p1) / (x * x - 1.0);
                const double dx = p0 / pp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            node[i] = -x;
            node[n - 1 - i] = x;
            weight[i] = weight[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
        }
    }
};

inline const GaussLegendre& gauss_legendre() {
    static const GaussLegendre g;
    return g;
}

template <class F>
double integrate(F&& f, double a, double b) {
    const auto& g = gauss_legendre();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0;
    for (std::size_t i = 0; i < g.node.size(); ++i) s += g.weight[i] * f(mid + half * g.node[i]);
    return s * half;
}

// Cached pieces of psi(x) = int_0^x phi.
struct PhiIntegrals {
    double blend;       // int_1^cut phi
    double psi_sup;     // psi(+inf) = 1 + blend + exp(-cut)
    double l2_sq;       // int_R phi^2
    double l1;          // int_R phi
    PhiIntegrals() {
        blend = integrate([](double s) { return phi(s); }, 1.0, kPhiCut);
        psi_sup = 1.0 + blend + std::exp(-kPhiCut);
        const double blend2 = integrate([](double s) { double p = phi(s); return p * p; }, 1.0, kPhiCut);
        l2_sq = 2.0 * (1.0 + blend2 + 0.5 * std::exp(-2.0 * kPhiCut));
        l1 = 2.0 * psi_sup;
    }
};

inline const PhiIntegrals& phi_integrals() {
    static const PhiIntegrals v;
    return v;
}

inline double psi(double x) {
    const double ax = std::abs(x);
    double r;
    if (ax <= 1.0) {
        r = ax;
    } else if (ax < kPhiCut) {
        r = 1.0 + integrate([](double s) { return phi(s); }, 1.0, ax);
    } else {
        r = 1.0 + phi_integrals().blend + std::exp(-kPhiCut) - std::exp(-ax);
    }
    return x < 0 ? -r : r;
}

// sup_R |psi| (about 1.45; the paper only needs <= 3)
inline double psi_sup() { return phi_integrals().psi_sup; }
inline double phi_l2() { return std::sqrt(phi_integrals().l2_sq); }
inline double phi_l1() { return phi_integrals().l1; }

// Scaled families: psi_sigma(x) = sigma psi(x/sigma), phi_delta(x) = phi(x/delta).
inline void check_positive_scale(double s, const char* name) {
    if (!(s > 0.0) || !std::isfinite(s))
        throw std::invalid_argument(std::string(name) + " must be positive and finite");
}

inline double psi_sigma(double sigma, double x) {
    check_positive_scale(sigma, "sigma");
    return sigma * psi(x / sigma);
}

inline double psi_sigma_d(double sigma, double x, int order) {
    check_positive_scale(sigma, "sigma");
    switch (order) {
        case 0: return psi_sigma(sigma, x);
        case 1: return phi(x / sigma);
        case 2: return phi_d1(x / sigma) / sigma;
        case 3: return phi_d2(x / sigma) / (sigma * sigma);
        default: throw std::invalid_argument("derivative order must be 0..3");
    }
}

inline double phi_delta(double delta, double x) {
    check_positive_scale(delta, "delta");
    return phi(x / delta);
}

inline double phi_delta_d(double delta, double x, int order) {
    check_positive_scale(delta, "delta");
    const double z = x / delta;
    switch (order) {
        case 0: return phi(z);
        case 1: return phi_d1(z) / delta;
        case 2: return phi_d2(z) / (delta * delta);
        case 3: return phi_d3(z) / (delta * delta * delta);
        default: throw std::invalid_argument("derivative order must be 0..3");
    }
}

// Compactly supported cutoff: chi = 1 on (-inf,-1], 0 on [0,inf), built from
// the same smooth step.
inline Jet chi_jet(double x) {
    Jet s = smooth_step(Jet::variable(-x));
    return {s.v, -s.d1, s.d2, -s.d3};
}

inline double chi(double x) { return chi_jet(x).v; }
inline double chi_prime(double x) { return chi_jet(x).d1; }
inline double chi_d2(double x) { return chi_jet(x).d2; }
inline double chi_d3(double x) { return chi_jet(x).d3; }

// Measured constants. The bound |phi'| <= c phi, |phi''| <= c phi holds with a
// finite c fixed by scanning the blend region; c0 is the floor of -chi' on
// [-3/4,-1/4].
inline double measured_phi_c() {
    static const double c = [] {
        double worst = 1.0;  // tail gives exactly 1
        const int n = 200000;
        for (int i = 0; i <= n; ++i) {
            const double x = 1.0 + (kPhiCut - 1.0) * i / n;
            const Jet p = phi_jet_positive(x);
            worst = std::max(worst, std::abs(p.d1) / p.v);
            worst = std::max(worst, std::abs(p.d2) / p.v);
        }
        return worst;
    }();
    return c;
}

inline double measured_chi_c0() {
    static const double c0 = [] {
        double floor = std::numeric_limits<double>::infinity();
        const int n = 200000;
        for (int i = 0; i <= n; ++i) {
            const double x = -0.75 + 0.5 * i / n;
            floor = std::min(floor, -chi_prime(x));
        }
        return floor;
    }();
    return c0;
}

// ---- verification -----------------------------------------------------

struct InvariantCheck {
    std::string invariant;
    double max_violation = 0;
    double measured_constant = 0;
};

struct VerifyReport {
    std::vector<InvariantCheck> checks;
    double worst_violation() const {
        double w = 0;
        for (const auto& c : checks) w = std::max(w, c.max_violation);
        return w;
    }
    bool clean(double tol = 1e-13) const { return worst_violation() <= tol; }
};

// Round-off slack for identities that hold exactly in real arithmetic.
inline constexpr double kRoundoff = 1e-14;

inline VerifyReport verify_profile(double sigma = 1.0, double xmin = -50.0, double xmax = 50.0,
                                   int npoints = 10000) {
    if (npoints < 1000) throw std::invalid_argument("verification grid needs >= 1000 points");
    VerifyReport rep;
    const double h = (xmax - xmin) / (npoints - 1);
    auto grid = [&](int i) { return xmin + i * h; };

    InvariantCheck lower{"phi lower bound exp(-|x|) <= phi", 0, 0};
    InvariantCheck upper{"phi upper bound phi <= 3 exp(-|x|)", 0, 0};
    InvariantCheck mono{"phi non-increasing on [0,inf)", 0, 0};
    InvariantCheck even{"phi even", 0, 0};
    InvariantCheck deriv{"phi derivative bounds |phi'|,|phi''| <= c phi", 0, measured_phi_c()};
    double prev_phi = 0;
    for (int i = 0; i < npoints; ++i) {
        const double x = grid(i);
        const double p = phi(x);
        const double e = std::exp(-std::abs(x));
        lower.max_violation = std::max(lower.max_violation, e - p);
        upper.max_violation = std::max(upper.max_violation, p - 3.0 * e);
        even.max_violation = std::max(even.max_violation, std::abs(p - phi(-x)));
        if (x >= 0.0) {
            if (i > 0 && grid(i - 1) >= 0.0)
                mono.max_violation = std::max(mono.max_violation, p - prev_phi);
            const Jet j = phi_jet(x);
            deriv.max_violation =
                std::max(deriv.max_violation,
                         std::max(std::abs(j.d1), std::abs(j.d2)) - deriv.measured_constant * p);
        }
        prev_phi = p;
    }
    rep.checks.push_back(lower);
    rep.checks.push_back(upper);
    rep.checks.push_back(mono);
    rep.checks.push_back(even);
    rep.checks.push_back(deriv);

    InvariantCheck lin{"psi_sigma(x) = x on [-sigma, sigma]", 0, 0};
    InvariantCheck bound{"|psi_sigma| <= 3 sigma", 0, sigma * psi_sup()};
    InvariantCheck odd{"psi odd", 0, 0};
    InvariantCheck fd{"psi_sigma' = phi_sigma (order-2 finite differences)", 0, 0};
    for (int i = 0; i < npoints; ++i) {
        const double x = grid(i);
        const double ps = psi_sigma(sigma, x);
        if (std::abs(x) <= sigma)
            lin.max_violation =
                std::max(lin.max_violation, std::abs(ps - x) - kRoundoff * std::max(1.0, std::abs(x)));
        bound.max_violation = std::max(bound.max_violation, std::abs(ps) - 3.0 * sigma);
        odd.max_violation = std::max(odd.max_violation, std::abs(ps + psi_sigma(sigma, -x)));
    }
    // Finite-difference consistency probed where psi has curvature.
    {
        const double hfd = 1e-3;
        double worst_order = 3.0;
        for (double x : {1.1 * sigma, 1.15 * sigma, 1.2 * sigma}) {
            auto fd_err = [&](double step) {
                const double d =
                    (psi_sigma(sigma, x + step) - psi_sigma(sigma, x - step)) / (2 * step);
                return std::abs(d - phi_delta(sigma, x));
            };
            const double e1 = fd_err(hfd), e2 = fd_err(hfd / 2);
            if (e1 > 1e-11 && e2 > 1e-12)
                worst_order = std::min(worst_order, std::log2(e1 / e2));
            fd.max_violation = std::max(fd.max_violation, e1 - 1e3 * hfd * hfd);
        }
        fd.measured_constant = worst_order;  // observed convergence order
        if (worst_order < 1.9) fd.max_violation = std::max(fd.max_violation, 1.9 - worst_order);
    }
    rep.checks.push_back(lin);
    rep.checks.push_back(bound);
    rep.checks.push_back(odd);
    rep.checks.push_back(fd);

    InvariantCheck crange{"chi in [0,1]", 0, 0};
    InvariantCheck csupp{"chi = 1 on x<=-1, chi = 0 on x>=0", 0, 0};
    InvariantCheck cmono{"chi' <= 0", 0, 0};
    InvariantCheck cfloor{"-chi' >= c0 on [-3/4,-1/4]", 0, measured_chi_c0()};
    for (int i = 0; i < npoints; ++i) {
        const double x = grid(i);
        const double c = chi(x);
        crange.max_violation = std::max({crange.max_violation, -c, c - 1.0});
        if (x <= -1.0) csupp.max_violation = std::max(csupp.max_violation, std::abs(c - 1.0));
        if (x >= 0.0) csupp.max_violation = std::max(csupp.max_violation, std::abs(c));
        cmono.max_violation = std::max(cmono.max_violation, chi_prime(x));
        if (x >= -0.75 && x <= -0.25)
            cfloor.max_violation = std::max(cfloor.max_violation, cfloor.measured_constant - (-chi_prime(x)));
    }
    if (!(cfloor.measured_constant > 0)) cfloor.max_violation = 1.0;
    rep.checks.push_back(crange);
    rep.checks.push_back(csupp);
    rep.checks.push_back(cmono);
    rep.checks.push_back(cfloor);
    return rep;
}

}  // namespace weights
}  // namespace zklab

#endif
