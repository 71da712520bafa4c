#ifndef ZKLAB_PARAMS_HPP
#define ZKLAB_PARAMS_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace zklab {
namespace params {

struct Check {
    std::string name;
    bool pass;
    double margin;  // > 0 means satisfied with room, for strict inequalities
};

struct ValidityReport {
    bool valid = true;
    std::vector<Check> checks;
    std::vector<std::pair<std::string, double>> derived;

    void add(const std::string& name, bool pass, double margin) {
        checks.push_back({name, pass, margin});
        valid = valid && pass;
    }
    const Check* failing() const {
        for (const auto& c : checks)
            if (!c.pass) return &c;
        return nullptr;
    }
};

inline void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be finite");
}

// ---- 2D region --------------------------------------------------------

// Growing box |x -+ t^m| < t^b, |y -+ t^n| < t^{b r}. All comparisons are
// exact (no tolerance): the constraints are open/closed conditions.
struct RegionParams2D {
    double b = 0.3;
    double r = 1.0;
    double q = 1.5;       // in (1,2), with b <= 2/(2+q+r)
    bool centered = true;
    double m = 0.0;       // center offset exponents, non-centered case
    double n = 0.0;
    int sign_m = 1;       // sign of the x-offset +-t^m
    int sign_n = 1;
    bool h1_mode = false;  // gradient decay needs 1 < r
};

inline double b_sup_2d(double r) { return 2.0 / (3.0 + r); }

inline ValidityReport validate_2d(const RegionParams2D& p) {
    require_finite(p.b, "b");
    require_finite(p.r, "r");
    require_finite(p.q, "q");
    require_finite(p.m, "m");
    require_finite(p.n, "n");
    if (p.b < 0 || p.r < 0) throw std::invalid_argument("b, r must be non-negative");

    ValidityReport rep;
    rep.add("r > 1/3", p.r > 1.0 / 3.0, p.r - 1.0 / 3.0);
    rep.add("r < 3", p.r < 3.0, 3.0 - p.r);
    rep.add("b > 0", p.b > 0.0, p.b);
    rep.add("b < 2/(3+r)", p.b < b_sup_2d(p.r), b_sup_2d(p.r) - p.b);
    rep.add("q > 1", p.q > 1.0, p.q - 1.0);
    rep.add("q < 2", p.q < 2.0, 2.0 - p.q);
    rep.add("b <= 2/(2+q+r)", p.b <= 2.0 / (2.0 + p.q + p.r), 2.0 / (2.0 + p.q + p.r) - p.b);
    if (!p.centered) {
        rep.add("m >= 0", p.m >= 0.0, p.m);
        rep.add("m < 1 - b(1+r)/2", p.m < 1.0 - 0.5 * p.b * (1.0 + p.r),
                1.0 - 0.5 * p.b * (1.0 + p.r) - p.m);
        rep.add("n >= 0", p.n >= 0.0, p.n);
        rep.add("n < 1 - b(3-r)/2", p.n < 1.0 - 0.5 * p.b * (3.0 - p.r),
                1.0 - 0.5 * p.b * (3.0 - p.r) - p.n);
    }
    if (p.h1_mode) rep.add("r > 1 (H1 mode)", p.r > 1.0, p.r - 1.0);
    rep.derived.emplace_back("b_sup", b_sup_2d(p.r));
    rep.derived.emplace_back("br", p.b * p.r);
    rep.derived.emplace_back("br_sup", 2.0 * p.r / (3.0 + p.r));
    return rep;
}

// ---- 3D constraint system ---------------------------------------------

struct RegionParams3D {
    double p1, p2, p3, p4;
    double q1 = 1.0;  // log power in the x scale
    double r1() const { return 1.0 - p1; }
    double r2() const { return 1.0 + q1; }
};

// Each constraint coded independently, so the reduced/full comparison is a
// real cross-check and not a tautology. The two transverse conditions
// p3 > p1, p4 > p1 enter only in H1 mode: they are not part of the L2 set
// (the witness tuple (1/3, 1/3+eps, 1/3, 1/3) sits on their boundary).
namespace c3d {
inline bool positive(const RegionParams3D& p) {
    return p.p1 > 0 && p.p2 > 0 && p.p3 > 0 && p.p4 > 0 && p.p1 < 1;
}
inline bool sum_window(const RegionParams3D& p) {
    const double s = 2 * p.p1 + p.p2 + p.p3 + p.p4;
    return s > 0 && s < 2;
}
inline bool x_scales_ordered(const RegionParams3D& p) { return p.p2 > p.p1; }
inline bool y_wins(const RegionParams3D& p) { return p.p3 > p.p1; }
inline bool z_wins(const RegionParams3D& p) { return p.p4 > p.p1; }
inline bool x_vs_transverse(const RegionParams3D& p) { return p.p1 > (p.p3 + p.p4) / 3.0; }
inline bool mixed_x(const RegionParams3D& p) { return 0.5 * p.p1 + p.p2 > 0.5 * (p.p3 + p.p4); }
inline bool second_x(const RegionParams3D& p) { return p.p2 > 0.25 * (p.p1 + p.p3 + p.p4); }
inline bool y_triangle(const RegionParams3D& p) { return p.p3 > (p.p1 + p.p4) / 3.0; }
inline bool z_triangle(const RegionParams3D& p) { return p.p4 > (p.p1 + p.p3) / 3.0; }
inline bool fifth(const RegionParams3D& p) { return p.p2 > 0.2 * (2 * p.p1 + p.p3 + p.p4); }
inline bool skew_y(const RegionParams3D& p) { return p.p2 + 3 * p.p3 > p.p4 + 2 * p.p1; }
inline bool skew_z(const RegionParams3D& p) { return p.p2 + 3 * p.p4 > p.p3 + 2 * p.p1; }
inline bool volume_cap(const RegionParams3D& p) { return 3 * p.p1 + p.p3 + p.p4 < 2; }
}  // namespace c3d

inline bool validate_3d_full(const RegionParams3D& p, bool h1_mode = false) {
    using namespace c3d;
    bool ok = positive(p) && sum_window(p) && x_scales_ordered(p) && x_vs_transverse(p) &&
              mixed_x(p) && second_x(p) && y_triangle(p) && z_triangle(p) && fifth(p) &&
              skew_y(p) && skew_z(p) && volume_cap(p);
    if (h1_mode) ok = ok && y_wins(p) && z_wins(p);
    return ok;
}

inline bool validate_3d_reduced(const RegionParams3D& p, bool h1_mode = false) {
    using namespace c3d;
    bool ok = positive(p) && sum_window(p) && x_scales_ordered(p) && x_vs_transverse(p) &&
              y_triangle(p) && z_triangle(p);
    if (h1_mode) ok = ok && y_wins(p) && z_wins(p);
    return ok;
}

// Interior of the triangle with vertices (1/2,1/2), (2,1), (1,2) in the
// normalized (p3/p1, p4/p1) plane.
inline bool triangle_membership(double pt3, double pt4) {
    if (!(pt3 > 0) || !(pt4 > 0)) return false;
    return 1.0 > (pt3 + pt4) / 3.0 && pt3 > (1.0 + pt4) / 3.0 && pt4 > (1.0 + pt3) / 3.0;
}

// Normalized reformulation of the full system: triangle membership plus
// pt2 > 1 plus 2 + pt2 + a < 2/p1, with a = pt3 + pt4.
inline bool validate_3d_normalized(const RegionParams3D& p) {
    if (!(p.p1 > 0 && p.p2 > 0 && p.p3 > 0 && p.p4 > 0)) return false;
    const double pt2 = p.p2 / p.p1, pt3 = p.p3 / p.p1, pt4 = p.p4 / p.p1;
    return triangle_membership(pt3, pt4) && pt2 > 1.0 &&
           2.0 + pt2 + (pt3 + pt4) < 2.0 / p.p1;
}

struct ReduceCheckResult {
    std::uint64_t samples = 0;
    std::uint64_t boundary_samples = 0;
    std::uint64_t discrepancies = 0;
    std::uint64_t accepted = 0;
    std::optional<RegionParams3D> first_discrepancy;
};

// Monte Carlo equivalence oracle for the full/reduced constraint sets:
// uniform tuples in (0,1)^4 plus tuples pushed within 1e-6 of one of the
// constraint surfaces, to catch strictness bugs. Deterministic per seed.
inline ReduceCheckResult reduce_check(std::uint64_t n_uniform, std::uint64_t n_boundary,
                                      std::uint64_t seed, bool h1_mode = false) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    ReduceCheckResult res;

    auto evaluate = [&](const RegionParams3D& p) {
        const bool f = validate_3d_full(p, h1_mode);
        const bool r = validate_3d_reduced(p, h1_mode);
        if (f) ++res.accepted;
        if (f != r) {
            ++res.discrepancies;
            if (!res.first_discrepancy) res.first_discrepancy = p;
        }
    };

    for (std::uint64_t i = 0; i < n_uniform; ++i) {
        RegionParams3D p{u01(rng), u01(rng), u01(rng), u01(rng)};
        evaluate(p);
        ++res.samples;
    }

    std::uniform_int_distribution<int> which(0, 5);
    std::uniform_real_distribution<double> off(1e-8, 1e-6);
    std::uniform_int_distribution<int> sgn(0, 1);
    for (std::uint64_t i = 0; i < n_boundary; ++i) {
        RegionParams3D p{u01(rng), u01(rng), u01(rng), u01(rng)};
        const double eps = off(rng) * (sgn(rng) ? 1.0 : -1.0);
        switch (which(rng)) {
            case 0: p.p2 = p.p1 + eps; break;                            // p2 > p1
            case 1: p.p1 = (p.p3 + p.p4) / 3.0 + eps; break;             // p1 > (p3+p4)/3
            case 2: p.p3 = (p.p1 + p.p4) / 3.0 + eps; break;             // p3 > (p1+p4)/3
            case 3: p.p4 = (p.p1 + p.p3) / 3.0 + eps; break;             // p4 > (p1+p3)/3
            case 4: p.p2 = 2.0 - 2 * p.p1 - p.p3 - p.p4 + eps; break;    // sum < 2
            case 5: p.p3 = p.p1 + eps; break;                            // p3 > p1 (H1)
        }
        if (p.p1 > 0 && p.p2 > 0 && p.p3 > 0 && p.p4 > 0) {
            evaluate(p);
            ++res.samples;
            ++res.boundary_samples;
        }
    }
    return res;
}

// ---- 3D region geometry -------------------------------------------------

inline double b_sup_3d(double r1, double r2) { return 2.0 / (3.0 + r1 + r2); }

inline ValidityReport validate_3d_region(double b, double r1, double r2) {
    require_finite(b, "b");
    require_finite(r1, "r1");
    require_finite(r2, "r2");
    ValidityReport rep;
    rep.add("b > 0", b > 0.0, b);
    rep.add("r1 > 1", r1 > 1.0, r1 - 1.0);
    rep.add("r2 > 1", r2 > 1.0, r2 - 1.0);
    rep.add("r1 + r2 < 3", r1 + r2 < 3.0, 3.0 - r1 - r2);
    rep.add("r1 + 1 < 3 r2", r1 + 1.0 < 3.0 * r2, 3.0 * r2 - r1 - 1.0);
    rep.add("r2 + 1 < 3 r1", r2 + 1.0 < 3.0 * r1, 3.0 * r1 - r2 - 1.0);
    rep.add("b < 2/(3+r1+r2)", b < b_sup_3d(r1, r2), b_sup_3d(r1, r2) - b);
    rep.derived.emplace_back("b_sup", b_sup_3d(r1, r2));
    rep.derived.emplace_back("volume_exponent", b * (1.0 + r1 + r2));
    return rep;
}

struct VolumeGrowthOptimum {
    double exponent;
    double b, r1, r2;
};

// sup of b (1 + r1 + r2) over the admissible set. With s = r1 + r2 the
// supremum of b is 2/(3+s), so the volume exponent is capped by
// 2(1+s)/(3+s), increasing in s and approaching 4/3 as s -> 3 at
// r1 = r2 = 3/2, b = 1/3.
inline VolumeGrowthOptimum max_volume_growth_exponent_3d() {
    const double s = 3.0;
    return {2.0 * (1.0 + s) / (3.0 + s), 1.0 / 3.0, 1.5, 1.5};
}

// ---- gKdV ----------------------------------------------------------------

struct GkdvParams {
    int p = 2;        // nonlinearity power, 2 or 4
    double b = 0.4;
    double q = 1.1;   // > 1
    double n = 0.0;   // center exponent, 0 <= n <= 1 - b/2
    double m() const { return 1.0 - b; }
    int sign_n = 1;
};

struct GkdvBSup {
    double value;
    std::string binding;
};

inline GkdvBSup gkdv_b_sup(int p, double q) {
    const std::array<std::pair<double, std::string>, 3> cands = {{
        {p / (p + q * (p - 1.0)), "p/(p+q(p-1))"},
        {2.0 / (2.0 + q), "2/(2+q)"},
        {p / (2.0 * p - 1.0), "p/(2p-1)"},
    }};
    GkdvBSup best{cands[0].first, cands[0].second};
    for (const auto& [v, name] : cands)
        if (v < best.value) best = {v, name};
    return best;
}

inline ValidityReport validate_gkdv(const GkdvParams& g) {
    if (g.p != 2 && g.p != 4) throw std::invalid_argument("gKdV power p must be 2 or 4");
    require_finite(g.b, "b");
    require_finite(g.q, "q");
    require_finite(g.n, "n");
    ValidityReport rep;
    const GkdvBSup sup = gkdv_b_sup(g.p, g.q);
    rep.add("q > 1", g.q > 1.0, g.q - 1.0);
    rep.add("b > 0", g.b > 0.0, g.b);
    rep.add("b <= min{p/(p+q(p-1)), 2/(2+q), p/(2p-1)}", g.b <= sup.value, sup.value - g.b);
    rep.add("n >= 0", g.n >= 0.0, g.n);
    rep.add("n <= 1 - b/2", g.n <= 1.0 - 0.5 * g.b, 1.0 - 0.5 * g.b - g.n);
    rep.derived.emplace_back("b_sup", sup.value);
    rep.derived.emplace_back("m", g.m());
    rep.derived.emplace_back(std::string("binding:") + sup.binding, sup.value);
    return rep;
}

// ---- time-dependent scale laws -------------------------------------------

struct ScaleLaws2D {
    double b;
    double r;
    explicit ScaleLaws2D(double b_, double r_) : b(b_), r(r_) {}
    double p() const { return 1.0 - b; }
    double lambda1(double t) const { return std::pow(t, b) / std::log(t); }
    double lambda2(double t) const { return std::pow(lambda1(t), r); }
    double eta(double t) const { return std::pow(t, 1.0 - b) * std::log(t) * std::log(t); }
    double dlambda1(double t) const {
        const double lt = std::log(t);
        return (b * lt - 1.0) / (std::pow(t, 1.0 - b) * lt * lt);
    }
    double deta(double t) const {
        const double lt = std::log(t);
        return std::pow(t, -b) * lt * ((1.0 - b) * lt + 2.0);
    }
};

struct ScaleLaws3D {
    double p1, p2, p3, p4, q1;
    double r1() const { return 1.0 - p1; }
    double r2() const { return 1.0 + q1; }
    double lambda1(double t) const { return std::pow(t, p1) / std::pow(std::log(t), q1); }
    double lambda2(double t) const { return std::pow(t, p2); }
    double lambda3(double t) const { return std::pow(t, p3); }
    double lambda4(double t) const { return std::pow(t, p4); }
    double eta(double t) const { return std::pow(t, r1()) * std::pow(std::log(t), r2()); }
};

struct FarRegionLaw {
    double p_exp;  // >= 1 in the asymptotic statements; free at desk scale
    double eps;
    double theta1(double t) const { return std::pow(t, p_exp) * std::pow(std::log(t), 1.0 + eps); }
    double dtheta1(double t) const {
        const double lt = std::log(t);
        return std::pow(t, p_exp - 1.0) * std::pow(lt, eps) * (p_exp * lt + 1.0 + eps);
    }
};

// q choice used by the decay-rate lemma; it can leave the (1,2) window for
// small b, which is reported rather than resolved.
struct DecayQ {
    double q;
    bool within_window;
};

inline DecayQ q_for_decay_rate(double b, double r) {
    const double q = 2.0 / b - r - 2.0;
    return {q, q > 1.0 && q < 2.0};
}

// ---- regions -------------------------------------------------------------

struct RegionBox {
    int dim = 2;
    std::array<double, 3> center{0, 0, 0};
    std::array<double, 3> half{0, 0, 0};
};

inline void require_time(double t) {
    if (!(t >= 2.0)) throw std::invalid_argument("region is defined for t >= 2");
}

// Geometric evaluation accepts the closure of the admissible set (limiting
// boxes like r = 3, b = 1/3 are well-defined); the strict validators above
// are what gate a run.
inline RegionBox region_omega(double t, const RegionParams2D& p) {
    require_time(t);
    const bool ok = p.r >= 1.0 / 3.0 && p.r <= 3.0 && p.b > 0.0 && p.b <= b_sup_2d(p.r) &&
                    (p.centered || (p.m >= 0.0 && p.m <= 1.0 - 0.5 * p.b * (1.0 + p.r) &&
                                    p.n >= 0.0 && p.n <= 1.0 - 0.5 * p.b * (3.0 - p.r)));
    if (!ok) throw std::invalid_argument("2D region parameters outside the closed admissible set");
    RegionBox box;
    box.dim = 2;
    box.half = {std::pow(t, p.b), std::pow(t, p.b * p.r), 0};
    if (!p.centered) box.center = {p.sign_m * std::pow(t, p.m), p.sign_n * std::pow(t, p.n), 0};
    return box;
}

inline RegionBox region_omega_3d(double t, double b, double r1, double r2) {
    require_time(t);
    const bool ok = r1 >= 1.0 && r2 >= 1.0 && r1 + r2 <= 3.0 && r1 + 1.0 <= 3.0 * r2 &&
                    r2 + 1.0 <= 3.0 * r1 && b > 0.0 && b <= b_sup_3d(r1, r2);
    if (!ok) throw std::invalid_argument("3D region parameters outside the closed admissible set");
    RegionBox box;
    box.dim = 3;
    box.half = {std::pow(t, b), std::pow(t, b * r1), std::pow(t, b * r2)};
    return box;
}

inline RegionBox region_omega_gkdv(double t, const GkdvParams& g) {
    require_time(t);
    const auto rep = validate_gkdv(g);
    if (!rep.valid)
        throw std::invalid_argument("invalid gKdV region parameters: " + rep.failing()->name);
    RegionBox box;
    box.dim = 1;
    box.half = {std::pow(t, g.b), 0, 0};
    box.center = {g.sign_n * std::pow(t, g.n), 0, 0};
    return box;
}

}  // namespace params
}  // namespace zklab

#endif
