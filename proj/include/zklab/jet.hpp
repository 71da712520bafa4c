#ifndef ZKLAB_JET_HPP
#define ZKLAB_JET_HPP

#include <cmath>

namespace zklab {

// Value plus first three derivatives of a scalar function of one variable.
// Arithmetic follows the truncated Taylor rules, so derivatives of composite
// expressions come out exact to round-off.
struct Jet {
    double v = 0, d1 = 0, d2 = 0, d3 = 0;

    static Jet variable(double x) { return {x, 1.0, 0.0, 0.0}; }
    static Jet constant(double c) { return {c, 0.0, 0.0, 0.0}; }
};

inline Jet operator+(const Jet& a, const Jet& b) {
    return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2, a.d3 + b.d3};
}

inline Jet operator-(const Jet& a, const Jet& b) {
    return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2, a.d3 - b.d3};
}

inline Jet operator-(const Jet& a) { return {-a.v, -a.d1, -a.d2, -a.d3}; }

inline Jet operator*(const Jet& a, const Jet& b) {
    return {a.v * b.v,
            a.d1 * b.v + a.v * b.d1,
            a.d2 * b.v + 2 * a.d1 * b.d1 + a.v * b.d2,
            a.d3 * b.v + 3 * a.d2 * b.d1 + 3 * a.d1 * b.d2 + a.v * b.d3};
}

inline Jet operator*(double c, const Jet& a) { return {c * a.v, c * a.d1, c * a.d2, c * a.d3}; }

inline Jet reciprocal(const Jet& g) {
    const double iv = 1.0 / g.v;
    const double iv2 = iv * iv;
    const double iv3 = iv2 * iv;
    const double iv4 = iv2 * iv2;
    return {iv,
            -g.d1 * iv2,
            2 * g.d1 * g.d1 * iv3 - g.d2 * iv2,
            -6 * g.d1 * g.d1 * g.d1 * iv4 + 6 * g.d1 * g.d2 * iv3 - g.d3 * iv2};
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

inline Jet exp(const Jet& f) {
    const double e = std::exp(f.v);
    return {e,
            f.d1 * e,
            (f.d2 + f.d1 * f.d1) * e,
            (f.d3 + 3 * f.d1 * f.d2 + f.d1 * f.d1 * f.d1) * e};
}

}  // namespace zklab

#endif
