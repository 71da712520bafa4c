#ifndef ZKLAB_GRID_HPP
#define ZKLAB_GRID_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace zklab {

// Uniform periodic box [-L_i, L_i) per axis, row-major storage, x the
// slowest axis. The last axis is the one halved by the real transforms.
struct Grid {
    int dim = 1;
    std::array<int, 3> n{1, 1, 1};
    std::array<double, 3> half_len{0, 0, 0};

    static bool power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

    static Grid make(int dim, std::array<int, 3> n, std::array<double, 3> half_len) {
        Grid g;
        g.dim = dim;
        if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
        for (int a = 0; a < 3; ++a) {
            if (a < dim) {
                if (!power_of_two(n[a]) || n[a] < 32)
                    throw std::invalid_argument("resolution must be a power of two >= 32");
                if (!(half_len[a] > 0)) throw std::invalid_argument("box half-length must be positive");
                g.n[a] = n[a];
                g.half_len[a] = half_len[a];
            } else {
                g.n[a] = 1;
                g.half_len[a] = 0;
            }
        }
        return g;
    }

    std::size_t total() const {
        return std::size_t(n[0]) * std::size_t(n[1]) * std::size_t(n[2]);
    }
    double length(int a) const { return 2.0 * half_len[a]; }
    double dx(int a) const { return length(a) / n[a]; }
    double cell_volume() const {
        double v = 1;
        for (int a = 0; a < dim; ++a) v *= dx(a);
        return v;
    }
    double coord(int a, int i) const { return -half_len[a] + i * dx(a); }

    // signed lattice index -> physical wavenumber 2 pi s / length
    double wavenumber(int a, int s) const { return M_PI * s / half_len[a]; }

    int last_axis() const { return dim - 1; }
    int spec_n(int a) const { return a == last_axis() ? n[a] / 2 + 1 : n[a]; }
    std::size_t spec_total() const {
        std::size_t v = 1;
        for (int a = 0; a < dim; ++a) v *= spec_n(a);
        return v;
    }
    int signed_index(int a, int i) const {
        if (a == last_axis()) return i;  // half spectrum, never negative
        return i <= n[a] / 2 ? i : i - n[a];
    }

    std::size_t index(int ix, int iy = 0, int iz = 0) const {
        return (std::size_t(ix) * n[1] + iy) * n[2] + iz;
    }

    bool operator==(const Grid& o) const {
        return dim == o.dim && n == o.n && half_len == o.half_len;
    }
};

// Visits every spectral slot; f(flat_index, s0, s1, s2) with signed lattice
// indices (unused axes get 0).
template <class F>
void for_each_mode(const Grid& g, F&& f) {
    const int n0 = g.dim >= 1 ? g.spec_n(0) : 1;
    const int n1 = g.dim >= 2 ? g.spec_n(1) : 1;
    const int n2 = g.dim >= 3 ? g.spec_n(2) : 1;
    std::size_t idx = 0;
    for (int i0 = 0; i0 < n0; ++i0)
        for (int i1 = 0; i1 < n1; ++i1)
            for (int i2 = 0; i2 < n2; ++i2, ++idx)
                f(idx, g.signed_index(0, i0), g.dim >= 2 ? g.signed_index(1, i1) : 0,
                  g.dim >= 3 ? g.signed_index(2, i2) : 0);
}

}  // namespace zklab

#endif
