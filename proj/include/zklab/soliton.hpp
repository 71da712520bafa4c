#ifndef ZKLAB_SOLITON_HPP
#define ZKLAB_SOLITON_HPP

#include <algorithm>
#include <complex>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "zklab/fft.hpp"
#include "zklab/grid.hpp"

namespace zklab {
namespace soliton {

struct SolitonProfile {
    int dim = 1;
    double c = 1.0;
    Field field;
    double residual = 0;  // sup norm of Lap Q - c Q + Q^2
    int iterations = 0;
    std::vector<double> residual_history;
};

struct SolveError : std::runtime_error {
    std::vector<double> residual_history;
    SolveError(const std::string& what, std::vector<double> hist)
        : std::runtime_error(what), residual_history(std::move(hist)) {}
};

namespace detail {

inline double mode_weight(const Grid& g, int last_axis_index) {
    // half-spectrum multiplicity on the real transform axis
    return (last_axis_index == 0 || last_axis_index == g.n[g.last_axis()] / 2) ? 1.0 : 2.0;
}

inline double k_squared(const Grid& g, int s0, int s1, int s2) {
    const int sv[3] = {s0, s1, s2};
    double k2 = 0;
    for (int a = 0; a < g.dim; ++a) {
        const double k = g.wavenumber(a, sv[a]);
        k2 += k * k;
    }
    return k2;
}

}  // namespace detail

// Ground state of Lap Q - c Q + Q^2 = 0 by the renormalized fixed point
// Q <- S^{3/2} (c - Lap)^{-1} Q^2 with S = <(c-Lap)Q,Q> / <Q^2,Q>, started
// from a Gaussian of width 2/sqrt(c).
inline SolitonProfile solve_ground_state(int dim, double c, const Grid& grid, double tol = 1e-10,
                                         int max_iter = 400) {
    if (!(c > 0)) throw std::invalid_argument("speed c must be positive");
    if (grid.dim != dim) throw std::invalid_argument("grid dimension mismatch");
    for (int a = 0; a < dim; ++a)
        if (grid.dx(a) > 0.5 / std::sqrt(c))
            throw std::invalid_argument("grid too coarse for the width scale 1/sqrt(c)");

    SpectralWorkspace ws(grid);
    const std::size_t nm = grid.spec_total();
    const double width = 2.0 / std::sqrt(c);

    Field q(grid);
    {
        auto& v = q.values();
        for (int i = 0; i < grid.n[0]; ++i)
            for (int j = 0; j < grid.n[1]; ++j)
                for (int k = 0; k < grid.n[2]; ++k) {
                    double r2 = 0;
                    const int idx3[3] = {i, j, k};
                    for (int a = 0; a < dim; ++a) {
                        const double x = grid.coord(a, idx3[a]);
                        r2 += x * x;
                    }
                    v[grid.index(i, j, k)] = 3.0 * c * std::exp(-r2 / (width * width));
                }
    }

    std::vector<double> k2(nm);
    std::vector<double> wgt(nm);
    {
        const int n0 = grid.spec_n(0);
        const int n1 = grid.dim >= 2 ? grid.spec_n(1) : 1;
        const int n2 = grid.dim >= 3 ? grid.spec_n(2) : 1;
        std::size_t idx = 0;
        for (int i0 = 0; i0 < n0; ++i0)
            for (int i1 = 0; i1 < n1; ++i1)
                for (int i2 = 0; i2 < n2; ++i2, ++idx) {
                    const int s0 = grid.signed_index(0, i0);
                    const int s1 = grid.dim >= 2 ? grid.signed_index(1, i1) : 0;
                    const int s2 = grid.dim >= 3 ? grid.signed_index(2, i2) : 0;
                    k2[idx] = detail::k_squared(grid, s0, s1, s2);
                    const int last = grid.dim == 1 ? i0 : (grid.dim == 2 ? i1 : i2);
                    wgt[idx] = detail::mode_weight(grid, last);
                }
    }

    std::vector<std::complex<double>> qhat, q2hat;
    std::vector<double> q2(grid.total()), res(grid.total());
    std::vector<double> history;
    double residual = std::numeric_limits<double>::infinity();
    int iter = 0;

    for (iter = 1; iter <= max_iter; ++iter) {
        ws.forward(q.values(), qhat);
        for (std::size_t i = 0; i < q2.size(); ++i) q2[i] = q.values()[i] * q.values()[i];
        ws.forward(q2, q2hat);

        double num = 0, den = 0;
        for (std::size_t i = 0; i < nm; ++i) {
            num += wgt[i] * (c + k2[i]) * std::norm(qhat[i]);
            den += wgt[i] * (q2hat[i] * std::conj(qhat[i])).real();
        }
        if (!(den > 0)) throw SolveError("fixed point degenerated (den <= 0)", history);
        const double gamma = std::pow(num / den, 1.5);

        for (std::size_t i = 0; i < nm; ++i) qhat[i] = gamma * q2hat[i] / (c + k2[i]);
        ws.backward(qhat, q.values());

        // residual of the new iterate
        for (std::size_t i = 0; i < q2.size(); ++i) q2[i] = q.values()[i] * q.values()[i];
        ws.forward(q.values(), qhat);
        for (std::size_t i = 0; i < nm; ++i) qhat[i] *= -k2[i];
        ws.backward(qhat, res);
        residual = 0;
        for (std::size_t i = 0; i < res.size(); ++i)
            residual = std::max(residual, std::abs(res[i] - c * q.values()[i] + q2[i]));
        history.push_back(residual);
        if (residual <= tol) break;
    }
    if (residual > tol)
        throw SolveError("ground state iteration did not reach tolerance " + std::to_string(tol),
                         history);

    double peak = 0, dip = 0;
    for (double v : q.values()) {
        peak = std::max(peak, v);
        dip = std::min(dip, v);
    }
    if (dip < -1e-12 * std::max(1.0, peak))
        throw SolveError("converged profile has a negative dip beyond round-off", history);
    for (int a = 0; a < dim; ++a) {
        double asym = 0;
        const auto& v = q.values();
        for (int i = 0; i < grid.n[0]; ++i)
            for (int j = 0; j < grid.n[1]; ++j)
                for (int k = 0; k < grid.n[2]; ++k) {
                    const int m[3] = {i, j, k};
                    int r[3] = {i, j, k};
                    r[a] = (grid.n[a] - m[a]) % grid.n[a];
                    asym = std::max(asym, std::abs(v[grid.index(m[0], m[1], m[2])] -
                                                   v[grid.index(r[0], r[1], r[2])]));
                }
        if (asym > 1e-10 * peak)
            throw SolveError("converged profile is not reflection symmetric", history);
    }

    SolitonProfile prof;
    prof.dim = dim;
    prof.c = c;
    prof.field = std::move(q);
    prof.residual = residual;
    prof.iterations = iter;
    prof.residual_history = std::move(history);
    return prof;
}

// Integral of Q_c^2 over the window {|x - shift| <= R} x {|x'| <= R}.
inline double local_soliton_mass(const SolitonProfile& prof, double R, double shift = 0.0) {
    const Grid& g = prof.field.grid();
    for (int a = 0; a < g.dim; ++a)
        if (!(R < g.half_len[a])) throw std::invalid_argument("window R must fit inside the box");
    const auto& v = prof.field.values();
    double s = 0;
    for (int i = 0; i < g.n[0]; ++i) {
        if (std::abs(g.coord(0, i) - shift) > R) continue;
        for (int j = 0; j < g.n[1]; ++j) {
            if (g.dim >= 2 && std::abs(g.coord(1, j)) > R) continue;
            for (int k = 0; k < g.n[2]; ++k) {
                if (g.dim >= 3 && std::abs(g.coord(2, k)) > R) continue;
                const double q = v[g.index(i, j, k)];
                s += q * q;
            }
        }
    }
    return s * g.cell_volume();
}

// Measured window constants: min over the given speeds of the scaled local
// mass. The scaling exponent 2 - d/2 comes from Q_c = c Q(sqrt(c) x).
struct WindowConstant {
    double R;
    double c0;
};

template <class SolveFn>
std::vector<WindowConstant> window_constant_table(int dim, const std::vector<double>& radii,
                                                  const std::vector<double>& speeds,
                                                  SolveFn&& solve) {
    std::vector<WindowConstant> table;
    std::vector<SolitonProfile> profs;
    for (double c : speeds) profs.push_back(solve(dim, c));
    for (double R : radii) {
        double c0 = std::numeric_limits<double>::infinity();
        for (const auto& p : profs)
            c0 = std::min(c0, local_soliton_mass(p, R) / std::pow(p.c, 2.0 - dim / 2.0));
        table.push_back({R, c0});
    }
    return table;
}

}  // namespace soliton
}  // namespace zklab

#endif
