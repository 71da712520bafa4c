#ifndef ZKLAB_SOLVER_HPP
#define ZKLAB_SOLVER_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "zklab/fft.hpp"
#include "zklab/grid.hpp"

namespace zklab {

using cplx = std::complex<double>;

enum class Equation { zk, gkdv };

struct EquationSpec {
    Equation eq = Equation::zk;
    int p = 2;  // gKdV nonlinearity power (2 or 4); unused for zk
};

inline void check_equation_grid(const EquationSpec& eq, const Grid& g) {
    if (eq.eq == Equation::zk && (g.dim < 2 || g.dim > 3))
        throw std::invalid_argument("zk runs in 2 or 3 dimensions");
    if (eq.eq == Equation::gkdv) {
        if (g.dim != 1) throw std::invalid_argument("gkdv runs in 1 dimension");
        if (eq.p != 2 && eq.p != 4) throw std::invalid_argument("gkdv power must be 2 or 4");
    }
}

// Fourier symbol of the linear flow: u_t = -dx Lap u  ->  i kx |k|^2,
// u_t = -dx^3 u -> i k^3. Purely imaginary, so the linear flow is unitary.
inline cplx linear_symbol(const std::array<double, 3>& k, const EquationSpec& eq) {
    if (eq.eq == Equation::zk) {
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        return {0.0, k[0] * k2};
    }
    return {0.0, k[0] * k[0] * k[0]};
}

struct BlowUpError : std::runtime_error {
    double t;
    explicit BlowUpError(double time)
        : std::runtime_error("non-finite field after step at t = " + std::to_string(time)),
          t(time) {}
};

namespace detail {

// 2/3-rule mask: keep |s_a| <= n_a/3 on every axis.
inline std::vector<char> dealias_mask(const Grid& g) {
    std::vector<char> mask(g.spec_total(), 1);
    for_each_mode(g, [&](std::size_t idx, int s0, int s1, int s2) {
        const int sv[3] = {s0, s1, s2};
        for (int a = 0; a < g.dim; ++a)
            if (3 * std::abs(sv[a]) > g.n[a]) mask[idx] = 0;
    });
    return mask;
}

}  // namespace detail

// Pseudospectral right-hand side and fourth-order exponential integrator.
// Quadratic products are dealiased by the 2/3 rule on the solver grid; the
// quartic gKdV product is formed on a factor-2 padded grid, which keeps the
// retained band alias-free.
class Solver {
  public:
    Solver(const Grid& g, const EquationSpec& eq, double dt)
        : grid_(g), eq_(eq), dt_(dt), ws_(g), mask_(detail::dealias_mask(g)) {
        check_equation_grid(eq, g);
        if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
        if (eq_.eq == Equation::gkdv && eq_.p == 4) {
            fine_grid_ = Grid::make(1, {2 * g.n[0], 1, 1}, g.half_len);
            ws_fine_ = std::make_unique<SpectralWorkspace>(fine_grid_);
        }
        build_coefficients();
    }

    const Grid& grid() const { return grid_; }
    const EquationSpec& equation() const { return eq_; }
    double dt() const { return dt_; }
    SpectralWorkspace& workspace() { return ws_; }
    void set_linear_only(bool v) { linear_only_ = v; }

    struct State {
        double t = 2.0;
        std::vector<cplx> uhat;  // dealiased, unnormalized spectrum
        double mass0 = 0.0;
        double energy0 = 0.0;
        std::uint64_t steps = 0;
    };

    State make_state(const Field& u0, double t_start);

    Field field_of(const State& s) {
        Field f(grid_);
        ws_.backward(s.uhat, f.values());
        return f;
    }

    void step(State& s) {
        nonlinear_spec(s.uhat, nu_);
        axpy(a_, e2_, s.uhat, q_, nu_);       // a = E2 u + Q N(u)
        nonlinear_spec(a_, na_);
        axpy(b_, e2_, s.uhat, q_, na_);       // b = E2 u + Q N(a)
        nonlinear_spec(b_, nb_);
        c_.resize(s.uhat.size());
        for (std::size_t i = 0; i < c_.size(); ++i)
            c_[i] = e2_[i] * a_[i] + q_[i] * (2.0 * nb_[i] - nu_[i]);
        nonlinear_spec(c_, nc_);
        for (std::size_t i = 0; i < s.uhat.size(); ++i)
            s.uhat[i] = e_[i] * s.uhat[i] + f1_[i] * nu_[i] + 2.0 * f2_[i] * (na_[i] + nb_[i]) +
                        f3_[i] * nc_[i];
        s.t += dt_;
        ++s.steps;
        for (const cplx& v : s.uhat)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw BlowUpError(s.t);
    }

    // N(u) in spectral space: -(1/2) dx(u^2) for zk, -dx(u^p) for gkdv.
    void nonlinear_spec(const std::vector<cplx>& in, std::vector<cplx>& out) {
        out.assign(in.size(), 0.0);
        if (linear_only_) return;
        if (eq_.eq == Equation::gkdv && eq_.p == 4) {
            quartic_spec(in, out);
            return;
        }
        ws_.backward(in, phys_);
        for (double& v : phys_) v *= v;
        ws_.forward(phys_, out);
        const double factor = eq_.eq == Equation::zk ? 0.5 : 1.0;
        for_each_mode(grid_, [&](std::size_t idx, int s0, int, int) {
            if (!mask_[idx]) {
                out[idx] = 0.0;
                return;
            }
            out[idx] *= cplx(0.0, -factor * grid_.wavenumber(0, s0));
        });
    }

    // physical-space nonlinear term, for tests and diagnostics
    Field nonlinear_term(const Field& u) {
        std::vector<cplx> in = u.spectrum(ws_);
        for (std::size_t i = 0; i < in.size(); ++i)
            if (!mask_[i]) in[i] = 0.0;
        std::vector<cplx> out;
        nonlinear_spec(in, out);
        Field f(grid_);
        ws_.backward(out, f.values());
        return f;
    }

    void project_dealias(std::vector<cplx>& s) const {
        for (std::size_t i = 0; i < s.size(); ++i)
            if (!mask_[i]) s[i] = 0.0;
    }

  private:
    void axpy(std::vector<cplx>& dst, const std::vector<cplx>& ca, const std::vector<cplx>& va,
              const std::vector<cplx>& cb, const std::vector<cplx>& vb) {
        dst.resize(va.size());
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = ca[i] * va[i] + cb[i] * vb[i];
    }

    void quartic_spec(const std::vector<cplx>& in, std::vector<cplx>& out) {
        const int n = grid_.n[0];
        const int nf = fine_grid_.n[0];
        std::vector<cplx> fine(fine_grid_.spec_total(), 0.0);
        const double amp = double(nf) / double(n);
        for (int i = 0; i <= n / 3; ++i) fine[i] = in[i] * amp;
        ws_fine_->backward(fine, phys_fine_);
        for (double& v : phys_fine_) {
            const double v2 = v * v;
            v = v2 * v2;
        }
        ws_fine_->forward(phys_fine_, fine);
        out.assign(in.size(), 0.0);
        for (int i = 0; i <= n / 3; ++i)
            out[i] = fine[i] / amp * cplx(0.0, -grid_.wavenumber(0, i));
    }

    // Kassam-Trefethen ETDRK4 coefficients, each psi-function evaluated by
    // averaging over a 32-point unit circle around dt*L to sidestep the
    // removable singularity at z = 0.
    void build_coefficients() {
        const std::size_t m = grid_.spec_total();
        e_.resize(m);
        e2_.resize(m);
        q_.resize(m);
        f1_.resize(m);
        f2_.resize(m);
        f3_.resize(m);
        const int M = 32;
        std::vector<cplx> ring(M);
        for (int j = 0; j < M; ++j)
            ring[j] = std::exp(cplx(0.0, 2.0 * M_PI * (j + 0.5) / M));
        for_each_mode(grid_, [&](std::size_t idx, int s0, int s1, int s2) {
            std::array<double, 3> k = {grid_.wavenumber(0, s0),
                                       grid_.dim >= 2 ? grid_.wavenumber(1, s1) : 0.0,
                                       grid_.dim >= 3 ? grid_.wavenumber(2, s2) : 0.0};
            const cplx z0 = dt_ * linear_symbol(k, eq_);
            e_[idx] = std::exp(z0);
            e2_[idx] = std::exp(0.5 * z0);
            cplx q = 0, f1 = 0, f2 = 0, f3 = 0;
            for (int j = 0; j < M; ++j) {
                const cplx z = z0 + ring[j];
                const cplx ez = std::exp(z);
                const cplx z2 = z * z, z3 = z2 * z;
                q += (std::exp(0.5 * z) - 1.0) / z;
                f1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z2)) / z3;
                f2 += (2.0 + z + ez * (-2.0 + z)) / z3;
                f3 += (-4.0 - 3.0 * z - z2 + ez * (4.0 - z)) / z3;
            }
            const double w = dt_ / M;
            q_[idx] = q * w;
            f1_[idx] = f1 * w;
            f2_[idx] = f2 * w;
            f3_[idx] = f3 * w;
        });
    }

    Grid grid_;
    EquationSpec eq_;
    double dt_;
    SpectralWorkspace ws_;
    std::vector<char> mask_;
    Grid fine_grid_;
    std::unique_ptr<SpectralWorkspace> ws_fine_;
    bool linear_only_ = false;

    std::vector<cplx> e_, e2_, q_, f1_, f2_, f3_;
    std::vector<cplx> nu_, na_, nb_, nc_, a_, b_, c_;
    std::vector<double> phys_, phys_fine_;
};

// ---- conserved quantities -------------------------------------------------

inline double mass(const Field& f) {
    double s = 0;
    for (double v : f.values()) s += v * v;
    return s * f.grid().cell_volume();
}

// Hamiltonian of the flow as integrated here:
//   zk:   1/2 int |grad u|^2 - 1/6 int u^3     (u_t + dx Lap u + u u_x = 0)
//   gkdv: 1/2 int u_x^2 - 1/(p+1) int u^{p+1}  (u_t + dx(u_xx + u^p) = 0)
inline double energy(const Field& f, const EquationSpec& eq, SpectralWorkspace& ws) {
    const Grid& g = f.grid();
    double grad2 = 0;
    for (int a = 0; a < g.dim; ++a) {
        Field da = derivative(f, a, ws);
        for (double v : da.values()) grad2 += v * v;
    }
    double pot = 0;
    if (eq.eq == Equation::zk) {
        for (double v : f.values()) pot += v * v * v;
        pot /= 6.0;
    } else {
        for (double v : f.values()) pot += std::pow(v, eq.p + 1);
        pot /= (eq.p + 1);
    }
    return (0.5 * grad2 - pot) * g.cell_volume();
}

inline Solver::State Solver::make_state(const Field& u0, double t_start) {
    if (!(u0.grid() == grid_)) throw std::invalid_argument("initial field grid mismatch");
    if (!(t_start >= 2.0)) throw std::invalid_argument("runs start at t >= 2");
    State st;
    st.t = t_start;
    st.uhat = u0.spectrum(ws_);
    project_dealias(st.uhat);
    Field proj = field_of(st);
    st.mass0 = mass(proj);
    st.energy0 = energy(proj, eq_, ws_);
    return st;
}

// ---- initial conditions -----------------------------------------------------

inline Field make_gaussian(const Grid& g, double amplitude, double width,
                           std::array<double, 3> center = {0, 0, 0}) {
    if (!(width > 0)) throw std::invalid_argument("gaussian width must be positive");
    Field f(g);
    auto& v = f.values();
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                double r2 = 0;
                const int idx3[3] = {i, j, k};
                for (int a = 0; a < g.dim; ++a) {
                    const double d = g.coord(a, idx3[a]) - center[a];
                    r2 += d * d;
                }
                v[g.index(i, j, k)] = amplitude * std::exp(-r2 / (width * width));
            }
    return f;
}

// Closed-form gKdV travelling wave: solves Q'' - c Q + Q^p = 0.
inline double gkdv_soliton_value(int p, double c, double x) {
    const double amp = std::pow(0.5 * c * (p + 1), 1.0 / (p - 1));
    const double arg = 0.5 * (p - 1) * std::sqrt(c) * x;
    const double sech = 1.0 / std::cosh(arg);
    return amp * std::pow(sech, 2.0 / (p - 1));
}

inline Field make_gkdv_soliton(const Grid& g, int p, double c, double center = 0.0) {
    if (g.dim != 1) throw std::invalid_argument("gkdv soliton is one-dimensional");
    if (!(c > 0)) throw std::invalid_argument("soliton speed must be positive");
    Field f(g);
    auto& v = f.values();
    for (int i = 0; i < g.n[0]; ++i) v[i] = gkdv_soliton_value(p, c, g.coord(0, i) - center);
    return f;
}

// Seeded band-limited noise; identical bytes for identical seeds.
inline Field make_random_band_limited(const Grid& g, std::uint64_t seed, double keep_fraction,
                                      double amplitude, SpectralWorkspace& ws) {
    if (!(keep_fraction > 0) || keep_fraction > 1.0)
        throw std::invalid_argument("keep_fraction must lie in (0, 1]");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nrm(0.0, 1.0);
    Field f(g);
    for (double& v : f.values()) v = nrm(rng);
    std::vector<cplx> s = f.spectrum(ws);
    for_each_mode(g, [&](std::size_t idx, int s0, int s1, int s2) {
        const int sv[3] = {s0, s1, s2};
        for (int a = 0; a < g.dim; ++a)
            if (std::abs(sv[a]) > keep_fraction * (g.n[a] / 2.0)) s[idx] = 0.0;
    });
    Field out(g);
    out.set_spectrum(ws, std::move(s));
    double peak = 0;
    for (double v : out.values()) peak = std::max(peak, std::abs(v));
    if (peak > 0) {
        const double scale = amplitude / peak;
        for (double& v : out.values()) v *= scale;
    }
    return out;
}

}  // namespace zklab

#endif
