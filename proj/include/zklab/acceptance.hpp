#ifndef ZKLAB_ACCEPTANCE_HPP
#define ZKLAB_ACCEPTANCE_HPP

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <limits>
#include <random>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "zklab/diagnostics.hpp"
#include "zklab/params.hpp"
#include "zklab/run.hpp"
#include "zklab/soliton.hpp"
#include "zklab/solver.hpp"
#include "zklab/weights.hpp"

namespace zklab {
namespace accept {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

namespace detail {

class Timer {
  public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

inline std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(4) << v;
    return os.str();
}

// 2D shift of a field by delta along x with sub-grid resolution, then L2
// distance; minimized over the shift by golden-section search.
inline double min_shift_l2(const Field& ref, const Field& moved, SpectralWorkspace& ws,
                           double lo, double hi) {
    auto dist = [&](double s) {
        Field shifted = translate(ref, {s, 0, 0}, ws);
        double acc = 0;
        for (std::size_t i = 0; i < shifted.values().size(); ++i) {
            const double d = moved.values()[i] - shifted.values()[i];
            acc += d * d;
        }
        return std::sqrt(acc * ref.grid().cell_volume());
    };
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = dist(c), fd = dist(d);
    for (int it = 0; it < 60; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = dist(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = dist(d);
        }
    }
    return std::min(fc, fd);
}

}  // namespace detail

// Shared artifacts of the long dispersive run (criteria 6, 7 and 8).
struct DispersiveRunData {
    bool ran = false;
    std::vector<double> t;           // sample times
    std::vector<double> omega_mass;  // F(t) over Omega(t)
    std::vector<double> weighted;    // monitored virial integrand
    std::uint64_t xi_violations = 0;
    std::uint64_t compare_violations = 0;  // weighted * l1 eta >= Omega mass
    double max_identity_residual = 0;      // absolute, over all checks
    double max_identity_scale = 0;         // largest participating term over the run
    double min_a1 = 0, min_a2 = 0;
    int identity_checks = 0;
    double u0_l2 = 0;
};

// Frozen constants for criterion 7 (set from the pilot run before lock).
inline constexpr double kDecayB = 0.3;
inline constexpr double kDecayR = 1.0;
inline constexpr double kDecayQ = 1.5;
inline constexpr double kFrozenC1 = 0.0;  // pilot: majorant holds with C2/b alone

class Suite {
  public:
    explicit Suite(std::string out_dir) : out_dir_(std::move(out_dir)) {
        std::filesystem::create_directories(out_dir_);
    }

    // 1. weight certification
    CriterionResult weight_certification() {
        detail::Timer timer;
        const auto rep = weights::verify_profile(1.0, -50.0, 50.0, 10000);
        const double worst = rep.worst_violation();
        const double secs = timer.seconds();
        CriterionResult r{1, "weight-certification", rep.clean() && secs < 1.0,
                          "max violation " + detail::fmt(worst) + ", c=" +
                              detail::fmt(weights::measured_phi_c()) + ", c0=" +
                              detail::fmt(weights::measured_chi_c0()),
                          secs};
        return r;
    }

    // 2. full/reduced equivalence oracle
    CriterionResult reduced_system_oracle() {
        detail::Timer timer;
        const auto res = params::reduce_check(1000000, 100000, 20240601);
        params::RegionParams3D witness{1.0 / 3.0, 1.0 / 3.0 + 1e-3, 1.0 / 3.0, 1.0 / 3.0};
        const bool witness_ok =
            params::validate_3d_full(witness) && params::validate_3d_reduced(witness);
        bool big_p1_rejected = true;
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 10000; ++i) {
            params::RegionParams3D p{0.5 + 0.5 * u(rng), u(rng), u(rng), u(rng)};
            if (params::validate_3d_full(p) || params::validate_3d_reduced(p))
                big_p1_rejected = false;
        }
        const double secs = timer.seconds();
        CriterionResult r{2, "reduced-system-oracle",
                          res.discrepancies == 0 && witness_ok && big_p1_rejected && secs < 10.0,
                          std::to_string(res.samples) + " samples (" +
                              std::to_string(res.boundary_samples) + " boundary), " +
                              std::to_string(res.discrepancies) + " discrepancies",
                          secs};
        return r;
    }

    // 3. region limits
    CriterionResult region_limits() {
        detail::Timer timer;
        const double tol = 1e-12;
        bool ok = std::abs(params::b_sup_2d(1.0 / 3.0) - 3.0 / 5.0) <= tol &&
                  std::abs(params::b_sup_2d(3.0) - 1.0 / 3.0) <= tol &&
                  std::abs(params::b_sup_3d(1.0, 1.0) - 2.0 / 5.0) <= tol &&
                  std::abs(params::b_sup_3d(1.0, 2.0) - 1.0 / 3.0) <= tol;
        const auto opt = params::max_volume_growth_exponent_3d();
        ok = ok && std::abs(opt.exponent - 4.0 / 3.0) <= tol &&
             std::abs(opt.r1 - 1.5) <= tol && std::abs(opt.r2 - 1.5) <= tol &&
             std::abs(opt.b - 1.0 / 3.0) <= tol;
        // the supremum dominates the feasible set
        for (int i = 1; i < 300 && ok; ++i)
            for (int j = 1; j < 300; ++j) {
                const double r1 = 3.0 * i / 300.0, r2 = 3.0 * j / 300.0;
                if (!(r1 > 1 && r2 > 1 && r1 + r2 < 3 && r1 + 1 < 3 * r2 && r2 + 1 < 3 * r1))
                    continue;
                if (params::b_sup_3d(r1, r2) * (1 + r1 + r2) > opt.exponent + tol) {
                    ok = false;
                    break;
                }
            }
        return {3, "region-limits", ok,
                "b_sup checks at r=1/3, 3; 3D at (1,1), (1,2); volume exponent " +
                    detail::fmt(opt.exponent),
                timer.seconds()};
    }

    // 4. conservation across the equation family
    CriterionResult conservation() {
        detail::Timer timer;
        std::ostringstream detail_os;
        bool ok = true;

        auto run_case = [&](const std::string& label, const Grid& g, const EquationSpec& eq,
                            double t_end, double dt, bool track_xi) {
            Solver solver(g, eq, dt);
            SpectralWorkspace& ws = solver.workspace();
            Field u0 = make_gaussian(g, 0.5, 4.0);
            auto st = solver.make_state(u0, 2.0);
            const double u0_l2 = std::sqrt(st.mass0);
            SeparableQuadrature quad(g);
            // lambda1 peaks near t = 2, so the phi scales must stay small for
            // the weight support to fit this box
            const diag::WeightParams2D w2{1.0, 0.15, 0.15};
            double md = 0, ed = 0;
            std::uint64_t xi_bad = 0;
            const std::uint64_t total = std::uint64_t(std::llround((t_end - 2.0) / dt));
            const std::uint64_t sample_every = std::max<std::uint64_t>(total / 50, 1);
            for (std::uint64_t i = 1; i <= total; ++i) {
                solver.step(st);
                if (i % sample_every == 0 || i == total) {
                    Field u = solver.field_of(st);
                    md = std::max(md, std::abs(mass(u) - st.mass0) / st.mass0);
                    ed = std::max(
                        ed, std::abs(energy(u, eq, ws) - st.energy0) / std::abs(st.energy0));
                    if (track_xi && g.dim == 2) {
                        params::RegionParams2D rg{.b = kDecayB, .r = kDecayR, .q = kDecayQ};
                        const double v = diag::xi_2d(u, st.t, rg, w2, quad);
                        if (std::abs(v) > diag::xi_bound_2d(st.t, u0_l2, rg, w2)) ++xi_bad;
                    }
                }
            }
            xi_violations_ += xi_bad;
            const bool case_ok = md <= 1e-8 && ed <= 1e-6;
            ok = ok && case_ok;
            detail_os << label << " mass " << detail::fmt(md) << " energy " << detail::fmt(ed)
                      << (case_ok ? "; " : " FAIL; ");
        };

        run_case("2d-zk", Grid::make(2, {256, 256, 1}, {16 * M_PI, 16 * M_PI, 0}),
                 {Equation::zk, 2}, 7.0, 1e-3, true);
        run_case("gkdv-p2", Grid::make(1, {4096, 1, 1}, {256 * M_PI, 0, 0}), {Equation::gkdv, 2},
                 7.0, 1e-3, false);
        run_case("gkdv-p4", Grid::make(1, {4096, 1, 1}, {256 * M_PI, 0, 0}), {Equation::gkdv, 4},
                 7.0, 1e-3, false);
        run_case("3d-zk", Grid::make(3, {64, 64, 64}, {8 * M_PI, 8 * M_PI, 8 * M_PI}),
                 {Equation::zk, 2}, 4.0, 1e-3, false);
        return {4, "conservation", ok, detail_os.str(), timer.seconds()};
    }

    // 5. soliton fidelity
    CriterionResult soliton_fidelity() {
        detail::Timer timer;
        std::ostringstream os;
        bool ok = true;

        // d=1 against the closed form
        {
            Grid g = Grid::make(1, {1024, 1, 1}, {30 * M_PI, 0, 0});
            auto prof = soliton::solve_ground_state(1, 1.0, g, 1e-12, 400);
            double sup = 0;
            for (int i = 0; i < g.n[0]; ++i) {
                const double x = g.coord(0, i);
                sup = std::max(sup, std::abs(prof.field.values()[i] -
                                             1.5 / std::pow(std::cosh(0.5 * x), 2)));
            }
            ok = ok && sup <= 1e-10;
            os << "d1 sup-err " << detail::fmt(sup) << "; ";
        }
        // d=2,3 residual and the mass scaling law for d=1,2,3
        for (int d : {1, 2, 3}) {
            double ref = 0, worst_ratio = 0, worst_res = 0;
            for (double c : {0.5, 1.0, 2.0}) {
                soliton::SolitonProfile prof;
                if (d == 1) {
                    Grid g = Grid::make(1, {1024, 1, 1}, {30 * M_PI / std::sqrt(c), 0, 0});
                    prof = soliton::solve_ground_state(1, c, g, 1e-11 * c * c, 400);
                } else if (d == 2) {
                    Grid g = Grid::make(2, {256, 256, 1},
                                        {24.0 / std::sqrt(c), 24.0 / std::sqrt(c), 0});
                    prof = soliton::solve_ground_state(2, c, g, 1e-9 * c * c, 400);
                } else {
                    const double L = 15.0 / std::sqrt(c);
                    Grid g = Grid::make(3, {128, 128, 128}, {L, L, L});
                    prof = soliton::solve_ground_state(3, c, g, 1e-9 * c * c, 400);
                }
                worst_res = std::max(worst_res, prof.residual / (c * c));
                const double scaled = mass(prof.field) / std::pow(c, 2.0 - d / 2.0);
                if (ref == 0)
                    ref = scaled;
                else
                    worst_ratio = std::max(worst_ratio, std::abs(scaled - ref) / ref);
            }
            const bool res_ok = d == 1 || worst_res <= 1e-8;
            ok = ok && res_ok && worst_ratio <= 1e-6;
            os << "d" << d << " res " << detail::fmt(worst_res) << " scaling "
               << detail::fmt(worst_ratio) << "; ";
        }
        // 2D propagation over T = 2
        {
            Grid g = Grid::make(2, {256, 256, 1}, {12 * M_PI, 12 * M_PI, 0});
            SpectralWorkspace ws(g);
            auto prof = soliton::solve_ground_state(2, 1.0, g, 1e-9, 400);
            Field u0(g);
            for (std::size_t i = 0; i < u0.values().size(); ++i)
                u0.values()[i] = 2.0 * prof.field.values()[i];
            const double unorm = std::sqrt(mass(u0));
            Solver solver(g, {Equation::zk, 2}, 2e-3);
            auto st = solver.make_state(u0, 2.0);
            for (int i = 0; i < 1000; ++i) solver.step(st);
            Field ut = solver.field_of(st);
            const double dist = detail::min_shift_l2(u0, ut, ws, 1.0, 3.0);
            ok = ok && dist <= 1e-3 * unorm;
            os << "shape drift " << detail::fmt(dist / unorm);
        }
        return {5, "soliton-fidelity", ok, os.str(), timer.seconds()};
    }

    // long dispersive run feeding criteria 6, 7, 8
    const DispersiveRunData& dispersive_run() {
        if (data_.ran) return data_;
        Grid g = Grid::make(2, {512, 512, 1}, {96 * M_PI, 96 * M_PI, 0});
        Solver solver(g, {Equation::zk, 2}, 2e-3);
        SeparableQuadrature quad(g);
        params::RegionParams2D rg{.b = kDecayB, .r = kDecayR, .q = kDecayQ};
        const diag::WeightParams2D w{5.0, 5.0, 5.0};
        // theta(t) = t^0.7 ln^1.1 t keeps the [theta, 2 theta] window inside
        // this box through t = 60 (p = 1 exits it near t = 36)
        params::FarRegionLaw far{0.7, 0.1};
        const params::ScaleLaws2D law(rg.b, rg.r);

        // width 8 keeps the spectrum far inside the dealias band, so the
        // flux identity is probed well above the masked-tail floor
        Field u0 = make_gaussian(g, 0.5, 8.0);
        auto st = solver.make_state(u0, 10.0);
        data_.u0_l2 = std::sqrt(st.mass0);
        data_.min_a1 = data_.min_a2 = std::numeric_limits<double>::infinity();

        const double t_end = 60.0;
        const std::uint64_t total = std::uint64_t(std::llround((t_end - 10.0) / solver.dt()));
        const std::uint64_t sample_every = 50;    // dt = 2e-3 -> every 0.1
        const std::uint64_t identity_every = 500; // every 1.0
        auto sample = [&](double t, const Field& u) {
            data_.t.push_back(t);
            const auto box = params::region_omega(t, rg);
            const double F = diag::local_mass(u, box);
            const double W = diag::weighted_local_mass_2d(u, t, rg, w, quad);
            data_.omega_mass.push_back(F);
            data_.weighted.push_back(W);
            const double xv = diag::xi_2d(u, t, rg, w, quad);
            if (std::abs(xv) > diag::xi_bound_2d(t, data_.u0_l2, rg, w)) ++data_.xi_violations;
            const double mw = diag::min_weight_on_region_2d(t, rg, w, box);
            if (W * law.lambda1(t) * law.eta(t) < F * mw * (1.0 - 1e-9))
                ++data_.compare_violations;
        };

        sample(st.t, solver.field_of(st));
        for (std::uint64_t i = 1; i <= total; ++i) {
            const bool identity_here = i % identity_every == 0 && i + 1 <= total;
            if (identity_here) {
                Field ua = solver.field_of(st);
                const double ta = st.t;
                solver.step(st);
                Field ub = solver.field_of(st);
                for (int axis : {0, 1}) {
                    auto res = diag::identity_residual(ua, ta, ub, st.t, far, axis, quad);
                    data_.max_identity_residual =
                        std::max(data_.max_identity_residual, res.residual);
                    data_.max_identity_scale = std::max(data_.max_identity_scale, res.scale);
                    data_.min_a1 = std::min({data_.min_a1, res.first.A[0], res.second.A[0]});
                    data_.min_a2 = std::min({data_.min_a2, res.first.A[1], res.second.A[1]});
                    ++data_.identity_checks;
                }
                ++i;
                if (i % sample_every == 0) sample(st.t, solver.field_of(st));
                continue;
            }
            solver.step(st);
            if (i % sample_every == 0 || i == total) sample(st.t, solver.field_of(st));
        }
        data_.ran = true;

        // persist the two series
        std::ofstream csv(out_dir_ + "/dispersive_series.csv");
        csv << "t,omega_mass,weighted\n";
        for (std::size_t i = 0; i < data_.t.size(); ++i)
            csv << std::setprecision(16) << data_.t[i] << ',' << data_.omega_mass[i] << ','
                << data_.weighted[i] << "\n";
        return data_;
    }

    // 6. Xi boundedness certificate (2D runs plus a dedicated 3D trajectory)
    CriterionResult xi_boundedness() {
        detail::Timer timer;
        const auto& d = dispersive_run();
        std::uint64_t bad3d = 0;
        {
            Grid g = Grid::make(3, {64, 64, 64}, {64.0, 64.0, 64.0});
            Solver solver(g, {Equation::zk, 2}, 2e-3);
            SeparableQuadrature quad(g);
            params::ScaleLaws3D law{1.0 / 3.0, 1.0 / 3.0 + 1e-3, 1.0 / 3.0, 1.0 / 3.0, 1.0};
            const diag::WeightParams3D w{1.0, 0.5, 0.5, 0.5};
            Field u0 = make_gaussian(g, 0.3, 8.0);
            auto st = solver.make_state(u0, 2.0);
            const double u0_l2 = std::sqrt(st.mass0);
            for (int i = 1; i <= 1000; ++i) {
                solver.step(st);
                if (i % 50 == 0) {
                    Field u = solver.field_of(st);
                    const double v = diag::xi_3d(u, st.t, law, w, quad);
                    if (std::abs(v) > diag::xi_bound_3d(st.t, u0_l2, law, w)) ++bad3d;
                }
            }
        }
        const std::uint64_t total = d.xi_violations + xi_violations_ + bad3d;
        return {6, "xi-boundedness", total == 0,
                std::to_string(total) + " bound violations across trajectories",
                timer.seconds()};
    }

    // 7. decay accumulator against the fitted majorant
    CriterionResult decay_accumulator_criterion() {
        detail::Timer timer;
        const auto& d = dispersive_run();
        const auto acc = diag::decay_accumulator(d.t, d.omega_mass);
        const double c2 = d.u0_l2 * 5.0 * weights::psi_sup() * std::sqrt(5.0) *
                          weights::phi_l2() * std::sqrt(5.0) * weights::phi_l2();
        const double c0 = c2 / kDecayB + kFrozenC1;
        bool below = true;
        double worst_ratio = 0;
        for (std::size_t i = 1; i < acc.t.size(); ++i) {
            const double maj = c0 * diag::decay_majorant(10.0, acc.t[i], kDecayB);
            worst_ratio = std::max(worst_ratio, acc.partial[i] / maj);
            if (acc.partial[i] > maj) below = false;
        }
        const bool quartiles = acc.last_quartile_increment <= acc.first_quartile_increment;

        // sequential-rate certificate at a slow recursive time sequence
        // (large eps keeps t_n inside the run window) with the fitted c0
        const auto seq = diag::times_sequence(10.0, 50.0, 1.0, kDecayB, 40);
        std::vector<double> f_at;
        std::vector<double> times;
        for (double tn : seq.times) {
            if (tn > d.t.back()) break;
            const auto it = std::lower_bound(d.t.begin(), d.t.end(), tn);
            f_at.push_back(d.omega_mass[std::size_t(it - d.t.begin())]);
            times.push_back(tn);
        }
        double certified_fraction = 0;
        if (!times.empty()) {
            const auto flags = diag::rate_certificate(f_at, times, kDecayB, c0);
            std::size_t hits = 0, half = flags.size() / 2;
            for (std::size_t i = half; i < flags.size(); ++i) hits += flags[i] ? 1 : 0;
            certified_fraction = double(hits) / double(flags.size() - half);
        }

        const bool ok = below && quartiles && d.compare_violations == 0 &&
                        certified_fraction >= 0.5;
        return {7, "decay-accumulator", ok,
                "sum " + detail::fmt(acc.total()) + ", worst sum/majorant " +
                    detail::fmt(worst_ratio) + ", quartile increments " +
                    detail::fmt(acc.last_quartile_increment) + " <= " +
                    detail::fmt(acc.first_quartile_increment) + ", " +
                    std::to_string(d.compare_violations) + " domination violations, " +
                    detail::fmt(100 * certified_fraction) + "% certified on the late sequence",
                timer.seconds()};
    }

    // 8. far-region identity along the same run; the residual is measured
    // against the largest participating term seen over the whole run
    CriterionResult far_region_identity() {
        detail::Timer timer;
        const auto& d = dispersive_run();
        const double ratio =
            d.max_identity_scale > 0 ? d.max_identity_residual / d.max_identity_scale : 1.0;
        const bool ok =
            ratio <= 1e-4 && d.min_a1 >= 0.0 && d.min_a2 >= 0.0 && d.identity_checks > 0;
        return {8, "far-region-identity", ok,
                "max residual " + detail::fmt(d.max_identity_residual) + " vs largest term " +
                    detail::fmt(d.max_identity_scale) + " (ratio " + detail::fmt(ratio) +
                    ") over " + std::to_string(d.identity_checks) + " checks, min A1 " +
                    detail::fmt(d.min_a1) + ", min A2 " + detail::fmt(d.min_a2),
                timer.seconds()};
    }

    // 9. time-sequence constructor against an extended-precision oracle
    CriterionResult time_sequence() {
        detail::Timer timer;
        const auto seq = diag::times_sequence(10.0, 0.1, 1.0, 1.0 / 3.0, 20);
        bool ok = !seq.truncated && seq.times.size() == 20;
        long double lnt = std::log(10.0L);
        double prev = 10.0, worst = 0;
        for (std::size_t i = 0; ok && i < seq.times.size(); ++i) {
            const long double expo = std::exp(2.0L / (0.1L * std::pow(lnt, 2.0L)));
            lnt *= expo;
            const double oracle = double(std::exp(lnt));
            worst = std::max(worst, std::abs(seq.times[i] / oracle - 1.0));
            ok = ok && seq.times[i] > prev && worst <= 1e-12;
            prev = seq.times[i];
        }
        return {9, "time-sequence", ok,
                "N=20 strictly increasing, worst relative mismatch " + detail::fmt(worst),
                timer.seconds()};
    }

    // 10. determinism: byte-identical restart and seed-reproducible reports
    CriterionResult determinism() {
        detail::Timer timer;
        namespace fs = std::filesystem;
        persist::RunConfig c;
        c.eq = {Equation::gkdv, 2};
        c.dim = 1;
        c.n = {256, 1, 1};
        c.box = {32 * M_PI, 0, 0};
        c.t_start = 2.0;
        c.t_end = 2.4;
        c.dt = 1e-3;
        c.ic_kind = persist::IcKind::random;
        c.ic_keep_fraction = 0.4;
        c.ic_amplitude = 0.2;
        c.seed = 1234;
        c.checkpoint_every = 200;
        c.diag_every = 100;

        auto read_bytes = [](const std::string& p) {
            std::ifstream in(p, std::ios::binary);
            return std::string((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
        };
        const std::string base = out_dir_ + "/determinism";
        fs::remove_all(base);
        persist::Runner full(c, base + "/full");
        auto ra = full.run();
        persist::Runner again(c, base + "/again");
        auto rb = again.run();
        persist::Runner restarted(c, base + "/restart");
        auto rc = restarted.run_from_checkpoint(base + "/full/checkpoint_000000200.zkck");

        const bool seeds_equal =
            read_bytes(ra.final_checkpoint) == read_bytes(rb.final_checkpoint) &&
            read_bytes(base + "/full/manifest.json") == read_bytes(base + "/again/manifest.json");
        const bool restart_equal =
            read_bytes(ra.final_checkpoint) == read_bytes(rc.final_checkpoint);
        return {10, "determinism", seeds_equal && restart_equal,
                std::string("restart bytes ") + (restart_equal ? "identical" : "DIFFER") +
                    ", repeated seed " + (seeds_equal ? "identical" : "DIFFER"),
                timer.seconds()};
    }

    std::vector<CriterionResult> run_all(bool progress = true) {
        std::vector<CriterionResult> out;
        auto add = [&](int id, const std::string& name, auto&& fn) {
            CriterionResult r;
            try {
                r = fn();
            } catch (const std::exception& e) {
                r = CriterionResult{id, name, false, std::string("exception: ") + e.what(), 0};
            }
            if (progress) print_result_line(r);
            out.push_back(std::move(r));
        };
        add(1, "weight-certification", [&] { return weight_certification(); });
        add(2, "reduced-system-oracle", [&] { return reduced_system_oracle(); });
        add(3, "region-limits", [&] { return region_limits(); });
        add(4, "conservation", [&] { return conservation(); });
        add(5, "soliton-fidelity", [&] { return soliton_fidelity(); });
        add(6, "xi-boundedness", [&] { return xi_boundedness(); });
        add(7, "decay-accumulator", [&] { return decay_accumulator_criterion(); });
        add(8, "far-region-identity", [&] { return far_region_identity(); });
        add(9, "time-sequence", [&] { return time_sequence(); });
        add(10, "determinism", [&] { return determinism(); });
        return out;
    }

    static void print_result_line(const CriterionResult& r) {
        std::printf("criterion %02d %-24s %s  (%.1fs) %s\n", r.id, r.name.c_str(),
                    r.pass ? "PASS" : "FAIL", r.seconds, r.detail.c_str());
        std::fflush(stdout);
    }

    void write_report(const std::vector<CriterionResult>& results) const {
        nlohmann::json j;
        for (const auto& r : results)
            j["criteria"].push_back({{"id", r.id},
                                     {"name", r.name},
                                     {"pass", r.pass},
                                     {"detail", r.detail},
                                     {"seconds", r.seconds}});
        bool all = true;
        for (const auto& r : results) all = all && r.pass;
        j["all_pass"] = all;
        std::ofstream out(out_dir_ + "/acceptance_report.json");
        out << j.dump(2) << "\n";
    }

  private:
    std::string out_dir_;
    DispersiveRunData data_;
    std::uint64_t xi_violations_ = 0;  // from the conservation trajectories
};

inline void print_result(const CriterionResult& r) { Suite::print_result_line(r); }

}  // namespace accept
}  // namespace zklab

#endif
