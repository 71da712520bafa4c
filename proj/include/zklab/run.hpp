#ifndef ZKLAB_RUN_HPP
#define ZKLAB_RUN_HPP

#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "zklab/persistence.hpp"
#include "zklab/quadrature.hpp"
#include "zklab/soliton.hpp"
#include "zklab/solver.hpp"

namespace zklab {
namespace persist {

inline std::string run_id(const RunConfig& c) {
    std::ostringstream os;
    os << int(c.eq.eq) << ':' << c.eq.p << ':' << c.dim << ':' << c.n[0] << 'x' << c.n[1] << 'x'
       << c.n[2] << ':' << c.box[0] << ':' << c.t_start << "->" << c.t_end << ':' << c.dt << ':'
       << c.seed << ':' << int(c.ic_kind) << ':' << c.ic_amplitude << ':' << c.ic_width;
    return std::to_string(std::hash<std::string>{}(os.str()));
}

inline Field build_initial(const RunConfig& c, const Grid& g, SpectralWorkspace& ws) {
    switch (c.ic_kind) {
        case IcKind::gaussian:
            return make_gaussian(g, c.ic_amplitude, c.ic_width);
        case IcKind::random:
            return make_random_band_limited(g, c.seed, c.ic_keep_fraction, c.ic_amplitude, ws);
        case IcKind::soliton: {
            if (c.eq.eq == Equation::gkdv) return make_gkdv_soliton(g, c.eq.p, c.ic_speed);
            // steady profile of the u u_x normalization is twice the ground state
            auto prof = soliton::solve_ground_state(c.dim, c.ic_speed, g, 1e-9, 600);
            Field f = std::move(prof.field);
            for (double& v : f.values()) v *= 2.0;
            return f;
        }
        case IcKind::multisoliton: {
            Field f(g);
            if (c.eq.eq == Equation::gkdv) {
                for (std::size_t i = 0; i < c.ic_speeds.size(); ++i) {
                    Field one = make_gkdv_soliton(g, c.eq.p, c.ic_speeds[i], c.ic_centers[i]);
                    for (std::size_t j = 0; j < f.values().size(); ++j)
                        f.values()[j] += one.values()[j];
                }
            } else {
                for (std::size_t i = 0; i < c.ic_speeds.size(); ++i) {
                    auto prof = soliton::solve_ground_state(c.dim, c.ic_speeds[i], g, 1e-9, 600);
                    Field shifted =
                        translate(prof.field, {c.ic_centers[i], 0.0, 0.0}, ws);
                    for (std::size_t j = 0; j < f.values().size(); ++j)
                        f.values()[j] += 2.0 * shifted.values()[j];
                }
            }
            return f;
        }
    }
    throw std::logic_error("unreachable");
}

inline double mass_outside_central_half_box(const Field& u) {
    const Grid& g = u.grid();
    double outside = 0;
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                const int idx3[3] = {i, j, k};
                bool in = true;
                for (int a = 0; a < g.dim; ++a)
                    if (std::abs(g.coord(a, idx3[a])) > 0.5 * g.half_len[a]) in = false;
                if (!in) {
                    const double v = u.values()[g.index(i, j, k)];
                    outside += v * v;
                }
            }
    return outside * g.cell_volume();
}

struct RunResult {
    double final_t = 0;
    std::uint64_t steps = 0;
    double mass_drift = 0;    // max relative drift seen at samples
    double energy_drift = 0;
    std::string final_checkpoint;
    std::string manifest_path;
};

// Per-sample callback: time, physical field, and shared scratch objects.
using SampleHook = std::function<void(double t, const Field& u)>;

class Runner {
  public:
    Runner(const RunConfig& c, std::string out_dir)
        : cfg_(c), out_dir_(std::move(out_dir)), grid_(c.grid()) {
        validate_config(cfg_);
        std::filesystem::create_directories(out_dir_);
    }

    SampleHook on_sample;  // optional extra observer

    RunResult run() { return run_impl(nullptr); }
    RunResult run_from_checkpoint(const std::string& path) { return run_impl(&path); }

  private:
    std::string checkpoint_name(std::uint64_t step) const {
        std::ostringstream os;
        os << out_dir_ << "/checkpoint_" << std::setw(9) << std::setfill('0') << step << ".zkck";
        return os.str();
    }

    RunResult run_impl(const std::string* restart_path) {
        Solver solver(grid_, cfg_.eq, cfg_.dt);
        SpectralWorkspace& ws = solver.workspace();
        SeparableQuadrature quad(grid_);

        Solver::State st;
        if (restart_path) {
            st = restart(*restart_path, cfg_, solver);
        } else {
            Field u0 = build_initial(cfg_, grid_, ws);
            st = solver.make_state(u0, cfg_.t_start);
            const bool region_diag = cfg_.diag_xi || cfg_.diag_local_mass || cfg_.diag_weighted;
            if (region_diag) {
                const double outside = mass_outside_central_half_box(solver.field_of(st));
                if (outside > 1e-10 * std::max(st.mass0, 1e-30))
                    throw SchemaError("ic", "initial mass outside the central half-box exceeds 1e-10");
            }
        }

        const std::uint64_t total_steps =
            std::uint64_t(std::llround((cfg_.t_end - cfg_.t_start) / cfg_.dt));
        const double u0_l2 = std::sqrt(st.mass0);

        std::ofstream conserved(out_dir_ + "/conserved.csv",
                                restart_path ? std::ios::app : std::ios::trunc);
        if (!restart_path) {
            conserved << "# run_id=" << run_id(cfg_) << "\n";
            conserved << "t,mass,energy,mass_drift,energy_drift\n";
        }
        diag::DiagnosticSeries xi_series{"xi"}, lm_series{"local_mass"},
            wl_series{"weighted_local_mass"}, far_series{"far_region_mass"};
        std::vector<double> xi_bounds;
        std::uint64_t xi_violations = 0;

        RunResult res;
        auto sample = [&](double t, const Field& u) {
            const double m = mass(u);
            const double e = energy(u, cfg_.eq, solver.workspace());
            const double md = std::abs(m - st.mass0) / std::max(std::abs(st.mass0), 1e-300);
            const double ed =
                std::abs(e - st.energy0) / std::max(std::abs(st.energy0), 1e-300);
            res.mass_drift = std::max(res.mass_drift, md);
            res.energy_drift = std::max(res.energy_drift, ed);
            conserved << std::setprecision(16) << t << ',' << m << ',' << e << ',' << md << ','
                      << ed << "\n";
            if (cfg_.diag_xi && cfg_.dim == 2) {
                const double v = diag::xi_2d(u, t, cfg_.region, cfg_.weights, quad);
                const double bound = diag::xi_bound_2d(t, u0_l2, cfg_.region, cfg_.weights);
                xi_series.append(t, v);
                xi_bounds.push_back(bound);
                if (std::abs(v) > bound) ++xi_violations;
            }
            if (cfg_.diag_xi && cfg_.dim == 3) {
                const double v = diag::xi_3d(u, t, cfg_.region3, cfg_.weights3, quad);
                const double bound = diag::xi_bound_3d(t, u0_l2, cfg_.region3, cfg_.weights3);
                xi_series.append(t, v);
                xi_bounds.push_back(bound);
                if (std::abs(v) > bound) ++xi_violations;
            }
            if (cfg_.diag_local_mass && cfg_.dim == 2 && t >= 2.0)
                lm_series.append(t, diag::local_mass(u, params::region_omega(t, cfg_.region)));
            if (cfg_.diag_weighted && cfg_.dim == 2)
                wl_series.append(t, diag::weighted_local_mass_2d(u, t, cfg_.region, cfg_.weights,
                                                                 quad));
            if (cfg_.diag_far)
                far_series.append(t,
                                  diag::far_region_mass(u, t, cfg_.far, cfg_.far_axis,
                                                        cfg_.far_sign));
            if (on_sample) on_sample(t, u);
        };

        if (!restart_path) sample(st.t, solver.field_of(st));
        while (st.steps < total_steps) {
            solver.step(st);
            const bool at_checkpoint =
                cfg_.checkpoint_every > 0 && st.steps % std::uint64_t(cfg_.checkpoint_every) == 0;
            const bool at_sample =
                cfg_.diag_every > 0 && st.steps % std::uint64_t(cfg_.diag_every) == 0;
            if (at_checkpoint || at_sample || st.steps == total_steps) {
                Field u = solver.field_of(st);
                if (at_sample || st.steps == total_steps) sample(st.t, u);
                if (at_checkpoint || st.steps == total_steps) {
                    const std::string path = checkpoint_name(st.steps);
                    write_checkpoint(path, header_for(cfg_, st.t, st.steps), u.values());
                    res.final_checkpoint = path;
                    // resync through the written samples so a restarted run
                    // reproduces this run byte for byte
                    st.uhat = u.spectrum(solver.workspace());
                    solver.project_dealias(st.uhat);
                }
            }
        }

        auto write_series = [&](const diag::DiagnosticSeries& s, bool with_accumulator) {
            if (s.t.empty()) return std::string();
            const std::string path = out_dir_ + "/" + s.name + ".csv";
            std::ofstream out(path, restart_path ? std::ios::app : std::ios::trunc);
            out << "# run_id=" << run_id(cfg_) << "\n";
            out << "t,value,accumulator\n";
            std::vector<double> acc(s.t.size(), 0.0);
            if (with_accumulator && s.t.size() >= 2 && s.t.front() >= 10.0) {
                auto a = diag::decay_accumulator(s.t, s.value);
                acc = a.partial;
            }
            for (std::size_t i = 0; i < s.t.size(); ++i)
                out << std::setprecision(16) << s.t[i] << ',' << s.value[i] << ',' << acc[i]
                    << "\n";
            return path;
        };

        res.final_t = st.t;
        res.steps = st.steps;

        nlohmann::json manifest;
        manifest["run_id"] = run_id(cfg_);
        manifest["equation"] = cfg_.eq.eq == Equation::zk ? "zk" : "gkdv";
        manifest["p"] = cfg_.eq.p;
        manifest["dim"] = cfg_.dim;
        manifest["n"] = {cfg_.n[0], cfg_.n[1], cfg_.n[2]};
        manifest["box"] = {cfg_.box[0], cfg_.box[1], cfg_.box[2]};
        manifest["t_start"] = cfg_.t_start;
        manifest["t_end"] = cfg_.t_end;
        manifest["dt"] = cfg_.dt;
        manifest["seed"] = cfg_.seed;
        manifest["constants"] = {{"phi_derivative_c", weights::measured_phi_c()},
                                 {"chi_c0", weights::measured_chi_c0()},
                                 {"psi_sup", weights::psi_sup()},
                                 {"phi_l2", weights::phi_l2()}};
        manifest["results"] = {{"final_t", res.final_t},
                               {"steps", res.steps},
                               {"mass_drift", res.mass_drift},
                               {"energy_drift", res.energy_drift},
                               {"xi_bound_violations", xi_violations}};
        std::vector<std::string> files;
        files.push_back("conserved.csv");
        for (const auto* s : {&xi_series, &lm_series, &wl_series, &far_series}) {
            const std::string p = write_series(*s, s == &lm_series || s == &wl_series);
            if (!p.empty()) files.push_back(std::filesystem::path(p).filename().string());
        }
        if (!res.final_checkpoint.empty())
            files.push_back(std::filesystem::path(res.final_checkpoint).filename().string());
        manifest["outputs"] = files;

        res.manifest_path = out_dir_ + "/manifest.json";
        std::ofstream mout(res.manifest_path, std::ios::trunc);
        mout << manifest.dump(2) << "\n";
        return res;
    }

    RunConfig cfg_;
    std::string out_dir_;
    Grid grid_;
};

}  // namespace persist
}  // namespace zklab

#endif
