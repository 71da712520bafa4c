// Command-line front end: simulation, ground states, parameter checking,
// trajectory diagnostics and the acceptance suite.
//
// Exit codes: 0 success, 1 validation failure, 2 numerical failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "zklab/acceptance.hpp"
#include "zklab/diagnostics.hpp"
#include "zklab/params.hpp"
#include "zklab/run.hpp"
#include "zklab/soliton.hpp"
#include "zklab/weights.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace zklab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

std::string default_out_dir() {
    const char* env = std::getenv("ZKLAB_OUT");
    return env ? std::string(env) : std::string("zklab_out");
}

void write_json(const std::string& path, const json& j) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

json report_from_validity(const params::ValidityReport& rep) {
    json j;
    j["valid"] = rep.valid;
    for (const auto& c : rep.checks)
        j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"margin", c.margin}});
    for (const auto& [k, v] : rep.derived) j["derived"][k] = v;
    return j;
}

// key = value map for the `params check` input
std::map<std::string, std::string> read_kv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw persist::SchemaError("config", "cannot open '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

double kv_num(const std::map<std::string, std::string>& kv, const std::string& key,
              double fallback, bool required = false) {
    auto it = kv.find(key);
    if (it == kv.end()) {
        if (required) throw persist::SchemaError(key, "missing required key");
        return fallback;
    }
    return std::stod(it->second);
}

int cmd_params_check(const std::string& config_path, const std::string& out_path) {
    const auto kv = read_kv(config_path);
    const auto it = kv.find("system");
    if (it == kv.end()) throw persist::SchemaError("system", "missing required key (2d|3d|gkdv)");
    json j;
    bool valid = false;
    if (it->second == "2d") {
        params::RegionParams2D p;
        p.b = kv_num(kv, "b", 0, true);
        p.r = kv_num(kv, "r", 0, true);
        p.q = kv_num(kv, "q", 1.5);
        p.centered = kv_num(kv, "centered", 1) != 0;
        p.m = kv_num(kv, "m", 0);
        p.n = kv_num(kv, "n", 0);
        p.h1_mode = kv_num(kv, "h1", 0) != 0;
        const auto rep = params::validate_2d(p);
        j = report_from_validity(rep);
        valid = rep.valid;
    } else if (it->second == "3d") {
        params::RegionParams3D p{kv_num(kv, "p1", 0, true), kv_num(kv, "p2", 0, true),
                                 kv_num(kv, "p3", 0, true), kv_num(kv, "p4", 0, true)};
        const bool h1 = kv_num(kv, "h1", 0) != 0;
        const bool full = params::validate_3d_full(p, h1);
        const bool reduced = params::validate_3d_reduced(p, h1);
        j["valid"] = full;
        j["full"] = full;
        j["reduced"] = reduced;
        j["agree"] = (full == reduced);
        valid = full;
    } else if (it->second == "gkdv") {
        params::GkdvParams p;
        p.p = int(kv_num(kv, "p", 2, true));
        p.b = kv_num(kv, "b", 0, true);
        p.q = kv_num(kv, "q", 1.1);
        p.n = kv_num(kv, "n", 0);
        const auto rep = params::validate_gkdv(p);
        j = report_from_validity(rep);
        valid = rep.valid;
    } else {
        throw persist::SchemaError("system", "unknown system '" + it->second + "'");
    }
    if (!out_path.empty()) write_json(out_path, j);
    std::cout << j.dump(2) << "\n";
    return valid ? kExitOk : kExitValidation;
}

int cmd_reduce_check(std::uint64_t samples, std::uint64_t boundary, std::uint64_t seed, bool h1,
                     const std::string& out_path) {
    const auto res = params::reduce_check(samples, boundary, seed, h1);
    json j{{"samples", res.samples},
           {"boundary_samples", res.boundary_samples},
           {"discrepancies", res.discrepancies},
           {"accepted", res.accepted}};
    if (res.first_discrepancy) {
        j["first_discrepancy"] = {res.first_discrepancy->p1, res.first_discrepancy->p2,
                                  res.first_discrepancy->p3, res.first_discrepancy->p4};
    }
    if (!out_path.empty()) write_json(out_path, j);
    std::cout << j.dump(2) << "\n";
    return res.discrepancies == 0 ? kExitOk : kExitValidation;
}

int cmd_verify_weights(double sigma, int points, const std::string& out_path) {
    const auto rep = weights::verify_profile(sigma, -50.0, 50.0, points);
    json j;
    j["clean"] = rep.clean();
    for (const auto& c : rep.checks)
        j["checks"].push_back({{"invariant", c.invariant},
                               {"max_violation", c.max_violation},
                               {"measured_constant", c.measured_constant}});
    if (!out_path.empty()) write_json(out_path, j);
    std::cout << j.dump(2) << "\n";
    return rep.clean() ? kExitOk : kExitValidation;
}

int cmd_soliton(int dim, double speed, const std::string& out_file, int n,
                double box_over_sqrt_c, double tol, bool print_table) {
    const double L = box_over_sqrt_c / std::sqrt(speed);
    std::array<int, 3> nn{1, 1, 1};
    std::array<double, 3> bb{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
        nn[a] = n;
        bb[a] = L;
    }
    Grid g = Grid::make(dim, nn, bb);
    auto prof = soliton::solve_ground_state(dim, speed, g, tol, 600);
    persist::CheckpointHeader h;
    h.kind = persist::CheckpointKind::elliptic_ground_state;
    h.dim = std::uint32_t(dim);
    h.p = 2;
    for (int a = 0; a < 3; ++a) {
        h.n[a] = std::uint32_t(g.n[a]);
        h.box[a] = g.half_len[a];
    }
    h.t = 0.0;
    h.dt = 0.0;
    h.speed = speed;
    persist::write_checkpoint(out_file, h, prof.field.values());
    std::cout << "ground state d=" << dim << " c=" << speed << ": residual " << prof.residual
              << " after " << prof.iterations << " iterations, mass " << mass(prof.field)
              << " -> " << out_file << "\n";
    if (print_table) {
        std::cout << "window constants c0(R) (measured at this speed):\n";
        for (double R : {1.0, 2.0, 4.0, 8.0}) {
            if (R >= g.half_len[0]) continue;
            std::cout << "  R=" << R << "  c0="
                      << soliton::local_soliton_mass(prof, R) /
                             std::pow(speed, 2.0 - dim / 2.0)
                      << "\n";
        }
    }
    return kExitOk;
}

int cmd_times_seq(double t0, double eps, double c0, double b, int n,
                  const std::string& out_path) {
    const auto seq = diag::times_sequence(t0, eps, c0, b, n);
    json j{{"t0", seq.t0},
           {"eps", seq.eps},
           {"c0", seq.c0},
           {"b", seq.b},
           {"truncated", seq.truncated},
           {"times", seq.times}};
    if (!out_path.empty()) write_json(out_path, j);
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 const std::string& restart_path) {
    const persist::RunConfig cfg = persist::load_config(config_path);
    persist::Runner runner(cfg, out_dir);
    const persist::RunResult res =
        restart_path.empty() ? runner.run() : runner.run_from_checkpoint(restart_path);
    std::cout << "run finished at t=" << res.final_t << " after " << res.steps
              << " steps; mass drift " << res.mass_drift << ", energy drift " << res.energy_drift
              << "\nmanifest: " << res.manifest_path << "\n";
    return kExitOk;
}

int cmd_diagnose(const std::string& traj_dir, const std::string& functional,
                 const std::map<std::string, double>& opt, const std::string& out_dir) {
    std::vector<std::pair<std::uint64_t, std::string>> ckpts;
    for (const auto& e : fs::directory_iterator(traj_dir)) {
        if (e.path().extension() == ".zkck") {
            auto [h, payload] = persist::read_checkpoint(e.path().string());
            (void)payload;
            ckpts.emplace_back(h.step, e.path().string());
        }
    }
    if (ckpts.empty()) throw persist::SchemaError("traj", "no checkpoints in '" + traj_dir + "'");
    std::sort(ckpts.begin(), ckpts.end());

    auto first = persist::read_checkpoint(ckpts.front().second);
    const persist::CheckpointHeader h0 = first.first;
    std::array<int, 3> nn{int(h0.n[0]), int(h0.n[1]), int(h0.n[2])};
    Grid g = Grid::make(int(h0.dim), nn, h0.box);
    SeparableQuadrature quad(g);
    SpectralWorkspace ws(g);

    auto grab = [&](const std::string& key, double fallback) {
        auto it = opt.find(key);
        return it == opt.end() ? fallback : it->second;
    };
    params::RegionParams2D rg{.b = grab("b", 0.3), .r = grab("r", 1.0), .q = grab("q", 1.5)};
    diag::WeightParams2D w{grab("sigma", 5.0), grab("delta1", 5.0), grab("delta2", 5.0)};
    params::FarRegionLaw far{grab("p-exp", 1.0), grab("eps", 0.1)};
    const int axis = int(grab("axis", 0));
    const int sign = int(grab("sign", 1));

    fs::create_directories(out_dir);
    const std::string csv_path = out_dir + "/" + functional + ".csv";

    diag::DiagnosticSeries series{functional};
    double prev_t = -1;
    Field prev_field;
    json per_sample = json::array();
    for (const auto& [step, path] : ckpts) {
        auto [h, samples] = persist::read_checkpoint(path);
        Field u(g);
        u.values() = std::move(samples);
        double value = 0;
        if (functional == "xi") {
            if (h.dim != 2) throw persist::SchemaError("functional", "xi needs a 2D run");
            value = diag::xi_2d(u, h.t, rg, w, quad);
        } else if (functional == "q") {
            const double sprime = grab("sprime", 1.0 / (1.0 / w.sigma + 1.0 / w.delta1));
            value = diag::q_functional_2d(u, h.t, rg, sprime, w, quad);
        } else if (functional == "local-mass" || functional == "local-h1") {
            const double t = std::max(h.t, 2.0);
            params::RegionBox box;
            if (h.dim == 1) {
                params::GkdvParams gp{.p = int(h.p), .b = rg.b, .q = rg.q, .n = 0.0};
                box = params::region_omega_gkdv(t, gp);
            } else if (h.dim == 2) {
                box = params::region_omega(t, rg);
            } else {
                box = params::region_omega_3d(t, rg.b, rg.r, rg.r);
            }
            value = functional == "local-mass" ? diag::local_mass(u, box)
                                               : diag::local_h1(u, box, ws);
        } else if (functional == "weighted") {
            value = diag::weighted_local_mass_2d(u, h.t, rg, w, quad);
        } else if (functional == "far") {
            value = diag::far_region_mass(u, h.t, far, axis, sign);
        } else if (functional == "identity") {
            if (prev_t >= 0) {
                auto r = diag::identity_residual(prev_field, prev_t, u, h.t, far, axis, quad);
                per_sample.push_back({{"t", h.t},
                                      {"residual", r.residual},
                                      {"scale", r.scale},
                                      {"A1", r.first.A[0]},
                                      {"A2", r.first.A[1]}});
                if (series.t.empty() || h.t > series.t.back()) series.append(h.t, r.residual);
            }
            prev_field = u;
            prev_t = h.t;
            continue;
        } else {
            throw persist::SchemaError("functional", "unknown functional '" + functional + "'");
        }
        if (series.t.empty() || h.t > series.t.back()) series.append(h.t, value);
    }

    std::ofstream csv(csv_path);
    csv << "t,value,accumulator\n";
    std::vector<double> acc(series.t.size(), 0.0);
    if (series.t.size() >= 2 && series.t.front() >= 10.0 &&
        (functional == "local-mass" || functional == "weighted")) {
        acc = diag::decay_accumulator(series.t, series.value).partial;
    }
    for (std::size_t i = 0; i < series.t.size(); ++i)
        csv << std::setprecision(16) << series.t[i] << ',' << series.value[i] << ',' << acc[i]
            << "\n";

    json manifest{{"functional", functional},
                  {"trajectory", traj_dir},
                  {"samples", series.t.size()},
                  {"csv", csv_path},
                  {"constants",
                   {{"phi_derivative_c", weights::measured_phi_c()},
                    {"chi_c0", weights::measured_chi_c0()},
                    {"psi_sup", weights::psi_sup()},
                    {"phi_l2", weights::phi_l2()}}}};
    if (!per_sample.empty()) manifest["identity"] = per_sample;
    write_json(out_dir + "/" + functional + "_manifest.json", manifest);
    std::cout << "wrote " << csv_path << " (" << series.t.size() << " rows)\n";
    return kExitOk;
}

int cmd_acceptance(const std::string& out_dir) {
    accept::Suite suite(out_dir);
    const auto results = suite.run_all();
    suite.write_report(results);
    bool all = true;
    for (const auto& r : results) all = all && r.pass;
    std::cout << (all ? "all criteria PASS" : "some criteria FAILED") << "; report in " << out_dir
              << "/acceptance_report.json\n";
    return all ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dispersive decay laboratory for ZK and gKdV flows"};
    app.require_subcommand(1);

    std::string config_path, out_dir = default_out_dir(), out_file, restart_path;

    auto* sim = app.add_subcommand("simulate", "integrate a configured run");
    sim->add_option("--config", config_path, "run configuration file")->required();
    sim->add_option("--out", out_dir, "output directory");
    sim->add_option("--restart", restart_path, "checkpoint to resume from");

    auto* sol = app.add_subcommand("soliton", "solve the ground state profile");
    int sol_dim = 2, sol_n = 256;
    double sol_speed = 1.0, sol_box = 24.0, sol_tol = 1e-10;
    bool sol_table = false;
    sol->add_option("--dim", sol_dim, "dimension 1..3")->required();
    sol->add_option("--speed", sol_speed, "wave speed c > 0");
    sol->add_option("--out", out_file, "output profile file");
    sol->add_option("--n", sol_n, "points per axis (power of two)");
    sol->add_option("--box", sol_box, "box half-length at c = 1 (scaled by 1/sqrt(c))");
    sol->add_option("--tol", sol_tol, "residual tolerance");
    sol->add_flag("--table", sol_table, "print measured window constants c0(R)");

    auto* par = app.add_subcommand("params", "parameter system checks");
    par->require_subcommand(1);
    auto* chk = par->add_subcommand("check", "validate a parameter tuple from a config");
    std::string par_config, par_out;
    chk->add_option("--config", par_config, "key = value file with system = 2d|3d|gkdv")
        ->required();
    chk->add_option("--out", par_out, "JSON report path");
    auto* red = par->add_subcommand("reduce-check", "full vs reduced constraint equivalence");
    std::uint64_t rc_samples = 1000000, rc_boundary = 100000, rc_seed = 1;
    bool rc_h1 = false;
    std::string rc_out;
    red->add_option("--samples", rc_samples, "uniform samples");
    red->add_option("--boundary", rc_boundary, "boundary-biased samples");
    red->add_option("--seed", rc_seed, "RNG seed");
    red->add_flag("--h1", rc_h1, "include the H1-only transverse conditions");
    red->add_option("--out", rc_out, "JSON report path");

    auto* dia = app.add_subcommand("diagnose", "evaluate a functional along a trajectory");
    std::string traj_dir, functional;
    dia->add_option("--traj", traj_dir, "directory of checkpoints")->required();
    dia->add_option("--functional", functional,
                    "xi | q | local-mass | local-h1 | weighted | far | identity")
        ->required();
    std::map<std::string, double> dia_opts;
    for (const char* key : {"b", "r", "q", "sigma", "delta1", "delta2", "sprime", "p-exp", "eps",
                            "axis", "sign"}) {
        dia->add_option_function<double>(
            std::string("--") + key,
            [&dia_opts, key](const double& v) { dia_opts[key] = v; });
    }
    dia->add_option("--out", out_dir, "output directory");

    auto* seq = app.add_subcommand("times-seq", "explicit decay time sequence");
    double ts_t0 = 10.0, ts_eps = 0.1, ts_c0 = 1.0, ts_b = 1.0 / 3.0;
    int ts_n = 5;
    std::string ts_out;
    seq->add_option("--t0", ts_t0, "start time >= 10")->required();
    seq->add_option("--eps", ts_eps, "epsilon > 0")->required();
    seq->add_option("--c0", ts_c0, "constant C0 > 0")->required();
    seq->add_option("--b", ts_b, "exponent b in (0, 2/5)")->required();
    seq->add_option("--n", ts_n, "number of terms")->required();
    seq->add_option("--out", ts_out, "JSON report path");

    auto* ver = app.add_subcommand("verify-weights", "certify the weight family invariants");
    double vw_sigma = 1.0;
    int vw_points = 10000;
    std::string vw_out;
    ver->add_option("--sigma", vw_sigma, "scale for the psi_sigma checks");
    ver->add_option("--points", vw_points, "grid points on [-50, 50]");
    ver->add_option("--out", vw_out, "JSON report path");

    auto* acc = app.add_subcommand("acceptance", "run the full acceptance suite");
    acc->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints usage
        return kExitValidation;
    }

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out_dir, restart_path);
        if (sol->parsed()) {
            if (out_file.empty()) out_file = out_dir + "/ground_state.zkck";
            fs::create_directories(fs::path(out_file).parent_path().empty()
                                       ? "."
                                       : fs::path(out_file).parent_path());
            return cmd_soliton(sol_dim, sol_speed, out_file, sol_n, sol_box, sol_tol, sol_table);
        }
        if (chk->parsed()) return cmd_params_check(par_config, par_out);
        if (red->parsed()) return cmd_reduce_check(rc_samples, rc_boundary, rc_seed, rc_h1, rc_out);
        if (dia->parsed()) return cmd_diagnose(traj_dir, functional, dia_opts, out_dir);
        if (seq->parsed()) return cmd_times_seq(ts_t0, ts_eps, ts_c0, ts_b, ts_n, ts_out);
        if (ver->parsed()) return cmd_verify_weights(vw_sigma, vw_points, vw_out);
        if (acc->parsed()) return cmd_acceptance(out_dir);
    } catch (const persist::SchemaError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const diag::OmegaOverflowError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const BlowUpError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const soliton::SolveError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
