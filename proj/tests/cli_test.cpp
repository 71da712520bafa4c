// Exercises the installed CLI end to end: exit-code contract, JSON reports,
// and determinism of repeated invocations.
#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
    int exit_code;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(ZKLAB_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    EXPECT_NE(pipe, nullptr);
    std::string out;
    std::array<char, 4096> buf;
    while (fgets(buf.data(), int(buf.size()), pipe)) out += buf.data();
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path temp_dir(const std::string& tag) {
    auto p = fs::temp_directory_path() / ("zklab_cli_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST(Cli, TimesSeqHappyPath) {
    auto r = run_cli("times-seq --t0 10 --eps 0.1 --c0 1 --b 0.333 --n 5");
    EXPECT_EQ(r.exit_code, 0);
    const json j = json::parse(r.output);
    ASSERT_EQ(j["times"].size(), 5u);
    double prev = 10.0;
    for (const auto& t : j["times"]) {
        EXPECT_GT(t.get<double>(), prev);
        prev = t.get<double>();
    }
}

TEST(Cli, TimesSeqRejectsBadB) {
    auto r = run_cli("times-seq --t0 10 --eps 0.1 --c0 1 --b 0.45 --n 5");
    EXPECT_EQ(r.exit_code, 1);
}

TEST(Cli, UnknownFlagExitsOne) {
    auto r = run_cli("times-seq --frobnicate 1");
    EXPECT_EQ(r.exit_code, 1);
}

TEST(Cli, VerifyWeightsClean) {
    auto dir = temp_dir("vw");
    auto r = run_cli("verify-weights --out " + (dir / "w.json").string());
    EXPECT_EQ(r.exit_code, 0);
    std::ifstream in(dir / "w.json");
    json j;
    in >> j;
    EXPECT_TRUE(j["clean"].get<bool>());
    for (const auto& c : j["checks"]) EXPECT_LE(c["max_violation"].get<double>(), 1e-13);
    fs::remove_all(dir);
}

TEST(Cli, ParamsCheckValidAndInvalid) {
    auto dir = temp_dir("pc");
    {
        std::ofstream cfg(dir / "good.cfg");
        cfg << "system = 2d\nb = 0.3\nr = 1.0\nq = 1.5\n";
    }
    EXPECT_EQ(run_cli("params check --config " + (dir / "good.cfg").string()).exit_code, 0);
    {
        std::ofstream cfg(dir / "bad.cfg");
        cfg << "system = 2d\nb = 0.6\nr = 0.3333333333333333\n";
    }
    auto r = run_cli("params check --config " + (dir / "bad.cfg").string());
    EXPECT_EQ(r.exit_code, 1);
    {
        std::ofstream cfg(dir / "gkdv.cfg");
        cfg << "system = gkdv\np = 4\nb = 0.55\nq = 1.01\nn = 0.5\n";
    }
    EXPECT_EQ(run_cli("params check --config " + (dir / "gkdv.cfg").string()).exit_code, 0);
    fs::remove_all(dir);
}

TEST(Cli, ReduceCheckReportsZeroDiscrepancies) {
    auto dir = temp_dir("rc");
    auto r = run_cli("params reduce-check --samples 20000 --boundary 2000 --seed 9 --out " +
                     (dir / "rc.json").string());
    EXPECT_EQ(r.exit_code, 0);
    std::ifstream in(dir / "rc.json");
    json j;
    in >> j;
    EXPECT_EQ(j["discrepancies"].get<std::uint64_t>(), 0u);
    EXPECT_EQ(j["samples"].get<std::uint64_t>(), j["boundary_samples"].get<std::uint64_t>() + 20000u);
    fs::remove_all(dir);
}

TEST(Cli, SolitonNonConvergenceIsNumericalFailure) {
    auto dir = temp_dir("sol");
    auto r = run_cli("soliton --dim 1 --speed 1.0 --n 256 --box 24 --tol 1e-30 --out " +
                     (dir / "q.zkck").string());
    EXPECT_EQ(r.exit_code, 2);
    fs::remove_all(dir);
}

TEST(Cli, SimulateAndDiagnoseRoundTrip) {
    auto dir = temp_dir("sim");
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "equation = gkdv\np = 2\ndim = 1\nn = 256\nbox = 100.5\n"
               "t_start = 2\nt_end = 2.1\ndt = 0.001\nseed = 3\n"
               "checkpoint_every = 50\ndiag_every = 50\n"
               "ic.kind = soliton\nic.speed = 1\n";
    }
    auto sim = run_cli("simulate --config " + (dir / "run.cfg").string() + " --out " +
                       (dir / "traj").string());
    EXPECT_EQ(sim.exit_code, 0) << sim.output;
    EXPECT_TRUE(fs::exists(dir / "traj" / "manifest.json"));

    auto dia = run_cli("diagnose --traj " + (dir / "traj").string() +
                       " --functional local-mass --b 0.4 --r 1.0 --out " + (dir / "diag").string());
    EXPECT_EQ(dia.exit_code, 0) << dia.output;
    EXPECT_TRUE(fs::exists(dir / "diag" / "local-mass.csv"));
    fs::remove_all(dir);
}

TEST(Cli, IdenticalInvocationsIdenticalReports) {
    auto dir = temp_dir("det");
    const std::string flags = "params reduce-check --samples 5000 --boundary 500 --seed 11";
    auto a = run_cli(flags + " --out " + (dir / "a.json").string());
    auto b = run_cli(flags + " --out " + (dir / "b.json").string());
    EXPECT_EQ(a.exit_code, 0);
    std::ifstream fa(dir / "a.json"), fb(dir / "b.json");
    const std::string sa((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
    const std::string sb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
    EXPECT_EQ(sa, sb);
    fs::remove_all(dir);
}
