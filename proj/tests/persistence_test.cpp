#include "zklab/run.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace zklab;
using namespace zklab::persist;

namespace {

std::string read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    EXPECT_TRUE(in.good()) << path;
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::filesystem::path temp_dir(const std::string& tag) {
    auto p = std::filesystem::temp_directory_path() / ("zklab_test_" + tag);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

RunConfig small_gkdv_run() {
    RunConfig c;
    c.eq = {Equation::gkdv, 2};
    c.dim = 1;
    c.n = {128, 1, 1};
    c.box = {16 * M_PI, 0, 0};
    c.t_start = 2.0;
    c.t_end = 2.2;
    c.dt = 1e-3;
    c.ic_kind = IcKind::soliton;
    c.ic_speed = 1.0;
    c.checkpoint_every = 100;
    c.diag_every = 50;
    return c;
}

}  // namespace

TEST(Config, RoundTrip) {
    RunConfig c = small_gkdv_run();
    c.diag_far = true;
    c.far = {0.5, 0.2};
    c.ic_speeds = {1.0, 0.5};
    c.ic_centers = {-20.0, 20.0};
    std::ostringstream os;
    save_config(c, os);
    std::istringstream is(os.str());
    RunConfig back = parse_config(is);
    EXPECT_TRUE(back == c);
}

TEST(Config, SchemaErrorsCarryFieldPaths) {
    std::istringstream bad_key("frobnicate = 7\nn = 64\nbox = 10\n");
    try {
        parse_config(bad_key);
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.field, "frobnicate");
    }
    std::istringstream missing("dim = 1\n");
    EXPECT_THROW(parse_config(missing), SchemaError);
    std::istringstream junk("dt = fast\nn = 64\nbox = 10\n");
    EXPECT_THROW(parse_config(junk), SchemaError);
}

TEST(Config, RegionValidatedBeforeCompute) {
    RunConfig c;
    c.eq = {Equation::zk, 2};
    c.dim = 2;
    c.n = {64, 64, 1};
    c.box = {64.0, 64.0, 0};
    c.t_end = 4.0;
    c.diag_local_mass = true;
    c.region = {.b = 0.7, .r = 1.0, .q = 1.2};  // violates b < 2/(3+r) = 1/2
    try {
        validate_config(c);
        FAIL() << "expected rejection";
    } catch (const SchemaError& e) {
        EXPECT_NE(e.field.find("region"), std::string::npos);
    }
    c.region.b = 0.3;
    EXPECT_NO_THROW(validate_config(c));
}

TEST(Checkpoint, WriteReadRoundTrip) {
    auto dir = temp_dir("ckpt");
    CheckpointHeader h;
    h.kind = CheckpointKind::gkdv;
    h.dim = 1;
    h.p = 4;
    h.n = {64, 1, 1};
    h.box = {10.0, 0, 0};
    h.t = 3.75;
    h.dt = 1e-3;
    h.speed = 1.5;
    h.seed = 99;
    h.step = 1750;
    std::vector<double> payload(64);
    for (int i = 0; i < 64; ++i) payload[i] = std::sin(0.1 * i) * 1e-3;
    const std::string path = (dir / "a.zkck").string();
    write_checkpoint(path, h, payload);
    auto [h2, payload2] = read_checkpoint(path);
    EXPECT_EQ(int(h2.kind), int(h.kind));
    EXPECT_EQ(h2.p, h.p);
    EXPECT_EQ(h2.step, h.step);
    EXPECT_EQ(h2.t, h.t);
    EXPECT_EQ(h2.speed, h.speed);
    ASSERT_EQ(payload2.size(), payload.size());
    for (std::size_t i = 0; i < payload.size(); ++i) EXPECT_EQ(payload2[i], payload[i]);

    // header mismatch reported with a field path
    RunConfig c = small_gkdv_run();
    try {
        check_header(h2, c);
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.field, "p");
    }
    std::filesystem::remove_all(dir);
}

TEST(Checkpoint, RejectsCorruptFiles) {
    auto dir = temp_dir("corrupt");
    const std::string path = (dir / "bad.zkck").string();
    std::ofstream(path, std::ios::binary) << "not a checkpoint at all";
    EXPECT_THROW(read_checkpoint(path), SchemaError);
    std::filesystem::remove_all(dir);
}

TEST(Runner, RestartReproducesBytes) {
    RunConfig c = small_gkdv_run();
    auto dir_a = temp_dir("full");
    auto dir_b = temp_dir("restart");

    Runner full(c, dir_a.string());
    auto res_a = full.run();
    EXPECT_EQ(res_a.steps, 200u);

    // restart from the mid-run checkpoint of the full run
    const std::string mid = (dir_a / "checkpoint_000000100.zkck").string();
    ASSERT_TRUE(std::filesystem::exists(mid));
    Runner restarted(c, dir_b.string());
    auto res_b = restarted.run_from_checkpoint(mid);
    EXPECT_EQ(res_b.steps, 200u);
    EXPECT_EQ(res_b.final_t, res_a.final_t);

    const std::string fa = read_bytes(res_a.final_checkpoint);
    const std::string fb = read_bytes(res_b.final_checkpoint);
    ASSERT_EQ(fa.size(), fb.size());
    EXPECT_TRUE(fa == fb) << "restart must reproduce the final checkpoint byte for byte";

    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
}

TEST(Runner, IdenticalSeedsIdenticalOutputs) {
    RunConfig c = small_gkdv_run();
    c.ic_kind = IcKind::random;
    c.ic_keep_fraction = 0.4;
    c.ic_amplitude = 0.1;
    c.seed = 42;
    auto dir_a = temp_dir("seed_a");
    auto dir_b = temp_dir("seed_b");
    Runner a(c, dir_a.string()), b(c, dir_b.string());
    auto ra = a.run();
    auto rb = b.run();
    EXPECT_EQ(read_bytes(ra.final_checkpoint), read_bytes(rb.final_checkpoint));
    EXPECT_EQ(read_bytes((dir_a / "manifest.json").string()),
              read_bytes((dir_b / "manifest.json").string()));
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
}

TEST(Runner, ConservedSeriesAndManifestWritten) {
    RunConfig c = small_gkdv_run();
    auto dir = temp_dir("outputs");
    Runner r(c, dir.string());
    auto res = r.run();
    EXPECT_LT(res.mass_drift, 1e-10);
    EXPECT_LT(res.energy_drift, 1e-8);
    EXPECT_TRUE(std::filesystem::exists(dir / "conserved.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "manifest.json"));
    // every CSV carries the run id of its manifest
    std::ifstream csv(dir / "conserved.csv");
    std::string first;
    std::getline(csv, first);
    std::ifstream mf(dir / "manifest.json");
    nlohmann::json manifest;
    mf >> manifest;
    EXPECT_NE(first.find(manifest["run_id"].get<std::string>()), std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST(Runner, XiSeriesOnZkRun) {
    RunConfig c;
    c.eq = {Equation::zk, 2};
    c.dim = 2;
    c.n = {256, 256, 1};
    c.box = {80.0, 80.0, 0};
    c.t_start = 10.0;
    c.t_end = 10.05;
    c.dt = 5e-3;
    c.ic_kind = IcKind::gaussian;
    c.ic_amplitude = 0.4;
    c.ic_width = 3.0;
    c.diag_every = 5;
    c.region = {.b = 0.3, .r = 1.0, .q = 1.5};
    c.weights = {1.0, 1.0, 1.0};
    c.diag_xi = true;
    c.diag_local_mass = true;
    auto dir = temp_dir("xi");
    Runner r(c, dir.string());
    auto res = r.run();
    (void)res;
    EXPECT_TRUE(std::filesystem::exists(dir / "xi.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "local_mass.csv"));
    std::ifstream mf(dir / "manifest.json");
    nlohmann::json manifest;
    mf >> manifest;
    EXPECT_EQ(manifest["results"]["xi_bound_violations"].get<int>(), 0);
    std::filesystem::remove_all(dir);
}
