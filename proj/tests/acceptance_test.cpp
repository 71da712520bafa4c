// Acceptance suite: every criterion runs once (they share the long
// trajectories) and each test asserts one criterion, so failures are
// attributable line by line.
#include "zklab/acceptance.hpp"

#include <gtest/gtest.h>

using zklab::accept::CriterionResult;
using zklab::accept::Suite;

class Acceptance : public ::testing::Test {
  protected:
    static void SetUpTestSuite() {
        suite_ = new Suite("acceptance_out");
        results_ = suite_->run_all();
        suite_->write_report(results_);
    }
    static void TearDownTestSuite() {
        delete suite_;
        suite_ = nullptr;
    }
    static const CriterionResult& get(int id) {
        for (const auto& r : results_)
            if (r.id == id) return r;
        throw std::logic_error("unknown criterion");
    }
    static Suite* suite_;
    static std::vector<CriterionResult> results_;
};

Suite* Acceptance::suite_ = nullptr;
std::vector<CriterionResult> Acceptance::results_;

TEST_F(Acceptance, C01_WeightCertification) {
    const auto& r = get(1);
    EXPECT_TRUE(r.pass) << r.detail;
    EXPECT_LT(r.seconds, 1.0);
}

TEST_F(Acceptance, C02_ReducedSystemOracle) {
    const auto& r = get(2);
    EXPECT_TRUE(r.pass) << r.detail;
    EXPECT_LT(r.seconds, 10.0);
}

TEST_F(Acceptance, C03_RegionLimits) { EXPECT_TRUE(get(3).pass) << get(3).detail; }

TEST_F(Acceptance, C04_Conservation) { EXPECT_TRUE(get(4).pass) << get(4).detail; }

TEST_F(Acceptance, C05_SolitonFidelity) { EXPECT_TRUE(get(5).pass) << get(5).detail; }

TEST_F(Acceptance, C06_XiBoundedness) { EXPECT_TRUE(get(6).pass) << get(6).detail; }

TEST_F(Acceptance, C07_DecayAccumulator) { EXPECT_TRUE(get(7).pass) << get(7).detail; }

TEST_F(Acceptance, C08_FarRegionIdentity) { EXPECT_TRUE(get(8).pass) << get(8).detail; }

TEST_F(Acceptance, C09_TimeSequence) { EXPECT_TRUE(get(9).pass) << get(9).detail; }

TEST_F(Acceptance, C10_Determinism) { EXPECT_TRUE(get(10).pass) << get(10).detail; }
