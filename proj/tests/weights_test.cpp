#include "zklab/weights.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace zklab;
using namespace zklab::weights;

namespace {

// Independent quadrature oracle: adaptive Simpson, nothing shared with the
// Gauss-Legendre rule inside the library.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double integrate_oracle(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 24);
}

}  // namespace

TEST(Weights, PhiPlateauAndTail) {
    EXPECT_DOUBLE_EQ(phi(0.5), 1.0);
    EXPECT_DOUBLE_EQ(phi(0.0), 1.0);
    EXPECT_DOUBLE_EQ(phi(3.0), std::exp(-3.0));
    EXPECT_DOUBLE_EQ(phi(-3.0), std::exp(-3.0));
}

TEST(Weights, PhiEnvelope) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 40.0);
    for (int i = 0; i < 20000; ++i) {
        const double x = u(rng);
        const double p = phi(x);
        const double e = std::exp(-x);
        EXPECT_GE(p, e - 1e-15) << "x=" << x;
        EXPECT_LE(p, 3.0 * e + 1e-15) << "x=" << x;
        EXPECT_LE(phi_d1(x), 1e-15) << "x=" << x;
        EXPECT_DOUBLE_EQ(p, phi(-x));
    }
}

TEST(Weights, PhiJetMatchesFiniteDifferences) {
    const double h = 1e-5;
    for (double x : {1.05, 1.1, 1.15, 1.2, 2.5}) {
        const Jet j = phi_jet(x);
        const double fd1 = (phi(x + h) - phi(x - h)) / (2 * h);
        const double fd2 = (phi(x + h) - 2 * phi(x) + phi(x - h)) / (h * h);
        EXPECT_NEAR(j.d1, fd1, 1e-6 * std::max(1.0, std::abs(fd1)));
        EXPECT_NEAR(j.d2, fd2, 1e-4 * std::max(1.0, std::abs(fd2)));
    }
    // third derivative against a wider FD stencil, in the smooth tail
    const double x = 3.0, h3 = 1e-3;
    const double fd3 =
        (phi(x + 2 * h3) - 2 * phi(x + h3) + 2 * phi(x - h3) - phi(x - 2 * h3)) / (2 * h3 * h3 * h3);
    EXPECT_NEAR(phi_d3(x), fd3, 1e-6);
}

TEST(Weights, PsiLinearOnCore) {
    EXPECT_NEAR(psi_sigma(2.0, 0.6), 0.6, 1e-15);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double sigma : {0.5, 1.0, 3.0}) {
        for (int i = 0; i < 2000; ++i) {
            const double x = sigma * u(rng);
            EXPECT_NEAR(psi_sigma(sigma, x), x, 1e-14 * std::max(1.0, std::abs(x)));
        }
    }
}

TEST(Weights, PsiOddAndBounded) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    for (int i = 0; i < 5000; ++i) {
        const double x = u(rng);
        EXPECT_DOUBLE_EQ(psi(x), -psi(-x));
        EXPECT_LE(std::abs(psi(x)), 3.0);
        EXPECT_LE(std::abs(psi_sigma(2.5, x)), 3.0 * 2.5);
    }
    EXPECT_LE(psi_sup(), 3.0);
    EXPECT_GT(psi_sup(), 1.0);
}

TEST(Weights, PsiTailMatchesQuadratureOracle) {
    // psi(10) computed independently by adaptive Simpson on phi
    const double oracle = integrate_oracle([](double s) { return phi(s); }, 0.0, 10.0);
    const double val = psi_sigma(1.0, 10.0);
    EXPECT_GT(val, 0.0);
    EXPECT_LE(val, 3.0);
    EXPECT_NEAR(val, oracle, 1e-12);
}

TEST(Weights, PhiNormsMatchQuadratureOracle) {
    const double l2 = integrate_oracle([](double s) { double p = phi(s); return p * p; }, -40.0, 40.0);
    EXPECT_NEAR(phi_l2() * phi_l2(), l2, 1e-10);
    const double l1 = integrate_oracle([](double s) { return phi(s); }, -40.0, 40.0);
    EXPECT_NEAR(phi_l1(), l1, 1e-10);
}

TEST(Weights, PsiDerivativeIsPhiScaled) {
    for (double sigma : {0.7, 2.0}) {
        for (double x : {-3.0, -1.2, 0.4, 1.05, 2.4, 7.0}) {
            EXPECT_DOUBLE_EQ(psi_sigma_d(sigma, x, 1), phi_delta(sigma, x));
            const double h = 1e-4;
            const double fd = (psi_sigma(sigma, x + h) - psi_sigma(sigma, x - h)) / (2 * h);
            EXPECT_NEAR(fd, phi_delta(sigma, x), 20 * h * h + 1e-12);
        }
    }
}

TEST(Weights, PsiFiniteDifferenceOrder) {
    // central differences of psi_sigma converge to phi_sigma at order >= 1.9
    const double sigma = 1.0, x = 1.1;
    auto err = [&](double h) {
        return std::abs((psi_sigma(sigma, x + h) - psi_sigma(sigma, x - h)) / (2 * h) -
                        phi_delta(sigma, x));
    };
    const double e1 = err(1e-2), e2 = err(5e-3);
    ASSERT_GT(e1, 1e-12);
    EXPECT_GE(std::log2(e1 / e2), 1.9);
}

TEST(Weights, RejectsBadScales) {
    EXPECT_THROW(psi_sigma(0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(psi_sigma(-1.0, 1.0), std::invalid_argument);
    EXPECT_THROW(phi_delta(std::nan(""), 1.0), std::invalid_argument);
}

TEST(Weights, ChiSupportAndRange) {
    EXPECT_DOUBLE_EQ(chi(-2.0), 1.0);
    EXPECT_DOUBLE_EQ(chi(-1.0), 1.0);
    EXPECT_DOUBLE_EQ(chi(0.5), 0.0);
    EXPECT_DOUBLE_EQ(chi(0.0), 0.0);
    double prev = chi(-3.0);
    for (int i = 1; i <= 4000; ++i) {
        const double x = -3.0 + 6.0 * i / 4000;
        const double c = chi(x);
        EXPECT_LE(c, prev + 1e-15);
        EXPECT_GE(c, 0.0);
        EXPECT_LE(c, 1.0);
        EXPECT_LE(chi_prime(x), 0.0);
        if (x <= -1.0 || x >= 0.0) EXPECT_NEAR(c * (1.0 - c), 0.0, 1e-30);
        prev = c;
    }
}

TEST(Weights, ChiLowerBoundConstant) {
    // dense scan fixes c0; the reported constant is the floor of -chi' there
    double scan_max = 0, scan_min = 1e300;
    for (int i = 0; i <= 100000; ++i) {
        const double x = -0.75 + 0.5 * i / 100000;
        scan_max = std::max(scan_max, -chi_prime(x));
        scan_min = std::min(scan_min, -chi_prime(x));
    }
    const double c0 = measured_chi_c0();
    EXPECT_GT(c0, 0.0);
    EXPECT_GE(scan_max, c0);
    EXPECT_NEAR(scan_min, c0, 1e-6 * c0);
    // chi' is the exact derivative of chi
    for (double x : {-0.9, -0.6, -0.3, -0.1}) {
        const double h = 1e-5;
        EXPECT_NEAR(chi_prime(x), (chi(x + h) - chi(x - h)) / (2 * h), 1e-5);
    }
}

TEST(Weights, VerifyProfileIsClean) {
    const auto rep = verify_profile(1.0, -50.0, 50.0, 10000);
    for (const auto& c : rep.checks) {
        EXPECT_LE(c.max_violation, 1e-13) << c.invariant;
    }
    EXPECT_TRUE(rep.clean());
    EXPECT_GT(measured_phi_c(), 0.0);
    EXPECT_TRUE(std::isfinite(measured_phi_c()));
}
