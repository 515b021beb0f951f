#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "lwmy/series_lab.hpp"

using namespace lwmy;

namespace {

// Direct Taylor expansion of (a2^2/(6 a4)) (cosh(x sqrt(12 a4/a2)) - 1):
// even coefficient of x^{2k} is (12 a4/a2)^{k-1} * 2 a2 / (2k)!.
double cosh_profile_coefficient(double a2, double a4, int two_k) {
    const int k = two_k / 2;
    double fact = 1.0;
    for (int i = 2; i <= two_k; ++i) fact *= i;
    return std::pow(12.0 * a4 / a2, k - 1) * 2.0 * a2 / fact;
}

CoefficientTable table_for(const LwmyFunctionSpec& fn, int n_max) {
    const auto a = big_f_taylor(fn);
    return extend_coefficients({a[0], a[1], a[2], a[3]}, n_max);
}

}  // namespace

TEST_CASE("extend_coefficients: the three seeded profiles") {
    // pure quadratic
    const auto quad = extend_coefficients({0, 1, 0, 0}, 20);
    for (int k = 3; k <= 20; ++k) CHECK(quad.at(k) == 0.0);

    // cosh profile from seed (0,1,0,1); oracle is the direct series expansion
    const auto cosh_t = extend_coefficients({0, 1, 0, 1}, 30);
    CHECK(cosh_t.at(6) == doctest::Approx(0.4).epsilon(1e-14));
    for (int k = 1; 2 * k <= 30; ++k) {
        CHECK(cosh_t.at(2 * k) ==
              doctest::Approx(cosh_profile_coefficient(1.0, 1.0, 2 * k)).epsilon(1e-13));
        if (2 * k + 1 <= 30) CHECK(cosh_t.at(2 * k + 1) == 0.0);
    }

    // linear-quadratic: every later coefficient vanishes
    const auto lin = extend_coefficients({1, 1, 0, 0}, 20);
    for (int k = 3; k <= 20; ++k) CHECK(lin.at(k) == 0.0);

    CHECK(cosh_t.seeded_prefix == 4);
    CHECK(cosh_t.n_max == 30);
}

TEST_CASE("extend_coefficients: closed form for the even branch is exact") {
    const double a2 = -1.5, a4 = -0.3;
    const auto t = extend_coefficients({0, a2, 0, a4}, 30);
    for (int k = 1; k <= 15; ++k) {
        const double want = cosh_profile_coefficient(a2, a4, 2 * k);
        CHECK(t.at(2 * k) == doctest::Approx(want).epsilon(1e-15));
    }
}

TEST_CASE("extend_coefficients: invalid and inconsistent seeds") {
    CHECK_THROWS_AS(extend_coefficients({0, 0, 1, 1}, 10), std::invalid_argument);
    CHECK_THROWS_AS(extend_coefficients({0, 1, 0.5, 0}, 10), InconsistentSeriesError);
    // a1 != 0 pins a4 = a2 a3 / (2 a1); violate it
    CHECK_THROWS_AS(extend_coefficients({1, 1, 1, 0}, 10), InconsistentSeriesError);
    CHECK_THROWS_AS(extend_coefficients({1, 1, 1, 1}, 10), InconsistentSeriesError);
    CHECK_NOTHROW(extend_coefficients({1, 1, 1, 0.5}, 10));
    CHECK_THROWS_AS(extend_coefficients({0, 1, 0, 1}, 3), std::invalid_argument);
}

TEST_CASE("classify: named profiles") {
    // F = -x^2 -> reciprocal with alpha = 1
    const auto rec = classify(extend_coefficients({0, -1, 0, 0}, 10));
    CHECK(rec.branch == ClassificationOutcome::Branch::QuadraticA2x2);
    CHECK(rec.matched_family.family == LwmyFamily::Reciprocal);
    CHECK(rec.matched_family.alpha == doctest::Approx(1.0).epsilon(1e-14));

    // F = -2(cosh x - 1) -> f1 family at unit scales
    const auto f1 = classify(table_for(LwmyFunctionSpec::f1(1, 1), 12));
    CHECK(f1.branch == ClassificationOutcome::Branch::CoshBranch);
    CHECK(f1.matched_family.family == LwmyFamily::F1);
    CHECK(f1.matched_family.alpha == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f1.matched_family.beta == doctest::Approx(1.0).epsilon(1e-12));

    // F = -(x + x^2) -> g1 at unit scales
    const auto g1 = classify(extend_coefficients({-1, -1, 0, 0}, 10));
    CHECK(g1.branch == ClassificationOutcome::Branch::LinearQuadratic);
    CHECK(g1.matched_family.family == LwmyFamily::G1);
    CHECK(g1.matched_family.alpha == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g1.matched_family.beta == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("classify: round trip across all four families with random scales") {
    const std::vector<LwmyFunctionSpec> specs = {
        LwmyFunctionSpec::reciprocal(0.7),
        LwmyFunctionSpec::reciprocal(2.3),
        LwmyFunctionSpec::f1(1.7, 0.6),
        LwmyFunctionSpec::f1(0.4, 2.2),
        LwmyFunctionSpec::g1(1.9, 1.3),
        LwmyFunctionSpec::g1(0.8, 0.5),
        LwmyFunctionSpec::f_delta_star(0.7, 1.1, 1.6),
        LwmyFunctionSpec::f_delta_star(2.0, 0.9, 0.8),
        LwmyFunctionSpec::f_delta_star(3.5, 1.5, 1.2),
        LwmyFunctionSpec::f_delta_star(1.0, 2.0, 0.4),
    };
    for (const auto& fn : specs) {
        const auto out = classify(table_for(fn, 12));
        CHECK(out.matched_family.family == fn.family);
        CHECK(out.matched_family.alpha == doctest::Approx(fn.alpha).epsilon(1e-8));
        if (fn.family != LwmyFamily::Reciprocal)
            CHECK(out.matched_family.beta == doctest::Approx(fn.beta).epsilon(1e-8));
        if (fn.family == LwmyFamily::FDeltaStar)
            CHECK(out.matched_family.delta == doctest::Approx(fn.delta).epsilon(1e-8));
    }
}

TEST_CASE("classify: sign conditions exclude impossible profiles") {
    // cosine case: a1 = 0, a2 < 0, a4 > 0 would vanish at a positive point
    CHECK_THROWS_AS(classify(extend_coefficients({0, -1, 0, 1}, 10)), ClassificationError);
    // positive near zero
    CHECK_THROWS_AS(classify(extend_coefficients({0, 1, 0, 0}, 10)), ClassificationError);
    CHECK_THROWS_AS(classify(extend_coefficients({1, 1, 0, 0}, 10)), ClassificationError);
    // trigonometric: a1 a3 < 0
    CHECK_THROWS_AS(classify(extend_coefficients({-1, 1, 0.5, -0.25}, 10)), ClassificationError);
    // eventually positive: a1 < 0 but a2 > 0, a3 = 0
    CHECK_THROWS_AS(classify(extend_coefficients({-1, 1, 0, 0}, 10)), ClassificationError);
    // pure linear
    CHECK_THROWS_AS(classify(extend_coefficients({-1, 0, 0, 0}, 10)), ClassificationError);
}

TEST_CASE("verify_comb20: recurrence tables satisfy the parent identity") {
    const auto cosh_t = extend_coefficients({0, 1, 0, 1}, 20);
    CHECK(verify_comb20(cosh_t, 8, 8) < 1e-10);

    const auto lin = extend_coefficients({1, 1, 0, 0}, 20);
    CHECK(verify_comb20(lin, 8, 8) < 1e-14);

    const auto fd = table_for(LwmyFunctionSpec::f_delta_star(2.5, 1.3, 0.9), 24);
    CHECK(verify_comb20(fd, 8, 8) < 1e-10);

    // corruption control
    auto corrupted = extend_coefficients({0, 1, 0, 1}, 20);
    corrupted.a[5] += 1e-3;
    CHECK(verify_comb20(corrupted, 8, 8) > 1e-4);

    CHECK_THROWS_AS(verify_comb20(cosh_t, 12, 12), std::invalid_argument);
}

TEST_CASE("delay_residual: algebraic identity, classified profiles, cubic control") {
    // F(x) = x^2 satisfies the identity exactly
    ProfileF sq;
    sq.value = [](double x) { return x * x; };
    sq.deriv = [](double x) { return 2.0 * x; };
    sq.deriv_at_zero = 0.0;
    CHECK(delay_residual(sq, 1.7, 0.4) == doctest::Approx(0.0).epsilon(1e-15));

    const std::vector<LwmyFunctionSpec> specs = {
        LwmyFunctionSpec::reciprocal(1.4),
        LwmyFunctionSpec::f1(1.0, 1.0),
        LwmyFunctionSpec::g1(0.8, 1.7),
        LwmyFunctionSpec::f_delta_star(2.5, 1.2, 0.6),
    };
    for (const auto& fn : specs) {
        const auto prof = profile_from_spec(fn);
        for (double x = 0.1; x <= 5.0; x += 0.7) {
            for (double y = 0.1; y <= 5.0; y += 0.7) {
                const double res = delay_residual(prof, x, y);
                const double scl = std::max(1.0, std::abs(prof.deriv(x + y)));
                CHECK(std::abs(res) <= 1e-9 * scl);
            }
        }
    }

    // cubic control: F = x^3 at (1,1): F'(2)=12, rhs = (3/1)(8-1) - 3 = 18
    ProfileF cube;
    cube.value = [](double x) { return x * x * x; };
    cube.deriv = [](double x) { return 3.0 * x * x; };
    cube.deriv_at_zero = 0.0;
    const double res = delay_residual(cube, 1.0, 1.0);
    CHECK(res == doctest::Approx(-6.0).epsilon(1e-14));
    CHECK(std::abs(res) > 1.0);
}

TEST_CASE("solve_h: reciprocal profile reproduces the gamma log-density slope") {
    // F = a2 y^2 with F'(0+) = 0: h(y) = (mu-1)/y - b^2/2 solves the equation
    // with lambda0 = (mu-1) when a2 = -1.
    const double mu = 2.0, b2 = 2.25;
    auto F = [](double y) { return -y * y; };
    auto target = [mu, b2](double y) { return (mu - 1.0) / y - 0.5 * b2; };
    const auto sol = solve_h(F, mu - 1.0, 0.0, Interval{0.5, 3.0}, target(0.5));
    for (double y = 0.5; y <= 3.0; y += 0.123) {
        CHECK(std::abs(sol(y) - target(y)) < 1e-6);
    }
}

TEST_CASE("solve_h: cosh profile reproduces the log-density slope of the image law") {
    // F = -2(cosh y - 1), lambda0 = b-1: h(y) = (b-1) e^{-y}/(1-e^{-y}) - a
    const double a = 2.0, b = 3.0;
    auto F = [](double y) { return -2.0 * (std::cosh(y) - 1.0); };
    auto target = [a, b](double y) {
        const double e = std::exp(-y);
        return (b - 1.0) * e / (1.0 - e) - a;
    };
    const auto sol = solve_h(F, b - 1.0, 0.0, Interval{0.5, 3.0}, target(0.5));
    for (double y = 0.5; y <= 3.0; y += 0.217) {
        CHECK(std::abs(sol(y) - target(y)) < 1e-6);
    }
}

TEST_CASE("solve_h: nonzero F'(0+) path against the gamma slope") {
    // F = -(y + y^2) with F'(0+) = -1 and lambda0 = b-1+c: h = (b-1)/y - c
    const double b = 2.0, c = 1.0;
    auto F = [](double y) { return -(y + y * y); };
    auto target = [b, c](double y) { return (b - 1.0) / y - c; };
    const auto sol = solve_h(F, b - 1.0 + c, -1.0, Interval{0.5, 3.0}, target(0.5));
    for (double y = 0.5; y <= 3.0; y += 0.31) {
        CHECK(std::abs(sol(y) - target(y)) < 1e-6);
    }
}

TEST_CASE("solve_h: zero right-hand side keeps h constant") {
    auto F = [](double y) { return -y * y; };
    const auto sol = solve_h(F, 0.0, 0.0, Interval{0.5, 3.0}, 4.2);
    for (double y = 0.5; y <= 3.0; y += 0.5) CHECK(sol(y) == doctest::Approx(4.2).epsilon(1e-12));
}

TEST_CASE("serialization: table JSON and classification summary") {
    const auto t = extend_coefficients({0, 1, 0, 1}, 8);
    const std::string js = t.to_json();
    CHECK(js.find("\"seed\":[0.0,1.0,0.0,1.0]") != std::string::npos);
    CHECK(js.find("\"n_max\":8") != std::string::npos);
    CHECK(js.find("0.4") != std::string::npos);  // a6

    const auto out = classify(extend_coefficients({-1, -1, 0, 0}, 8));
    const std::string line = to_string(out);
    CHECK(line.find("branch=linear-quadratic") != std::string::npos);
    CHECK(line.find("family=g1(1,1)") != std::string::npos);
    CHECK(line.find('\n') == std::string::npos);
}
