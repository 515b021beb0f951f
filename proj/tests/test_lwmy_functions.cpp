#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "lwmy/lwmy_functions.hpp"
#include "lwmy/numerics.hpp"

using namespace lwmy;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return g;
}

// Richardson-extrapolated central difference of order `order` of f at x.
double fd_derivative(const LwmyFunctionSpec& fn, double x, int order) {
    auto d1 = [&](double h) {
        switch (order) {
            case 1: return (eval(fn, x + h) - eval(fn, x - h)) / (2 * h);
            case 2: return (eval(fn, x + h) - 2 * eval(fn, x) + eval(fn, x - h)) / (h * h);
            default:
                return (eval(fn, x + 2 * h) - 2 * eval(fn, x + h) + 2 * eval(fn, x - h) -
                        eval(fn, x - 2 * h)) /
                       (2 * h * h * h);
        }
    };
    const double h = 1e-2 * std::max(0.1, x);
    const double a = d1(h), b = d1(h / 2), c = d1(h / 4);
    const double r1 = (4 * b - a) / 3;
    const double r2 = (4 * c - b) / 3;
    return (16.0 / 15.0) * r2 - (1.0 / 15.0) * r1;
}

const std::vector<LwmyFunctionSpec> kAllFamilies = {
    LwmyFunctionSpec::reciprocal(1.0),
    LwmyFunctionSpec::reciprocal(2.5),
    LwmyFunctionSpec::f1(1.0, 1.0),
    LwmyFunctionSpec::f1(0.7, 1.8),
    LwmyFunctionSpec::g1(1.0, 1.0),
    LwmyFunctionSpec::g1(2.0, 0.6),
    LwmyFunctionSpec::f_delta_star(1.0),
    LwmyFunctionSpec::f_delta_star(2.0),
    LwmyFunctionSpec::f_delta_star(3.0, 1.4, 0.9),
};

}  // namespace

TEST_CASE("eval: point values") {
    CHECK(eval(LwmyFunctionSpec::reciprocal(1.0), 2.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(eval(LwmyFunctionSpec::f1(1, 1), std::log(2.0)) == doctest::Approx(1.0).epsilon(1e-14));
    // fixed point of the delta=1 involution
    CHECK(eval(LwmyFunctionSpec::f_delta_star(1.0), std::log(2.0)) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(eval(LwmyFunctionSpec::f1(1, 1), 0.0), std::domain_error);
    CHECK_THROWS_AS(eval(LwmyFunctionSpec::f1(1, 1), -1.0), std::domain_error);
    CHECK_THROWS_AS(eval(LwmyFunctionSpec::f1(1, 1), 1.0, 4), std::invalid_argument);
}

TEST_CASE("derivatives match Richardson finite differences") {
    for (const auto& fn : kAllFamilies) {
        for (double x : log_grid(0.05, 8.0, 9)) {
            for (int order = 1; order <= 3; ++order) {
                const double closed = eval(fn, x, order);
                const double fd = fd_derivative(fn, x, order);
                CHECK(std::abs(closed - fd) <= 1e-7 * std::max(1.0, std::abs(closed)));
            }
            CHECK(eval(fn, x, 1) < 0.0);  // strictly decreasing
        }
    }
}

TEST_CASE("monotonicity of f and its inverse on a grid") {
    for (const auto& fn : kAllFamilies) {
        const auto grid = log_grid(1e-3, 1e2, 40);
        for (std::size_t i = 1; i < grid.size(); ++i) {
            CHECK(eval(fn, grid[i]) < eval(fn, grid[i - 1]));
            CHECK(eval_inverse(fn, grid[i]) < eval_inverse(fn, grid[i - 1]));
        }
    }
}

TEST_CASE("involutions: reciprocal and f-delta-star at unit scales") {
    for (double x : log_grid(1e-3, 1e3, 25)) {
        const auto rec = LwmyFunctionSpec::reciprocal(3.0);
        CHECK(eval(rec, eval(rec, x)) == doctest::Approx(x).epsilon(1e-12));
    }
    // For FDeltaStar the image f(x) ~ delta*e^{-x} leaves double range past
    // x ~ 700, so the involution grid stops where values stay representable.
    for (double delta : {0.5, 1.0, 2.0, 7.0}) {
        const auto fd = LwmyFunctionSpec::f_delta_star(delta);
        for (double x : log_grid(1e-3, 500.0, 25)) {
            CHECK(eval(fd, eval(fd, x)) == doctest::Approx(x).epsilon(1e-12));
        }
    }
}

TEST_CASE("inverse pair: f1 and g1 with matching scales") {
    const auto f = LwmyFunctionSpec::f1(1.3, 0.8);
    const auto g = inverse_spec(f);
    CHECK(g.family == LwmyFamily::G1);
    for (double x : log_grid(1e-2, 50.0, 20)) {
        CHECK(eval_inverse(f, x) == doctest::Approx(eval(g, x)).epsilon(1e-15));
        CHECK(eval(f, eval_inverse(f, x)) == doctest::Approx(x).epsilon(1e-12));
        CHECK(eval_inverse(f, eval(f, x)) == doctest::Approx(x).epsilon(1e-12));
    }
    // named examples
    CHECK(eval_inverse(LwmyFunctionSpec::g1(1, 1), std::log(2.0)) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(eval_inverse(LwmyFunctionSpec::reciprocal(1.0), 4.0) ==
          doctest::Approx(0.25).epsilon(1e-15));
    const auto fd3 = LwmyFunctionSpec::f_delta_star(3.0);
    CHECK(eval_inverse(fd3, eval(fd3, 2.0)) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK_THROWS_AS(eval_inverse(fd3, -1.0), std::domain_error);
}

TEST_CASE("apply_transform: fixed points and domains") {
    const auto t_add = TransformSpec::additive(LwmyFunctionSpec::reciprocal(1.0));
    auto [u, v] = apply_transform(t_add, 1.0, 1.0);
    CHECK(u == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(v == doctest::Approx(0.5).epsilon(1e-15));

    const auto t_mul = TransformSpec::multiplicative(LwmyFunctionSpec::f_delta_star(2.0));
    auto [um, vm] = apply_transform(t_mul, 0.5, 1.0);
    CHECK(um == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(vm == doctest::Approx(1.0).epsilon(1e-13));

    const auto t_uv = TransformSpec::uv_prime_map();
    auto [up, vp] = apply_transform(t_uv, 1.0, 1.0);
    CHECK(up == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(vp == doctest::Approx(2.0).epsilon(1e-15));

    CHECK_THROWS_AS(apply_transform(t_add, -1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(apply_transform(t_mul, 1.5, 0.5), std::domain_error);
}

TEST_CASE("transform round trips") {
    const auto t_uv = TransformSpec::uv_prime_map();
    auto [x0, y0] = apply_inverse_transform(t_uv, 0.75, 2.0);
    CHECK(x0 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(y0 == doctest::Approx(1.0).epsilon(1e-14));

    const auto t_rec = TransformSpec::additive(LwmyFunctionSpec::reciprocal(1.0));
    auto [xr, yr] = apply_inverse_transform(t_rec, 0.5, 0.5);
    CHECK(xr == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(yr == doctest::Approx(1.0).epsilon(1e-14));

    // property: 100 random points through forward-then-inverse for every kind
    RngStream rng(99, 0);
    std::vector<TransformSpec> kinds = {
        TransformSpec::additive(LwmyFunctionSpec::f1(1, 1)),
        TransformSpec::additive(LwmyFunctionSpec::g1(1.5, 0.7)),
        TransformSpec::additive(LwmyFunctionSpec::f_delta_star(2.5)),
        TransformSpec::uv_prime_map(),
        TransformSpec::identity(),
    };
    for (const auto& t : kinds) {
        for (int i = 0; i < 100; ++i) {
            const double x = 0.05 + 5.0 * rng.uniform();
            const double y = 0.05 + 5.0 * rng.uniform();
            auto [uu, vv] = apply_transform(t, x, y);
            auto [xb, yb] = apply_inverse_transform(t, uu, vv);
            CHECK(xb == doctest::Approx(x).epsilon(1e-10));
            CHECK(yb == doctest::Approx(y).epsilon(1e-10));
        }
    }
    // multiplicative round trip on (0,1)^2
    const auto t_mul = TransformSpec::multiplicative(LwmyFunctionSpec::f_delta_star(2.0));
    for (int i = 0; i < 100; ++i) {
        const double x = rng.uniform(), y = rng.uniform();
        auto [uu, vv] = apply_transform(t_mul, x, y);
        auto [xb, yb] = apply_inverse_transform(t_mul, uu, vv);
        CHECK(xb == doctest::Approx(x).epsilon(1e-10));
        CHECK(yb == doctest::Approx(y).epsilon(1e-10));
    }
}

TEST_CASE("bar_conjugate: homographic closed form and conjugation square") {
    const auto fd2 = LwmyFunctionSpec::f_delta_star(2.0);
    const auto fb = bar_conjugate(fd2);
    CHECK(fb(0.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(phi_delta(1.0, 0.25) == doctest::Approx(0.75).epsilon(1e-15));

    for (double delta : {0.5, 1.0, 2.0, 5.0}) {
        const auto fn = LwmyFunctionSpec::f_delta_star(delta);
        const auto conj = bar_conjugate(fn);
        for (int i = 1; i < 40; ++i) {
            const double x = i / 40.0;
            CHECK(std::abs(conj(x) - phi_delta(delta, x)) < 1e-12);
            CHECK(conj(conj(x)) == doctest::Approx(x).epsilon(1e-11));
        }
    }
    // exp{-f(-log x)} agrees with direct composition for every family
    for (const auto& fn : kAllFamilies) {
        const auto conj = bar_conjugate(fn);
        for (int i = 1; i < 20; ++i) {
            const double x = i / 20.0;
            CHECK(conj(x) == doctest::Approx(std::exp(-eval(fn, -std::log(x)))).epsilon(1e-14));
        }
    }
}

TEST_CASE("big_f: closed forms and reciprocal-derivative identity") {
    CHECK(big_f(LwmyFunctionSpec::reciprocal(1.0), 2.0) == doctest::Approx(-4.0).epsilon(1e-14));
    for (double x : log_grid(0.05, 10.0, 15)) {
        CHECK(big_f(LwmyFunctionSpec::f1(1, 1), x) ==
              doctest::Approx(-2.0 * (std::cosh(x) - 1.0)).epsilon(1e-12));
        CHECK(big_f(LwmyFunctionSpec::g1(1, 1), x) == doctest::Approx(-x - x * x).epsilon(1e-12));
        for (const auto& fn : kAllFamilies) {
            CHECK(big_f(fn, x) * eval(fn, x, 1) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(big_f(fn, x) < 0.0);
        }
    }
}

TEST_CASE("big_f_prime and Taylor coefficients are consistent with big_f") {
    for (const auto& fn : kAllFamilies) {
        // F' against central differences of F
        for (double x : log_grid(0.1, 5.0, 8)) {
            const double h = 1e-5 * std::max(1.0, x);
            const double fd = (big_f(fn, x + h) - big_f(fn, x - h)) / (2 * h);
            CHECK(big_f_prime(fn, x) == doctest::Approx(fd).epsilon(1e-8));
        }
        // Taylor: F(x) ~ a1 x + a2 x^2 + a3 x^3 + a4 x^4 near 0
        const auto a = big_f_taylor(fn);
        CHECK(a[0] == doctest::Approx(big_f_prime0(fn)).epsilon(1e-14));
        for (double x : {1e-3, 3e-3}) {
            const double series =
                x * (a[0] + x * (a[1] + x * (a[2] + x * a[3])));
            CHECK(big_f(fn, x) == doctest::Approx(series).epsilon(1e-9));
        }
    }
}
