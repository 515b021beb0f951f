#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "lwmy/distributions.hpp"
#include "lwmy/lwmy_functions.hpp"
#include "lwmy/numerics.hpp"

using namespace lwmy;

namespace {

// Parameter grid exercised by the normalization / sampler hygiene suites.
std::vector<DistributionSpec> documented_grid() {
    std::vector<DistributionSpec> specs = {
        make_gig(0.5, 1, 1),
        make_gig(1.3, 2, 0.7),
        make_gig(2, 1, 3),
        make_gig(-1, 1, 1),
        make_gig(-0.5, 2, 1),
        make_gamma(1, 1),
        make_gamma(0.5, 1),
        make_gamma(2, 0.5),
        make_gamma(3, 2),
        make_gamma(1.5, 1.5),
        make_beta(1, 1),
        make_beta(0.5, 0.5),
        make_beta(2, 3),
        make_beta(3, 1.5),
        make_beta(5, 2),
        make_kummer2(1, 0, 1),
        make_kummer2(2, 1, 1),
        make_kummer2(3, -1, 1),
        make_kummer2(0.7, 2, 0.5),
        make_kummer2(2, -2.5, 1),
        make_beta_alpha(2, 2, 3, 0),
        make_beta_alpha(0.5, 1.5, 1, -1),
        make_beta_alpha(2, 3, 1.5, -2.5),
        make_beta_alpha(3, 2.5, 2, -3),
        make_beta_alpha(1.7, 2, 2, 1.2),
        image_law(make_beta(2, 1), ImageMap::neg_log()),
        image_law(make_kummer2(3, -1, 1), ImageMap::lwmy(LwmyFunctionSpec::g1(1, 1))),
        image_law(make_beta_alpha(2, 3, 1.5, -2.5), ImageMap::neg_log()),
        image_law(make_beta_alpha(2, 2.5, 2, -3), ImageMap::neg_log()),
        image_law(make_gig(0.5, 1, 1), ImageMap::lwmy(LwmyFunctionSpec::reciprocal(1))),
        image_law(make_beta(1.5, 1), ImageMap::neg_log()),
    };
    return specs;
}

double pdf_at(const DistributionSpec& s, double x) { return std::exp(log_pdf(s, x)); }

double mean_by_quadrature(const DistributionSpec& s) {
    auto f = [&s](double x) {
        const double lp = log_pdf(s, x);
        return lp < -700.0 ? 0.0 : x * std::exp(lp);
    };
    return integrate(f, support(s), 1e-11).value;
}

}  // namespace

TEST_CASE("log_pdf point values and off-support behaviour") {
    CHECK(log_pdf(make_gamma(1, 1), 2.0) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(log_pdf(make_beta(1, 1), 0.3) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(log_pdf(make_gamma(1, 1), -1.0) == -kInf);
    CHECK(log_pdf(make_beta(2, 2), 0.0) == -kInf);
    CHECK(log_pdf(make_beta(2, 2), 1.0) == -kInf);
    CHECK(log_pdf(make_beta(2, 2), 1.5) == -kInf);
    CHECK(std::isfinite(log_pdf(make_kummer2(2, -2.5, 1), 3.0)));
}

TEST_CASE("beta_alpha with c = 0 collapses to beta exactly") {
    const auto ba = make_beta_alpha(2, 2, 3, 0);
    const auto be = make_beta(2, 3);
    for (double x : {0.01, 0.2, 0.5, 0.77, 0.99}) {
        CHECK(std::abs(log_pdf(ba, x) - log_pdf(be, x)) <= 1e-14 * std::abs(log_pdf(be, x)));
    }
}

TEST_CASE("normalizing constants against closed-form oracles") {
    // GIG: C = (b/a)^mu / (2 K_mu(ab))
    for (const auto& [mu, a, b] :
         std::vector<std::array<double, 3>>{{0.5, 1, 1}, {1.3, 2, 0.7}, {2, 1, 3}, {-1, 1, 1}}) {
        const double closed =
            std::exp(mu * std::log(b / a) - std::log(2.0) - log_bessel_k(mu, a * b));
        const double numeric = normalizing_constant(make_gig(mu, a, b));
        CHECK(std::abs(numeric - closed) <= 1e-10 * closed);
    }
    // Kummer2(1,0,1): C = 1 / (e E1(1))
    CHECK(normalizing_constant(make_kummer2(1, 0, 1)) ==
          doctest::Approx(1.0 / 0.596347362323194).epsilon(1e-10));
    // BetaAlpha(alpha,a,b,0) = Beta constant Gamma(a+b)/(Gamma(a)Gamma(b))
    const double beta_const =
        std::exp(log_gamma_fn(5.0) - log_gamma_fn(2.0) - log_gamma_fn(3.0));
    CHECK(normalizing_constant(make_beta_alpha(7, 2, 3, 0)) ==
          doctest::Approx(beta_const).epsilon(1e-10));
    // gamma: c^shape / Gamma(shape)
    CHECK(normalizing_constant(make_gamma(2.5, 1.5)) ==
          doctest::Approx(std::exp(2.5 * std::log(1.5) - log_gamma_fn(2.5))).epsilon(1e-10));
    CHECK_THROWS_AS(make_kummer2(-1, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_kummer2(1, 0, -1), std::invalid_argument);
    CHECK_THROWS_AS(make_gamma(0, 1), std::invalid_argument);
}

TEST_CASE("every documented spec integrates to one") {
    for (const auto& s : documented_grid()) {
        auto f = [&s](double x) { return pdf_at(s, x); };
        const QuadratureResult r = integrate(f, support(s), 1e-10);
        CHECK(std::abs(r.value - 1.0) <= 1e-8);
    }
}

TEST_CASE("cdf basics") {
    CHECK(cdf(make_gamma(1, 1), std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(cdf(make_beta(1, 1), 0.25) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(cdf(make_gamma(1, 1), 0.0) == 0.0);
    CHECK(cdf(make_gamma(1, 1), 1e9) == doctest::Approx(1.0).epsilon(1e-8));
    // median of Kummer2(2,1,1) located by bisection, then checked
    const auto k = make_kummer2(2, 1, 1);
    const double med = quantile(k, 0.5);
    CHECK(cdf(k, med) == doctest::Approx(0.5).epsilon(1e-8));
    // monotone
    const auto g = make_gig(1.3, 2, 0.7);
    double prev = -1.0;
    for (double x = 0.05; x < 12.0; x += 0.25) {
        const double c = cdf(g, x);
        CHECK(c >= prev);
        prev = c;
    }
}

TEST_CASE("cdf_many agrees with pointwise cdf") {
    const auto s = make_gig(0.5, 1, 1);
    std::vector<double> xs;
    for (int i = 1; i <= 60; ++i) xs.push_back(0.05 * i);
    const auto many = cdf_many(s, xs);
    for (std::size_t i = 0; i < xs.size(); i += 7) {
        CHECK(many[i] == doctest::Approx(cdf(s, xs[i])).epsilon(1e-9));
    }
    // off-support clamping
    const auto b = make_beta(2, 3);
    std::vector<double> ys = {-0.5, 0.25, 0.5, 1.0, 2.0};
    const auto out = cdf_many(b, ys);
    CHECK(out.front() == 0.0);
    CHECK(out.back() == 1.0);
    CHECK(out[1] == doctest::Approx(cdf(b, 0.25)).epsilon(1e-10));
}

TEST_CASE("image laws: change of variables") {
    // Beta(a,b) under z -> -log z has density C (1-e^{-y})^{b-1} e^{-ay}
    const double a = 2.0, b = 3.0;
    const auto img = image_law(make_beta(a, b), ImageMap::neg_log());
    const double logc = log_gamma_fn(a + b) - log_gamma_fn(a) - log_gamma_fn(b);
    for (double y : {0.1, 0.5, 1.0, 2.5}) {
        const double want = logc + (b - 1.0) * std::log(-std::expm1(-y)) - a * y;
        CHECK(log_pdf(img, y) == doctest::Approx(want).epsilon(1e-12));
    }
    // GIG(mu,a,b) under x -> 1/x is GIG(-mu,b,a), pointwise
    const auto gig_img =
        image_law(make_gig(1.3, 2, 0.7), ImageMap::lwmy(LwmyFunctionSpec::reciprocal(1)));
    const auto gig_swap = make_gig(-1.3, 0.7, 2);
    for (double x : {0.2, 0.7, 1.9, 6.0}) {
        CHECK(log_pdf(gig_img, x) == doctest::Approx(log_pdf(gig_swap, x)).epsilon(1e-10));
    }
    // Kummer2(a+b,-b,c) under g1 matches the explicit density
    // C e^{-(a+b)x} (1-e^{-x})^{-b-1} exp(-c e^{-x}/(1-e^{-x}))
    const double aa = 2.0, bb = 1.0, cc = 1.0;
    const auto xlaw =
        image_law(make_kummer2(aa + bb, -bb, cc), ImageMap::lwmy(LwmyFunctionSpec::g1(1, 1)));
    const double logk = std::log(normalizing_constant(make_kummer2(aa + bb, -bb, cc)));
    for (double x : {0.3, 0.8, 1.7, 3.0}) {
        const double omx = -std::expm1(-x);
        const double want = logk - (aa + bb) * x - (bb + 1.0) * std::log(omx) -
                            cc * std::exp(-x) / omx;
        CHECK(log_pdf(xlaw, x) == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("log_pdf_derivs: closed forms match finite differences") {
    std::vector<DistributionSpec> specs = {
        make_gig(-1, 1, 2),
        make_gamma(2, 0.5),
        make_beta(2, 3),
        make_kummer2(2, 1, 1),
        make_beta_alpha(2, 3, 1.5, -2.5),
        image_law(make_beta(2, 1), ImageMap::neg_log()),
        image_law(make_kummer2(3, -1, 1), ImageMap::lwmy(LwmyFunctionSpec::g1(1, 1))),
    };
    for (const auto& s : specs) {
        const Interval sup = support(s);
        const double hi = std::isinf(sup.hi) ? 3.0 : 0.9;
        for (double x = 0.15; x < hi; x += 0.35) {
            const auto cf = log_pdf_derivs(s, x);
            const auto fd = log_pdf_derivs_fd(s, x);
            CHECK(cf.d1 == doctest::Approx(fd.d1).epsilon(1e-6));
            CHECK(cf.d2 == doctest::Approx(fd.d2).epsilon(1e-5));
        }
    }
}

TEST_CASE("sampler determinism and batch metadata") {
    const auto s = make_gig(0.5, 1, 1);
    RngStream r1(7, 3), r2(7, 3);
    const auto b1 = sample(s, 500, r1);
    const auto b2 = sample(s, 500, r2);
    CHECK(b1.values == b2.values);
    CHECK(b1.seed == 7);
    CHECK(b1.stream_id == 3);
    CHECK(b1.acceptance_rate > 0.0);
    CHECK(b1.acceptance_rate <= 1.0);
    for (double v : b1.values) CHECK(v > 0.0);

    RngStream r3(7, 4);
    CHECK(sample(s, 500, r3).values != b1.values);
}

TEST_CASE("sampler moments against quadrature means") {
    RngStream rng(2025, 0);
    const long n = 200000;
    std::vector<DistributionSpec> specs = {
        make_gamma(1, 1),        make_gamma(0.5, 2), make_beta(2, 3),
        make_gig(0.5, 1, 1),     make_gig(-1, 1, 1), make_kummer2(2, 1, 1),
        make_kummer2(2, -2.5, 1), make_beta_alpha(2, 3, 1.5, -2.5),
    };
    for (const auto& s : specs) {
        const auto batch = sample(s, n, rng);
        const double mean =
            std::accumulate(batch.values.begin(), batch.values.end(), 0.0) / n;
        double var = 0.0;
        for (double v : batch.values) var += (v - mean) * (v - mean);
        var /= n;
        const double want = mean_by_quadrature(s);
        // 6-sigma band around the quadrature mean
        CHECK(std::abs(mean - want) <= 6.0 * std::sqrt(var / n) + 1e-12);
    }
}

TEST_CASE("gig sampler acceptance rate on the documented grid") {
    RngStream rng(11, 0);
    for (const auto& [mu, a, b] :
         std::vector<std::array<double, 3>>{{0.5, 1, 1}, {1.3, 2, 0.7}, {2, 1, 3}}) {
        const auto batch = sample(make_gig(mu, a, b), 20000, rng);
        CHECK(batch.acceptance_rate > 0.1);
    }
}

TEST_CASE("gamma mean example at n = 1e5") {
    RngStream rng(5, 0);
    const auto batch = sample(make_gamma(1, 1), 100000, rng);
    const double mean =
        std::accumulate(batch.values.begin(), batch.values.end(), 0.0) / batch.values.size();
    CHECK(std::abs(mean - 1.0) < 4.0 * std::sqrt(1.0 / 100000.0));
}

TEST_CASE("image sampling is the pushforward of base sampling") {
    const auto base = make_beta(2, 1);
    const auto img = image_law(base, ImageMap::neg_log());
    RngStream r1(3, 0), r2(3, 0);
    const auto bb = sample(base, 100, r1);
    const auto bi = sample(img, 100, r2);
    for (std::size_t i = 0; i < 100; ++i) {
        CHECK(bi.values[i] == doctest::Approx(-std::log(bb.values[i])).epsilon(1e-15));
    }
}

TEST_CASE("quantile matches cdf inverse") {
    for (const auto& s : {make_gamma(2, 1), make_beta(2, 3), make_gig(0.5, 1, 1)}) {
        for (double p : {0.02, 0.25, 0.5, 0.8, 0.98}) {
            const double q = quantile(s, p);
            CHECK(cdf(s, q) == doctest::Approx(p).epsilon(1e-8));
        }
    }
    CHECK(quantile(make_gamma(1, 1), 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("batch serialization") {
    RngStream rng(42, 0);
    auto batch = sample(make_gamma(1, 1), 10, rng);
    std::ostringstream os;
    batch.write_csv(os);
    const std::string csv = os.str();
    CHECK(csv.find("# spec=gamma(1,1) seed=42 stream=0 n=10") == 0);
    int lines = 0;
    for (char ch : csv)
        if (ch == '\n') ++lines;
    CHECK(lines == 11);

    const std::string js = batch.to_json();
    CHECK(js.find("\"spec\":\"gamma(1,1)\"") != std::string::npos);
    CHECK(js.find("\"acceptance_rate\"") != std::string::npos);
    const std::string js_small = batch.to_json(false);
    CHECK(js_small.find("\"values\"") == std::string::npos);
}
