#include "lwmy/suites.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <thread>

#include <json.hpp>

#include "lwmy/format.hpp"
#include "lwmy/series_lab.hpp"
#include "lwmy/verifier.hpp"

namespace lwmy::suites {

namespace {

constexpr double kLevel = 0.01;  // significance level of every statistical check

struct SuiteMeta {
    std::map<std::string, double> defaults;
    std::set<std::string> optional_keys;  // accepted without a default
    bool statistical = false;             // uses seeds / n / bins
};

const std::map<std::string, SuiteMeta>& registry() {
    static const std::map<std::string, SuiteMeta> meta = {
        {"matsumoto-yor", {{{"mu", 1}, {"a", 1}, {"b", 2}}, {}, true}},
        {"f1-case", {{{"a", 2}, {"b", 1}, {"c", 1}}, {}, true}},
        {"g1-case", {{{"a", 2}, {"b", 1}, {"c", 1}}, {}, true}},
        {"fdelta-case", {{{"a", 2}, {"b", 1}, {"lambda", 1.5}, {"delta", 2}}, {}, true}},
        {"delta1-case", {{{"a", 2}, {"b", 1}, {"lambda", 1.5}}, {}, true}},
        {"gig-convolution", {{{"mu", 1}, {"a", 1}, {"b", 1}}, {}, true}},
        {"kummer-convolution", {{{"a", 2}, {"b", 1}, {"c", 1}}, {}, true}},
        {"pushforward-uvprime", {{{"a", 2}, {"b", 1}, {"c", 1}}, {}, true}},
        {"cns-residual",
         {{{"mu", 1},
           {"gig_a", 1},
           {"gig_b", 2},
           {"a", 2},
           {"b", 1},
           {"c", 1},
           {"lambda", 1.5},
           {"delta", 2},
           {"grid_lo", 0.2},
           {"grid_hi", 3},
           {"grid_points", 25}},
          {},
          false}},
        {"series-classify",
         {{{"alpha", 1}, {"beta", 1}, {"delta", 2}, {"n_max", 12}},
          {"a1", "a2", "a3", "a4"},
          false}},
        {"delay-residual",
         {{{"alpha", 1},
           {"beta", 1},
           {"delta", 2},
           {"grid_lo", 0.1},
           {"grid_hi", 5},
           {"grid_points", 8}},
          {},
          false}},
        {"comb20-consistency",
         {{{"k_max", 8}, {"l_max", 8}, {"n_max", 20}}, {"a1", "a2", "a3", "a4"}, false}},
        {"h-ode",
         {{{"mu", 2},
           {"bsq", 2.25},
           {"exp_a", 2},
           {"exp_b", 3},
           {"gam_b", 2},
           {"gam_c", 1},
           {"y_lo", 0.5},
           {"y_hi", 3}},
          {},
          false}},
    };
    return meta;
}

using Job = std::function<std::vector<CheckRecord>()>;

std::vector<std::vector<CheckRecord>> run_jobs(const std::vector<Job>& jobs, int parallelism) {
    std::vector<std::vector<CheckRecord>> results(jobs.size());
    if (parallelism <= 1 || jobs.size() <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) results[i] = jobs[i]();
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                results[i] = jobs[i]();
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    const int n_threads = std::min<int>(parallelism, static_cast<int>(jobs.size()));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

CheckRecord p_record(const std::string& check, const std::string& inputs, std::uint64_t seed,
                     std::uint64_t stream, long n, double statistic, double p) {
    CheckRecord r;
    r.check = check;
    r.inputs = inputs;
    r.seed = seed;
    r.stream = stream;
    r.n = n;
    r.statistic = statistic;
    r.p_value = p;
    r.threshold = kLevel;
    r.pass = p > kLevel;
    return r;
}

CheckRecord residual_record(const std::string& check, const std::string& inputs, double residual,
                            double threshold, bool pass_below) {
    CheckRecord r;
    r.check = check;
    r.inputs = inputs;
    r.statistic = residual;
    r.residual = residual;
    r.threshold = threshold;
    r.pass = pass_below ? residual < threshold : residual > threshold;
    return r;
}

// pushforward suite body: independence of the transformed pair plus both
// output marginals, one job per seed
std::vector<CheckRecord> pushforward_records(const DistributionSpec& law_x,
                                             const DistributionSpec& law_y,
                                             const TransformSpec& t,
                                             const DistributionSpec& target_u,
                                             const DistributionSpec& target_v, long n, int bins,
                                             std::uint64_t seed, std::uint64_t stream,
                                             const std::string& tag) {
    RngStream rng(seed, stream);
    const PushforwardResult pf =
        check_pushforward(law_x, law_y, t, target_u, target_v, n, bins, rng);
    const std::string inputs =
        to_string(law_x) + " x " + to_string(law_y) + " | " + to_string(t);
    std::vector<CheckRecord> recs;
    recs.push_back(p_record("independence" + tag, inputs, seed, stream, n,
                            pf.independence.statistic, pf.independence.p_value));
    recs.push_back(p_record("ks:u" + tag, inputs + " -> " + to_string(target_u), seed, stream, n,
                            pf.first_marginal.ks_statistic, pf.first_marginal.p_value));
    recs.push_back(p_record("ks:v" + tag, inputs + " -> " + to_string(target_v), seed, stream, n,
                            pf.second_marginal.ks_statistic, pf.second_marginal.p_value));
    return recs;
}

double param(const std::map<std::string, double>& p, const std::string& key) {
    return p.at(key);
}

bool has_param(const std::map<std::string, double>& p, const std::string& key) {
    return p.find(key) != p.end();
}

}  // namespace

std::vector<std::string> suite_names() {
    std::vector<std::string> names;
    for (const auto& [name, meta] : registry()) names.push_back(name);
    return names;
}

bool is_suite(const std::string& name) { return registry().count(name) > 0; }

std::map<std::string, double> suite_defaults(const std::string& name) {
    auto it = registry().find(name);
    if (it == registry().end()) throw std::invalid_argument("unknown suite: " + name);
    return it->second.defaults;
}

SuiteReport run_suite(const SuiteConfig& config) {
    const auto reg_it = registry().find(config.suite);
    if (reg_it == registry().end())
        throw std::invalid_argument("unknown suite: " + config.suite +
                                    " (use --list-suites for the available names)");
    const SuiteMeta& meta = reg_it->second;

    // merge parameters over the defaults, rejecting unknown keys
    std::map<std::string, double> p = meta.defaults;
    for (const auto& [key, value] : config.params) {
        if (!meta.defaults.count(key) && !meta.optional_keys.count(key))
            throw std::invalid_argument("unknown parameter '" + key + "' for suite " +
                                        config.suite);
        p[key] = value;
    }

    SuiteReport report;
    report.suite = config.suite;
    report.parameters = p;
    report.n = config.n;
    report.bins = config.bins;
    report.seeds = config.seeds;
    if (report.seeds.empty()) {
        for (std::uint64_t s = 1; s <= 20; ++s) report.seeds.push_back(s);
    }
    if (meta.statistical) {
        if (config.n < 10000)
            throw std::invalid_argument("statistical suites require n >= 10^4");
        if (config.bins < 5) throw std::invalid_argument("statistical suites require bins >= 5");
    }

    std::vector<Job> jobs;
    const long n = config.n;
    const int bins = config.bins;
    const std::string& s = config.suite;

    if (s == "matsumoto-yor") {
        const double mu = param(p, "mu"), a = param(p, "a"), b = param(p, "b");
        for (auto seed : report.seeds)
            jobs.push_back([=] {
                return pushforward_records(
                    make_gig(-mu, a, b), make_gamma(mu, b * b / 2),
                    TransformSpec::additive(LwmyFunctionSpec::reciprocal(1.0)),
                    make_gig(-mu, b, a), make_gamma(mu, a * a / 2), n, bins, seed, 0, "");
            });
    } else if (s == "f1-case") {
        const double a = param(p, "a"), b = param(p, "b"), c = param(p, "c");
        const auto law_x =
            image_law(make_kummer2(a + b, -b, c), ImageMap::lwmy(LwmyFunctionSpec::g1(1, 1)));
        const auto law_y = image_law(make_beta(a, b), ImageMap::neg_log());
        for (auto seed : report.seeds)
            jobs.push_back([=] {
                return pushforward_records(law_x, law_y,
                                           TransformSpec::additive(LwmyFunctionSpec::f1(1, 1)),
                                           make_kummer2(a, b, c), make_gamma(b, c), n, bins, seed,
                                           0, "");
            });
    } else if (s == "g1-case") {
        const double a = param(p, "a"), b = param(p, "b"), c = param(p, "c");
        const auto target_u =
            image_law(make_kummer2(a + b, -b, c), ImageMap::lwmy(LwmyFunctionSpec::g1(1, 1)));
        const auto target_v = image_law(make_beta(a, b), ImageMap::neg_log());
        for (auto seed : report.seeds)
            jobs.push_back([=] {
                return pushforward_records(make_kummer2(a, b, c), make_gamma(b, c),
                                           TransformSpec::additive(LwmyFunctionSpec::g1(1, 1)),
                                           target_u, target_v, n, bins, seed, 0, "");
            });
    } else if (s == "fdelta-case") {
        const double a = param(p, "a"), b = param(p, "b");
        const double lambda = param(p, "lambda"), delta = param(p, "delta");
        const auto xprime = make_beta_alpha(delta, a + b, lambda, -lambda - b);
        const auto yprime = make_beta(a, b);
        const auto uprime = make_beta_alpha(delta, lambda + b, a, -a - b);
        const auto vprime = make_beta(lambda, b);
        for (auto seed : report.seeds)
            jobs.push_back([=] {
                auto recs = pushforward_records(
                    image_law(xprime, ImageMap::neg_log()), image_law(yprime, ImageMap::neg_log()),
                    TransformSpec::additive(LwmyFunctionSpec::f_delta_star(delta)),
                    image_law(uprime, ImageMap::neg_log()), image_law(vprime, ImageMap::neg_log()),
                    n, bins, seed, 0, ":additive");
                auto mult = pushforward_records(
                    xprime, yprime,
                    TransformSpec::multiplicative(LwmyFunctionSpec::f_delta_star(delta)), uprime,
                    vprime, n, bins, seed, 1, ":multiplicative");
                recs.insert(recs.end(), mult.begin(), mult.end());
                return recs;
            });
    } else if (s == "delta1-case") {
        const double a = param(p, "a"), b = param(p, "b"), lambda = param(p, "lambda");
        for (auto seed : report.seeds)
            jobs.push_back([=] {
                return pushforward_records(
                    make_beta(a + b, lambda), make_beta(a, b),
                    TransformSpec::multiplicative(LwmyFunctionSpec::f_delta_star(1.0)),
                    make_beta(lambda + b, a), make_beta(lambda, b), n, bins, seed, 0, "");
            });
    } else if (s == "gig-convolution") {
        const double mu = param(p, "mu"), a = param(p, "a"), b = param(p, "b");
        for (auto seed : report.seeds)
            jobs.push_back([=]() -> std::vector<CheckRecord> {
                RngStream rng(seed, 0);
                const auto r = check_convolution(make_gig(-mu, a, b), make_gamma(mu, b * b / 2),
                                                 make_gig(mu, a, b), n, rng);
                return {p_record("ks:convolution",
                                 to_string(make_gig(-mu, a, b)) + " + " +
                                     to_string(make_gamma(mu, b * b / 2)) + " -> " +
                                     to_string(make_gig(mu, a, b)),
                                 seed, 0, n, r.ks_statistic, r.p_value)};
            });
    } else if (s == "kummer-convolution") {
        const double a = param(p, "a"), b = param(p, "b"), c = param(p, "c");
        for (auto seed : report.seeds)
            jobs.push_back([=]() -> std::vector<CheckRecord> {
                RngStream rng(seed, 0);
                const auto r = check_convolution(make_kummer2(a, b, c), make_gamma(b, c),
                                                 make_kummer2(a + b, -b, c), n, rng);
                return {p_record("ks:convolution",
                                 to_string(make_kummer2(a, b, c)) + " + " +
                                     to_string(make_gamma(b, c)) + " -> " +
                                     to_string(make_kummer2(a + b, -b, c)),
                                 seed, 0, n, r.ks_statistic, r.p_value)};
            });
    } else if (s == "pushforward-uvprime") {
        const double a = param(p, "a"), b = param(p, "b"), c = param(p, "c");
        for (auto seed : report.seeds)
            jobs.push_back([=] {
                return pushforward_records(make_kummer2(a, b, c), make_gamma(b, c),
                                           TransformSpec::uv_prime_map(), make_beta(a, b),
                                           make_kummer2(a + b, -b, c), n, bins, seed, 0, "");
            });
    } else if (s == "cns-residual") {
        jobs.push_back([p]() -> std::vector<CheckRecord> {
            const auto grid = residual_grid(param(p, "grid_lo"), param(p, "grid_hi"),
                                            static_cast<int>(param(p, "grid_points")));
            const double mu = param(p, "mu"), ga = param(p, "gig_a"), gb = param(p, "gig_b");
            const double a = param(p, "a"), b = param(p, "b"), c = param(p, "c");
            const double lambda = param(p, "lambda"), delta = param(p, "delta");
            std::vector<CheckRecord> recs;
            auto add = [&recs, &grid](const std::string& name, const LwmyFunctionSpec& fn,
                                      const DistributionSpec& lx, const DistributionSpec& ly,
                                      double threshold, bool pass_below) {
                const auto rep =
                    functional_equation_residual(fn, LogDensity{lx}, LogDensity{ly}, grid);
                recs.push_back(residual_record("residual:" + name,
                                               to_string(fn) + " | " + to_string(lx) + " x " +
                                                   to_string(ly),
                                               rep.max_abs_residual, threshold, pass_below));
            };
            const auto x_f1 =
                image_law(make_kummer2(a + b, -b, c), ImageMap::lwmy(LwmyFunctionSpec::g1(1, 1)));
            const auto y_img = image_law(make_beta(a, b), ImageMap::neg_log());
            add("reciprocal", LwmyFunctionSpec::reciprocal(1.0), make_gig(-mu, ga, gb),
                make_gamma(mu, gb * gb / 2), 1e-6, true);
            add("f1", LwmyFunctionSpec::f1(1, 1), x_f1, y_img, 1e-6, true);
            add("g1", LwmyFunctionSpec::g1(1, 1), make_kummer2(a, b, c), make_gamma(b, c), 1e-6,
                true);
            add("fdelta", LwmyFunctionSpec::f_delta_star(delta),
                image_law(make_beta_alpha(delta, a + b, lambda, -lambda - b), ImageMap::neg_log()),
                y_img, 1e-6, true);
            // wrong y-marginal control must NOT satisfy the equation
            add("negative-control", LwmyFunctionSpec::f1(1, 1), x_f1, make_gamma(b, c), 1e-2,
                false);
            return recs;
        });
    } else if (s == "series-classify") {
        jobs.push_back([p]() -> std::vector<CheckRecord> {
            std::vector<CheckRecord> recs;
            const int n_max = static_cast<int>(param(p, "n_max"));
            if (has_param(p, "a1") || has_param(p, "a2") || has_param(p, "a3") ||
                has_param(p, "a4")) {
                const std::array<double, 4> seed = {
                    has_param(p, "a1") ? param(p, "a1") : 0.0,
                    has_param(p, "a2") ? param(p, "a2") : 0.0,
                    has_param(p, "a3") ? param(p, "a3") : 0.0,
                    has_param(p, "a4") ? param(p, "a4") : 0.0};
                const auto table = extend_coefficients(seed, n_max);
                const auto out = classify(table);
                CheckRecord r;
                r.check = "classify";
                r.inputs = "seed(" + format_double(seed[0]) + "," + format_double(seed[1]) + "," +
                           format_double(seed[2]) + "," + format_double(seed[3]) + ") -> " +
                           to_string(out);
                r.statistic = static_cast<double>(static_cast<int>(out.branch));
                r.threshold = 0.0;
                r.pass = true;
                recs.push_back(r);
                return recs;
            }
            const double alpha = param(p, "alpha"), beta = param(p, "beta"),
                         delta = param(p, "delta");
            const std::vector<LwmyFunctionSpec> fams = {
                LwmyFunctionSpec::reciprocal(alpha), LwmyFunctionSpec::f1(alpha, beta),
                LwmyFunctionSpec::g1(alpha, beta),
                LwmyFunctionSpec::f_delta_star(delta, alpha, beta)};
            for (const auto& fn : fams) {
                const auto a = big_f_taylor(fn);
                const auto table = extend_coefficients({a[0], a[1], a[2], a[3]}, n_max);
                const auto out = classify(table);
                double rel = std::abs(out.matched_family.alpha - fn.alpha) /
                             std::abs(fn.alpha);
                if (fn.family != LwmyFamily::Reciprocal)
                    rel = std::max(rel, std::abs(out.matched_family.beta - fn.beta) /
                                            std::abs(fn.beta));
                if (fn.family == LwmyFamily::FDeltaStar)
                    rel = std::max(rel, std::abs(out.matched_family.delta - fn.delta) /
                                            std::abs(fn.delta));
                const bool family_ok = out.matched_family.family == fn.family;
                auto r = residual_record("classify:round-trip",
                                         to_string(fn) + " -> " + to_string(out.matched_family),
                                         rel, 1e-8, true);
                r.pass = r.pass && family_ok;
                recs.push_back(r);
            }
            return recs;
        });
    } else if (s == "delay-residual") {
        jobs.push_back([p]() -> std::vector<CheckRecord> {
            const double alpha = param(p, "alpha"), beta = param(p, "beta"),
                         delta = param(p, "delta");
            const double lo = param(p, "grid_lo"), hi = param(p, "grid_hi");
            const int pts = static_cast<int>(param(p, "grid_points"));
            std::vector<CheckRecord> recs;
            const std::vector<LwmyFunctionSpec> fams = {
                LwmyFunctionSpec::reciprocal(alpha), LwmyFunctionSpec::f1(alpha, beta),
                LwmyFunctionSpec::g1(alpha, beta),
                LwmyFunctionSpec::f_delta_star(delta, alpha, beta)};
            for (const auto& fn : fams) {
                const auto prof = profile_from_spec(fn);
                double worst = 0.0;
                for (int i = 0; i < pts; ++i) {
                    for (int j = 0; j < pts; ++j) {
                        const double x = lo + (hi - lo) * i / (pts - 1);
                        const double y = lo + (hi - lo) * j / (pts - 1);
                        const double res = delay_residual(prof, x, y);
                        worst = std::max(worst,
                                         std::abs(res) / std::max(1.0, std::abs(prof.deriv(x + y))));
                    }
                }
                recs.push_back(
                    residual_record("delay:family", to_string(fn), worst, 1e-9, true));
            }
            // cubic control, evaluated at (1,1)
            ProfileF cube;
            cube.value = [](double x) { return x * x * x; };
            cube.deriv = [](double x) { return 3.0 * x * x; };
            cube.deriv_at_zero = 0.0;
            recs.push_back(residual_record("delay:cubic-control", "F(x)=x^3 at (1,1)",
                                           std::abs(delay_residual(cube, 1.0, 1.0)), 1.0, false));
            return recs;
        });
    } else if (s == "comb20-consistency") {
        jobs.push_back([p]() -> std::vector<CheckRecord> {
            const int k_max = static_cast<int>(param(p, "k_max"));
            const int l_max = static_cast<int>(param(p, "l_max"));
            const int n_max = std::max(static_cast<int>(param(p, "n_max")), k_max + l_max + 1);
            std::vector<std::array<double, 4>> seeds;
            if (has_param(p, "a1") || has_param(p, "a2") || has_param(p, "a3") ||
                has_param(p, "a4")) {
                seeds.push_back({has_param(p, "a1") ? param(p, "a1") : 0.0,
                                 has_param(p, "a2") ? param(p, "a2") : 0.0,
                                 has_param(p, "a3") ? param(p, "a3") : 0.0,
                                 has_param(p, "a4") ? param(p, "a4") : 0.0});
            } else {
                seeds.push_back({0, 1, 0, 1});
                seeds.push_back({1, 1, 0, 0});
            }
            std::vector<CheckRecord> recs;
            for (const auto& sd : seeds) {
                const auto table = extend_coefficients(sd, n_max);
                const double defect = verify_comb20(table, k_max, l_max);
                const std::string name = "seed(" + format_double(sd[0]) + "," +
                                         format_double(sd[1]) + "," + format_double(sd[2]) + "," +
                                         format_double(sd[3]) + ")";
                recs.push_back(residual_record("comb20:defect", name, defect, 1e-10, true));
                auto corrupted = table;
                corrupted.a[5] += 1e-3;
                recs.push_back(residual_record("comb20:corruption-control", name + " + 1e-3*x^5",
                                               verify_comb20(corrupted, k_max, l_max), 1e-4,
                                               false));
            }
            return recs;
        });
    } else if (s == "h-ode") {
        jobs.push_back([p]() -> std::vector<CheckRecord> {
            const double y_lo = param(p, "y_lo"), y_hi = param(p, "y_hi");
            const Interval range{y_lo, y_hi};
            std::vector<CheckRecord> recs;
            auto sup_diff = [&](const OdeSolution& sol, const std::function<double(double)>& ref) {
                double worst = 0.0;
                for (int i = 0; i <= 100; ++i) {
                    const double y = y_lo + (y_hi - y_lo) * i / 100.0;
                    worst = std::max(worst, std::abs(sol(y) - ref(y)));
                }
                return worst;
            };
            {
                const double mu = param(p, "mu"), bsq = param(p, "bsq");
                auto ref = [mu, bsq](double y) { return (mu - 1.0) / y - 0.5 * bsq; };
                const auto sol = solve_h([](double y) { return -y * y; }, mu - 1.0, 0.0, range,
                                         ref(y_lo));
                recs.push_back(residual_record("h-ode:reciprocal-profile",
                                               "F=-y^2, gamma slope", sup_diff(sol, ref), 1e-6,
                                               true));
            }
            {
                const double a = param(p, "exp_a"), b = param(p, "exp_b");
                auto ref = [a, b](double y) {
                    const double e = std::exp(-y);
                    return (b - 1.0) * e / (1.0 - e) - a;
                };
                const auto sol =
                    solve_h([](double y) { return -2.0 * (std::cosh(y) - 1.0); }, b - 1.0, 0.0,
                            range, ref(y_lo));
                recs.push_back(residual_record("h-ode:cosh-profile",
                                               "F=-2(cosh y - 1), exp-image slope",
                                               sup_diff(sol, ref), 1e-6, true));
            }
            {
                const double b = param(p, "gam_b"), c = param(p, "gam_c");
                auto ref = [b, c](double y) { return (b - 1.0) / y - c; };
                const auto sol = solve_h([](double y) { return -(y + y * y); }, b - 1.0 + c, -1.0,
                                         range, ref(y_lo));
                recs.push_back(residual_record("h-ode:linear-quadratic-profile",
                                               "F=-(y+y^2), gamma slope", sup_diff(sol, ref),
                                               1e-6, true));
            }
            {
                const auto sol =
                    solve_h([](double y) { return -y * y; }, 0.0, 0.0, range, 1.25);
                auto ref = [](double) { return 1.25; };
                recs.push_back(residual_record("h-ode:constant", "lambda0=0, F'(0+)=0",
                                               sup_diff(sol, ref), 1e-12, true));
            }
            return recs;
        });
    } else {
        throw std::logic_error("run_suite: unhandled suite " + s);
    }

    const auto results = run_jobs(jobs, config.jobs);
    for (const auto& batch : results)
        report.checks.insert(report.checks.end(), batch.begin(), batch.end());

    // summaries per check name; statistical suites tolerate the expected
    // false-failure rate (>= 90% of seeds, i.e. 18 of 20)
    std::vector<std::string> order;
    std::map<std::string, CheckSummary> by_name;
    for (const auto& rec : report.checks) {
        auto it = by_name.find(rec.check);
        if (it == by_name.end()) {
            order.push_back(rec.check);
            it = by_name.emplace(rec.check, CheckSummary{rec.check, 0, 0, 0, false}).first;
        }
        ++it->second.total;
        if (rec.pass) ++it->second.passes;
    }
    report.pass = true;
    for (const auto& name : order) {
        CheckSummary& sum = by_name[name];
        sum.required = meta.statistical ? std::max(1, sum.total - sum.total / 10) : sum.total;
        sum.pass = sum.passes >= sum.required;
        report.pass = report.pass && sum.pass;
        report.summaries.push_back(sum);
    }
    return report;
}

std::string SuiteReport::to_json() const {
    nlohmann::ordered_json j;
    j["suite"] = suite;
    nlohmann::ordered_json params(nlohmann::ordered_json::value_t::object);
    for (const auto& [k, v] : parameters) params[k] = v;
    j["parameters"] = params;
    j["n"] = n;
    j["bins"] = bins;
    j["seeds"] = seeds;
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& rec : this->checks) {
        nlohmann::ordered_json c;
        c["check"] = rec.check;
        c["inputs"] = rec.inputs;
        c["seed"] = rec.seed;
        c["stream"] = rec.stream;
        c["n"] = rec.n;
        c["statistic"] = rec.statistic;
        if (rec.p_value) c["p_value"] = *rec.p_value;
        if (rec.residual) c["residual"] = *rec.residual;
        c["threshold"] = rec.threshold;
        c["pass"] = rec.pass;
        checks.push_back(std::move(c));
    }
    j["checks"] = std::move(checks);
    nlohmann::ordered_json sums = nlohmann::ordered_json::array();
    for (const auto& s : summaries) {
        nlohmann::ordered_json c;
        c["check"] = s.check;
        c["passes"] = s.passes;
        c["total"] = s.total;
        c["required"] = s.required;
        c["pass"] = s.pass;
        sums.push_back(std::move(c));
    }
    j["summaries"] = std::move(sums);
    j["pass"] = pass;
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Law-string parsing for the sample command

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string& inner, const std::string& what,
                                  std::size_t expected) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= inner.size()) {
        const auto comma = inner.find(',', pos);
        const std::string tok =
            trim(comma == std::string::npos ? inner.substr(pos) : inner.substr(pos, comma - pos));
        if (tok.empty()) throw std::invalid_argument("bad number list in " + what);
        std::size_t used = 0;
        out.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument("bad number '" + tok + "' in " + what);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.size() != expected)
        throw std::invalid_argument(what + " expects " + std::to_string(expected) +
                                    " parameters");
    return out;
}

}  // namespace

DistributionSpec parse_distribution(const std::string& text) {
    const std::string t = trim(text);
    const auto open = t.find('(');
    if (open == std::string::npos || t.back() != ')')
        throw std::invalid_argument("cannot parse law '" + t + "' (expected name(...))");
    const std::string name = trim(t.substr(0, open));
    const std::string inner = t.substr(open + 1, t.size() - open - 2);
    if (name == "neglog") return image_law(parse_distribution(inner), ImageMap::neg_log());
    if (name == "recip")
        return image_law(parse_distribution(inner),
                         ImageMap::lwmy(LwmyFunctionSpec::reciprocal(1.0)));
    if (name == "g1image")
        return image_law(parse_distribution(inner), ImageMap::lwmy(LwmyFunctionSpec::g1(1, 1)));
    if (name == "gig") {
        const auto v = parse_numbers(inner, "gig", 3);
        return make_gig(v[0], v[1], v[2]);
    }
    if (name == "gamma") {
        const auto v = parse_numbers(inner, "gamma", 2);
        return make_gamma(v[0], v[1]);
    }
    if (name == "beta") {
        const auto v = parse_numbers(inner, "beta", 2);
        return make_beta(v[0], v[1]);
    }
    if (name == "kummer2") {
        const auto v = parse_numbers(inner, "kummer2", 3);
        return make_kummer2(v[0], v[1], v[2]);
    }
    if (name == "betaalpha") {
        const auto v = parse_numbers(inner, "betaalpha", 4);
        return make_beta_alpha(v[0], v[1], v[2], v[3]);
    }
    throw std::invalid_argument("unknown law '" + name + "'");
}

std::vector<std::pair<std::string, std::string>> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                        ": expected key=value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                        ": expected key=value");
        entries.emplace_back(key, value);
    }
    return entries;
}

}  // namespace lwmy::suites
