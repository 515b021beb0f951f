#include "lwmy/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "lwmy/format.hpp"

namespace lwmy {

// ---------------------------------------------------------------------------
// ImageMap

ImageMap ImageMap::neg_log() { return ImageMap{Kind::NegLog, {}}; }

ImageMap ImageMap::lwmy(const LwmyFunctionSpec& f) {
    validate(f);
    return ImageMap{Kind::Lwmy, f};
}

double ImageMap::forward(double x) const {
    switch (kind) {
        case Kind::NegLog: return -std::log(x);
        case Kind::Lwmy: return eval(fn, x, 0);
    }
    throw std::logic_error("ImageMap::forward: unreachable");
}

double ImageMap::inverse(double u) const {
    switch (kind) {
        case Kind::NegLog: return std::exp(-u);
        case Kind::Lwmy: return eval_inverse(fn, u);
    }
    throw std::logic_error("ImageMap::inverse: unreachable");
}

double ImageMap::inverse_deriv(double u, int order) const {
    switch (kind) {
        case Kind::NegLog: {
            const double e = std::exp(-u);
            return (order % 2 == 1) ? -e : e;
        }
        case Kind::Lwmy: return eval(inverse_spec(fn), u, order);
    }
    throw std::logic_error("ImageMap::inverse_deriv: unreachable");
}

Interval ImageMap::map_support(Interval base) const {
    // all maps here are strictly decreasing
    switch (kind) {
        case Kind::NegLog:
            if (base.lo != 0.0 || base.hi != 1.0)
                throw std::invalid_argument("ImageMap::neg_log: base support must be (0,1)");
            return Interval{0.0, kInf};
        case Kind::Lwmy:
            if (base.lo != 0.0 || !std::isinf(base.hi))
                throw std::invalid_argument("ImageMap::lwmy: base support must be (0,inf)");
            return Interval{0.0, kInf};
    }
    throw std::logic_error("ImageMap::map_support: unreachable");
}

std::string to_string(const ImageMap& m) {
    switch (m.kind) {
        case ImageMap::Kind::NegLog: return "neglog";
        case ImageMap::Kind::Lwmy: return "map:" + to_string(m.fn);
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Spec construction and validation

DistributionSpec make_gig(double mu, double a, double b) {
    DistributionSpec s{GigParams{mu, a, b}};
    validate(s);
    return s;
}
DistributionSpec make_gamma(double shape, double rate) {
    DistributionSpec s{GammaParams{shape, rate}};
    validate(s);
    return s;
}
DistributionSpec make_beta(double a, double b) {
    DistributionSpec s{BetaParams{a, b}};
    validate(s);
    return s;
}
DistributionSpec make_kummer2(double a, double b, double c) {
    DistributionSpec s{Kummer2Params{a, b, c}};
    validate(s);
    return s;
}
DistributionSpec make_beta_alpha(double alpha, double a, double b, double c) {
    DistributionSpec s{BetaAlphaParams{alpha, a, b, c}};
    validate(s);
    return s;
}
DistributionSpec image_law(const DistributionSpec& base, const ImageMap& map) {
    validate(base);
    map.map_support(support(base));  // throws if incompatible
    return DistributionSpec{ImageParams{std::make_shared<DistributionSpec>(base), map}};
}

void validate(const DistributionSpec& spec) {
    std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, GigParams>) {
                if (!(p.a > 0.0) || !(p.b > 0.0) || !std::isfinite(p.mu))
                    throw std::invalid_argument("gig: requires a > 0, b > 0, finite mu");
            } else if constexpr (std::is_same_v<T, GammaParams>) {
                if (!(p.shape > 0.0) || !(p.rate > 0.0))
                    throw std::invalid_argument("gamma: requires shape > 0, rate > 0");
            } else if constexpr (std::is_same_v<T, BetaParams>) {
                if (!(p.a > 0.0) || !(p.b > 0.0))
                    throw std::invalid_argument("beta: requires a > 0, b > 0");
            } else if constexpr (std::is_same_v<T, Kummer2Params>) {
                if (!(p.a > 0.0) || !(p.c > 0.0) || !std::isfinite(p.b))
                    throw std::invalid_argument(
                        "kummer2: requires a > 0, c > 0, finite b (divergent otherwise)");
            } else if constexpr (std::is_same_v<T, BetaAlphaParams>) {
                if (!(p.alpha > 0.0) || !(p.a > 0.0) || !(p.b > 0.0) || !std::isfinite(p.c))
                    throw std::invalid_argument(
                        "beta_alpha: requires alpha > 0, a > 0, b > 0, finite c");
            } else {
                validate(*p.base);
            }
        },
        spec.value);
}

std::string to_string(const DistributionSpec& spec) {
    return std::visit(
        [](const auto& p) -> std::string {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, GigParams>) {
                return "gig(" + format_double(p.mu) + "," + format_double(p.a) + "," +
                       format_double(p.b) + ")";
            } else if constexpr (std::is_same_v<T, GammaParams>) {
                return "gamma(" + format_double(p.shape) + "," + format_double(p.rate) + ")";
            } else if constexpr (std::is_same_v<T, BetaParams>) {
                return "beta(" + format_double(p.a) + "," + format_double(p.b) + ")";
            } else if constexpr (std::is_same_v<T, Kummer2Params>) {
                return "kummer2(" + format_double(p.a) + "," + format_double(p.b) + "," +
                       format_double(p.c) + ")";
            } else if constexpr (std::is_same_v<T, BetaAlphaParams>) {
                return "betaalpha(" + format_double(p.alpha) + "," + format_double(p.a) + "," +
                       format_double(p.b) + "," + format_double(p.c) + ")";
            } else {
                return "image(" + to_string(*p.base) + ";" + to_string(p.map) + ")";
            }
        },
        spec.value);
}

Interval support(const DistributionSpec& spec) {
    return std::visit(
        [](const auto& p) -> Interval {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, BetaParams> || std::is_same_v<T, BetaAlphaParams>) {
                return Interval{0.0, 1.0};
            } else if constexpr (std::is_same_v<T, ImageParams>) {
                return p.map.map_support(support(*p.base));
            } else {
                return Interval{0.0, kInf};
            }
        },
        spec.value);
}

// ---------------------------------------------------------------------------
// Log density

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool in_support(const DistributionSpec& spec, double x) {
    const Interval s = support(spec);
    return x > s.lo && x < s.hi;
}

// Unnormalized log kernel on the open support (image laws are already
// normalized through their base, so their "kernel" is the true log pdf).
double log_kernel(const DistributionSpec& spec, double x) {
    return std::visit(
        [x](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, GigParams>) {
                return (p.mu - 1.0) * std::log(x) - 0.5 * (p.a * p.a / x + p.b * p.b * x);
            } else if constexpr (std::is_same_v<T, GammaParams>) {
                return (p.shape - 1.0) * std::log(x) - p.rate * x;
            } else if constexpr (std::is_same_v<T, BetaParams>) {
                return (p.a - 1.0) * std::log(x) + (p.b - 1.0) * std::log1p(-x);
            } else if constexpr (std::is_same_v<T, Kummer2Params>) {
                return (p.a - 1.0) * std::log(x) - (p.a + p.b) * std::log1p(x) - p.c * x;
            } else if constexpr (std::is_same_v<T, BetaAlphaParams>) {
                double lk = (p.a - 1.0) * std::log(x) + (p.b - 1.0) * std::log1p(-x);
                if (p.c != 0.0) lk += p.c * std::log(p.alpha * x + 1.0 - x);
                return lk;
            } else {
                const double s = p.map.inverse(x);
                return log_pdf(*p.base, s) + std::log(std::abs(p.map.inverse_deriv(x, 1)));
            }
        },
        spec.value);
}

// ---------------------------------------------------------------------------
// Per-spec cache: kernel normalization plus the cumulative panel table the
// cdf/quantile machinery runs on. Built once per distinct spec string;
// concurrent readers share the same immutable entry.

struct CdfCache {
    double log_norm;            // ln of the kernel integral over the support
    std::vector<double> edges;  // ascending panel edges; last may be +inf
    std::vector<double> cum;    // cum[i] = P(X <= edges[i]); cum.front() = 0
};

std::mutex g_cache_mutex;
std::unordered_map<std::string, std::shared_ptr<const CdfCache>> g_cache;

// cheap structural key (tag bytes + raw double bits), no float formatting
void append_key(const DistributionSpec& spec, std::string& out) {
    auto push = [&out](double v) {
        const char* p = reinterpret_cast<const char*>(&v);
        out.append(p, sizeof(double));
    };
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, GigParams>) {
                out.push_back('G');
                push(p.mu);
                push(p.a);
                push(p.b);
            } else if constexpr (std::is_same_v<T, GammaParams>) {
                out.push_back('g');
                push(p.shape);
                push(p.rate);
            } else if constexpr (std::is_same_v<T, BetaParams>) {
                out.push_back('B');
                push(p.a);
                push(p.b);
            } else if constexpr (std::is_same_v<T, Kummer2Params>) {
                out.push_back('K');
                push(p.a);
                push(p.b);
                push(p.c);
            } else if constexpr (std::is_same_v<T, BetaAlphaParams>) {
                out.push_back('A');
                push(p.alpha);
                push(p.a);
                push(p.b);
                push(p.c);
            } else {
                out.push_back('I');
                if (p.map.kind == ImageMap::Kind::NegLog) {
                    out.push_back('n');
                } else {
                    out.push_back('l');
                    out.push_back(static_cast<char>(p.map.fn.family));
                    push(p.map.fn.alpha);
                    push(p.map.fn.beta);
                    push(p.map.fn.delta);
                }
                append_key(*p.base, out);
            }
        },
        spec.value);
}

std::string cache_key(const DistributionSpec& spec) {
    std::string key;
    key.reserve(40);
    append_key(spec, key);
    return key;
}

std::shared_ptr<const CdfCache> build_cache(const DistributionSpec& spec) {
    const Interval sup = support(spec);
    auto kernel = [&spec](double x) {
        if (!in_support(spec, x)) return 0.0;  // deep panels may round onto an endpoint
        const double lk = log_kernel(spec, x);
        return lk < -745.0 ? 0.0 : std::exp(lk);
    };
    QuadratureOptions opt;
    opt.abs_tol = 1e-280;
    opt.rel_tol = 1e-12;
    std::vector<QuadPanel> panels;
    const QuadratureResult z = integrate(kernel, sup, opt, &panels);
    if (!(z.value > 0.0) || !std::isfinite(z.value))
        throw std::invalid_argument(
            "distribution kernel does not integrate to a positive value: " + to_string(spec));
    auto cache = std::make_shared<CdfCache>();
    cache->log_norm = std::log(z.value);
    cache->edges.reserve(panels.size() + 1);
    cache->cum.reserve(panels.size() + 1);
    cache->edges.push_back(panels.front().lo);
    cache->cum.push_back(0.0);
    double acc = 0.0;
    for (const QuadPanel& p : panels) {
        acc += p.value;
        cache->edges.push_back(p.hi);
        cache->cum.push_back(std::min(1.0, acc / z.value));
    }
    return cache;
}

const CdfCache& get_cache(const DistributionSpec& spec) {
    // lock-free fast path: per-thread view of the already-built entries
    thread_local std::unordered_map<std::string, std::shared_ptr<const CdfCache>> local;
    const std::string key = cache_key(spec);
    if (auto it = local.find(key); it != local.end()) return *it->second;
    {
        std::lock_guard<std::mutex> lock(g_cache_mutex);
        auto it = g_cache.find(key);
        if (it != g_cache.end()) {
            local.emplace(key, it->second);
            return *it->second;
        }
    }
    auto built = build_cache(spec);  // may recurse into base laws; not under the lock
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto [it, inserted] = g_cache.emplace(key, std::move(built));
    local.emplace(key, it->second);
    return *it->second;
}

// Resolves the variant once into a flat normalized-pdf closure; the hot path
// for cdf sweeps over large sorted samples.
std::function<double(double)> make_pdf(const DistributionSpec& spec) {
    return std::visit(
        [&spec](const auto& p) -> std::function<double(double)> {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, GigParams>) {
                const double mu = p.mu, a2 = p.a * p.a, b2 = p.b * p.b;
                const double ln = get_cache(spec).log_norm;
                return [=](double x) {
                    if (!(x > 0.0) || !std::isfinite(x)) return 0.0;
                    const double lk =
                        (mu - 1.0) * std::log(x) - 0.5 * (a2 / x + b2 * x) - ln;
                    return lk < -745.0 ? 0.0 : std::exp(lk);
                };
            } else if constexpr (std::is_same_v<T, GammaParams>) {
                const double shape = p.shape, rate = p.rate;
                const double ln = get_cache(spec).log_norm;
                return [=](double x) {
                    if (!(x > 0.0) || !std::isfinite(x)) return 0.0;
                    const double lk = (shape - 1.0) * std::log(x) - rate * x - ln;
                    return lk < -745.0 ? 0.0 : std::exp(lk);
                };
            } else if constexpr (std::is_same_v<T, BetaParams>) {
                const double a = p.a, b = p.b;
                const double ln = get_cache(spec).log_norm;
                return [=](double x) {
                    if (!(x > 0.0) || !(x < 1.0)) return 0.0;
                    const double lk =
                        (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - ln;
                    return lk < -745.0 ? 0.0 : std::exp(lk);
                };
            } else if constexpr (std::is_same_v<T, Kummer2Params>) {
                const double a = p.a, ab = p.a + p.b, c = p.c;
                const double ln = get_cache(spec).log_norm;
                return [=](double x) {
                    if (!(x > 0.0) || !std::isfinite(x)) return 0.0;
                    const double lk =
                        (a - 1.0) * std::log(x) - ab * std::log1p(x) - c * x - ln;
                    return lk < -745.0 ? 0.0 : std::exp(lk);
                };
            } else if constexpr (std::is_same_v<T, BetaAlphaParams>) {
                const double alpha = p.alpha, a = p.a, b = p.b, c = p.c;
                const double ln = get_cache(spec).log_norm;
                return [=](double x) {
                    if (!(x > 0.0) || !(x < 1.0)) return 0.0;
                    double lk = (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - ln;
                    if (c != 0.0) lk += c * std::log(alpha * x + 1.0 - x);
                    return lk < -745.0 ? 0.0 : std::exp(lk);
                };
            } else {
                auto inner = make_pdf(*p.base);
                const ImageMap map = p.map;
                return [inner = std::move(inner), map](double u) {
                    if (!(u > 0.0) || !std::isfinite(u)) return 0.0;
                    const double s = map.inverse(u);
                    return inner(s) * std::abs(map.inverse_deriv(u, 1));
                };
            }
        },
        spec.value);
}

// Small-interval integral of the pdf: one rule pair, with adaptive fallback
// for the rare wide or rough gap.
double pdf_integral(const std::function<double(double)>& f, double a, double b) {
    double err = 0.0;
    const double v = gauss_panel(f, a, b, &err);
    if (err <= std::max(1e-13, 1e-11 * std::abs(v))) return v;
    QuadratureOptions opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-12;
    opt.max_evaluations = 200000;
    return integrate(f, Interval{a, b}, opt).value;
}

}  // namespace

double log_pdf(const DistributionSpec& spec, double x) {
    validate(spec);
    if (!std::isfinite(x) || !in_support(spec, x)) return kNegInf;
    if (std::holds_alternative<ImageParams>(spec.value)) return log_kernel(spec, x);
    return log_kernel(spec, x) - get_cache(spec).log_norm;
}

LogDensityDerivs log_pdf_derivs(const DistributionSpec& spec, double x) {
    validate(spec);
    if (!in_support(spec, x)) throw std::domain_error("log_pdf_derivs: x outside the open support");
    return std::visit(
        [x](const auto& p) -> LogDensityDerivs {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, GigParams>) {
                const double a2 = p.a * p.a, b2 = p.b * p.b;
                return {(p.mu - 1.0) / x + 0.5 * a2 / (x * x) - 0.5 * b2,
                        -(p.mu - 1.0) / (x * x) - a2 / (x * x * x)};
            } else if constexpr (std::is_same_v<T, GammaParams>) {
                return {(p.shape - 1.0) / x - p.rate, -(p.shape - 1.0) / (x * x)};
            } else if constexpr (std::is_same_v<T, BetaParams>) {
                const double om = 1.0 - x;
                return {(p.a - 1.0) / x - (p.b - 1.0) / om,
                        -(p.a - 1.0) / (x * x) - (p.b - 1.0) / (om * om)};
            } else if constexpr (std::is_same_v<T, Kummer2Params>) {
                const double op = 1.0 + x;
                return {(p.a - 1.0) / x - (p.a + p.b) / op - p.c,
                        -(p.a - 1.0) / (x * x) + (p.a + p.b) / (op * op)};
            } else if constexpr (std::is_same_v<T, BetaAlphaParams>) {
                const double om = 1.0 - x;
                const double w = p.alpha * x + om;
                const double am1 = p.alpha - 1.0;
                return {(p.a - 1.0) / x - (p.b - 1.0) / om + p.c * am1 / w,
                        -(p.a - 1.0) / (x * x) - (p.b - 1.0) / (om * om) -
                            p.c * am1 * am1 / (w * w)};
            } else {
                // phi(u) = phi_base(s(u)) + ln|s'(u)|
                const double s = p.map.inverse(x);
                const double s1 = p.map.inverse_deriv(x, 1);
                const double s2 = p.map.inverse_deriv(x, 2);
                const double s3 = p.map.inverse_deriv(x, 3);
                const LogDensityDerivs b = log_pdf_derivs(*p.base, s);
                return {b.d1 * s1 + s2 / s1,
                        b.d2 * s1 * s1 + b.d1 * s2 + (s3 * s1 - s2 * s2) / (s1 * s1)};
            }
        },
        spec.value);
}

LogDensityDerivs log_pdf_derivs_fd(const DistributionSpec& spec, double x) {
    validate(spec);
    if (!in_support(spec, x))
        throw std::domain_error("log_pdf_derivs_fd: x outside the open support");
    auto phi = [&spec](double t) { return log_pdf(spec, t); };
    const double h = 1e-4 * std::max(1.0, std::abs(x));
    auto d1 = [&](double s) { return (phi(x + s) - phi(x - s)) / (2.0 * s); };
    auto d2 = [&](double s) { return (phi(x + s) - 2.0 * phi(x) + phi(x - s)) / (s * s); };
    // one Richardson step: central differences promoted from O(h^2) to O(h^4)
    const double g1 = (4.0 * d1(h / 2) - d1(h)) / 3.0;
    const double g2 = (4.0 * d2(h / 2) - d2(h)) / 3.0;
    return {g1, g2};
}

double normalizing_constant(const DistributionSpec& spec) {
    validate(spec);
    if (const auto* img = std::get_if<ImageParams>(&spec.value))
        return normalizing_constant(*img->base);
    return std::exp(-get_cache(spec).log_norm);
}

double cdf(const DistributionSpec& spec, double x) {
    validate(spec);
    const Interval sup = support(spec);
    if (!(x > sup.lo)) return 0.0;
    if (x >= sup.hi) return 1.0;
    const CdfCache& cache = get_cache(spec);
    const auto pdf = make_pdf(spec);
    auto it = std::upper_bound(cache.edges.begin(), cache.edges.end(), x);
    const std::size_t idx = static_cast<std::size_t>(it - cache.edges.begin()) - 1;
    if (std::isinf(cache.edges[idx + 1])) {
        // x lies in the unbounded tail panel; integrate the complement so the
        // substitution concentrates nodes where the density still lives
        QuadratureOptions opt;
        opt.abs_tol = 1e-13;
        opt.rel_tol = 1e-11;
        opt.max_evaluations = 200000;
        const double tail = integrate(pdf, Interval{x, kInf}, opt).value;
        return std::clamp(1.0 - tail, 0.0, 1.0);
    }
    double value = cache.cum[idx];
    if (x > cache.edges[idx]) value += pdf_integral(pdf, cache.edges[idx], x);
    return std::clamp(value, 0.0, 1.0);
}

std::vector<double> cdf_many(const DistributionSpec& spec, std::span<const double> sorted_xs) {
    validate(spec);
    std::vector<double> out(sorted_xs.size());
    if (sorted_xs.empty()) return out;
    const Interval sup = support(spec);
    const CdfCache& cache = get_cache(spec);
    // widest gap still integrated incrementally; anything larger restarts from
    // the panel table so uniform sub-panels cannot straddle all of the mass
    const double last_finite =
        std::isinf(cache.edges.back()) ? cache.edges[cache.edges.size() - 2] : cache.edges.back();
    const double gap_limit = std::max(1.0, 0.25 * (last_finite - cache.edges.front()));
    const auto pdf = make_pdf(spec);
    double acc = 0.0, comp = 0.0;  // Kahan accumulation across many tiny gaps
    auto add = [&acc, &comp](double v) {
        const double y = v - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    };
    double prev = 0.0;
    bool started = false;
    for (std::size_t i = 0; i < sorted_xs.size(); ++i) {
        const double x = sorted_xs[i];
        if (i > 0 && x < sorted_xs[i - 1])
            throw std::invalid_argument("cdf_many: input must be ascending");
        if (!(x > sup.lo)) {
            out[i] = 0.0;
            continue;
        }
        if (x >= sup.hi) {
            out[i] = 1.0;
            continue;
        }
        if (!started || x - prev > gap_limit) {
            acc = cdf(spec, x);
            comp = 0.0;
            started = true;
        } else if (x > prev) {
            add(pdf_integral(pdf, prev, x));
        }
        prev = x;
        out[i] = std::clamp(acc, 0.0, 1.0);
    }
    return out;
}

double quantile(const DistributionSpec& spec, double p) {
    validate(spec);
    if (!(p > 0.0) || !(p < 1.0)) throw std::domain_error("quantile: requires p in (0,1)");
    const CdfCache& cache = get_cache(spec);
    auto it = std::upper_bound(cache.cum.begin(), cache.cum.end(), p);
    std::size_t idx = static_cast<std::size_t>(it - cache.cum.begin());
    if (idx == 0) idx = 1;
    if (idx >= cache.edges.size()) idx = cache.edges.size() - 1;
    double lo = cache.edges[idx - 1];
    double hi = cache.edges[idx];
    if (std::isinf(hi)) {
        double step = std::max(1.0, std::abs(lo));
        while (true) {
            hi = lo + step;
            if (cdf(spec, hi) >= p) break;
            step *= 2.0;
            if (step > 1e300) break;
        }
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (cdf(spec, mid) < p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-13 * std::max(1.0, std::abs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

struct Tally {
    long accepted = 0;
    long proposed = 0;
};

double sample_gamma(double shape, double rate, RngStream& rng, Tally& tally) {
    if (shape < 1.0) {
        // shape boost: X = Y * U^{1/shape} with Y ~ Gamma(shape+1)
        const double u = rng.uniform();
        return sample_gamma(shape + 1.0, rate, rng, tally) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z, v;
        do {
            z = rng.normal();
            v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        ++tally.proposed;
        if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) {
            ++tally.accepted;
            return d * v / rate;
        }
    }
}

double sample_beta(double a, double b, RngStream& rng, Tally& tally) {
    const double g1 = sample_gamma(a, 1.0, rng, tally);
    const double g2 = sample_gamma(b, 1.0, rng, tally);
    return g1 / (g1 + g2);
}

// Two-sided envelope for the GIG kernel x^{mu-1} exp(-(a^2/x + b^2 x)/2):
// an exponential tail with rate b^2/4 on [mode, inf) and, through y = 1/x,
// an exponential tail with rate a^2/4 on (0, mode]; each piece is scaled by
// the exact supremum of the correspondingly tilted kernel on its side, so the
// envelope dominates everywhere and acceptance stays bounded away from zero.
struct GigSampler {
    double mu, a2, b2;
    double mode, ymode;
    double lam_r, log_cr, lam_l, log_cl;
    double prob_right;

    explicit GigSampler(const GigParams& p) {
        mu = p.mu;
        a2 = p.a * p.a;
        b2 = p.b * p.b;
        mode = ((mu - 1.0) + std::sqrt((mu - 1.0) * (mu - 1.0) + a2 * b2)) / b2;
        ymode = 1.0 / mode;
        lam_r = 0.25 * b2;
        lam_l = 0.25 * a2;
        const double xstar =
            ((mu - 1.0) + std::sqrt((mu - 1.0) * (mu - 1.0) + 2.0 * lam_r * a2)) / (2.0 * lam_r);
        log_cr = tilted_right(std::max(mode, xstar));
        const double ystar =
            ((-mu - 1.0) + std::sqrt((mu + 1.0) * (mu + 1.0) + 2.0 * lam_l * b2)) / (2.0 * lam_l);
        log_cl = tilted_left(std::max(ymode, ystar));
        const double log_mass_r = log_cr - lam_r * mode - std::log(lam_r);
        const double log_mass_l = log_cl - lam_l * ymode - std::log(lam_l);
        prob_right = 1.0 / (1.0 + std::exp(log_mass_l - log_mass_r));
    }

    double tilted_right(double x) const {
        return (mu - 1.0) * std::log(x) - 0.5 * a2 / x - lam_r * x;
    }
    double tilted_left(double y) const {
        return (-mu - 1.0) * std::log(y) - 0.5 * b2 / y - lam_l * y;
    }

    double draw(RngStream& rng, Tally& tally) const {
        for (;;) {
            ++tally.proposed;
            if (rng.uniform() < prob_right) {
                const double x = mode + rng.exponential(lam_r);
                if (std::log(rng.uniform()) < tilted_right(x) - log_cr) {
                    ++tally.accepted;
                    return x;
                }
            } else {
                const double y = ymode + rng.exponential(lam_l);
                if (std::log(rng.uniform()) < tilted_left(y) - log_cl) {
                    ++tally.accepted;
                    return 1.0 / y;
                }
            }
        }
    }
};

double sample_kummer2(const Kummer2Params& p, RngStream& rng, Tally& tally) {
    const double sum_ab = p.a + p.b;
    if (sum_ab >= 0.0) {
        // envelope Gamma(a, c); accept with (1+x)^{-(a+b)} <= 1
        for (;;) {
            const double x = sample_gamma(p.a, p.c, rng, tally);
            ++tally.proposed;
            if (std::log(rng.uniform()) < -sum_ab * std::log1p(x)) {
                ++tally.accepted;
                return x;
            }
        }
    }
    // (1+x)^pw with pw = -(a+b) > 0 bounded by 2^m (1 + x^m), m = ceil(pw):
    // mixture envelope of Gamma(a, c) and Gamma(a+m, c).
    const double pw = -sum_ab;
    const double m = std::ceil(pw);
    const double logw1 = log_gamma_fn(p.a) - p.a * std::log(p.c);
    const double logw2 = log_gamma_fn(p.a + m) - (p.a + m) * std::log(p.c);
    const double prob1 = 1.0 / (1.0 + std::exp(logw2 - logw1));
    for (;;) {
        const double shape = (rng.uniform() < prob1) ? p.a : p.a + m;
        const double x = sample_gamma(shape, p.c, rng, tally);
        const double log_1p_xm =
            (x > 1.0) ? m * std::log(x) + std::log1p(std::pow(x, -m)) : std::log1p(std::pow(x, m));
        ++tally.proposed;
        if (std::log(rng.uniform()) < pw * std::log1p(x) - m * std::log(2.0) - log_1p_xm) {
            ++tally.accepted;
            return x;
        }
    }
}

double sample_beta_alpha(const BetaAlphaParams& p, RngStream& rng, Tally& tally) {
    // constant envelope for (alpha x + 1 - x)^c over (0,1)
    const double bound = (p.c >= 0.0) ? std::max(1.0, p.alpha) : std::min(1.0, p.alpha);
    const double log_m = p.c * std::log(bound);
    for (;;) {
        const double x = sample_beta(p.a, p.b, rng, tally);
        ++tally.proposed;
        if (std::log(rng.uniform()) < p.c * std::log(p.alpha * x + 1.0 - x) - log_m) {
            ++tally.accepted;
            return x;
        }
    }
}

void sample_into(const DistributionSpec& spec, long n, RngStream& rng, Tally& tally,
                 std::vector<double>& out) {
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, GigParams>) {
                GigSampler s(p);
                for (long i = 0; i < n; ++i) out.push_back(s.draw(rng, tally));
            } else if constexpr (std::is_same_v<T, GammaParams>) {
                for (long i = 0; i < n; ++i)
                    out.push_back(sample_gamma(p.shape, p.rate, rng, tally));
            } else if constexpr (std::is_same_v<T, BetaParams>) {
                for (long i = 0; i < n; ++i) out.push_back(sample_beta(p.a, p.b, rng, tally));
            } else if constexpr (std::is_same_v<T, Kummer2Params>) {
                for (long i = 0; i < n; ++i) out.push_back(sample_kummer2(p, rng, tally));
            } else if constexpr (std::is_same_v<T, BetaAlphaParams>) {
                for (long i = 0; i < n; ++i) out.push_back(sample_beta_alpha(p, rng, tally));
            } else {
                sample_into(*p.base, n, rng, tally, out);
                for (auto it = out.end() - n; it != out.end(); ++it) *it = p.map.forward(*it);
            }
        },
        spec.value);
}

}  // namespace

SampleBatch sample(const DistributionSpec& spec, long n, RngStream& rng) {
    validate(spec);
    if (n < 1) throw std::invalid_argument("sample: requires n >= 1");
    SampleBatch batch;
    batch.spec = spec;
    batch.seed = rng.seed();
    batch.stream_id = rng.stream_id();
    batch.values.reserve(static_cast<std::size_t>(n));
    Tally tally;
    sample_into(spec, n, rng, tally, batch.values);
    batch.acceptance_rate =
        tally.proposed > 0 ? static_cast<double>(tally.accepted) / tally.proposed : 1.0;
    return batch;
}

void SampleBatch::write_csv(std::ostream& os, bool with_values) const {
    os << "# spec=" << to_string(spec) << " seed=" << seed << " stream=" << stream_id
       << " n=" << values.size() << " acceptance_rate=" << format_double(acceptance_rate) << "\n";
    if (with_values)
        for (double v : values) os << format_double(v) << "\n";
}

std::string SampleBatch::to_json(bool with_values) const {
    nlohmann::ordered_json j;
    j["spec"] = to_string(spec);
    j["seed"] = seed;
    j["stream"] = stream_id;
    j["n"] = values.size();
    j["acceptance_rate"] = acceptance_rate;
    if (with_values) j["values"] = values;
    return j.dump();
}

}  // namespace lwmy
