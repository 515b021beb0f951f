#include "lwmy/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace lwmy {

namespace {

// ---------------------------------------------------------------------------
// Gauss-Legendre rules, computed once by Newton iteration on P_n.

struct GaussRule {
    std::vector<double> nodes;    // on (-1,1)
    std::vector<double> weights;
};

GaussRule make_gauss_rule(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev initial guess, then Newton on P_n(x) = 0.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15 * std::max(1.0, std::abs(x))) {
                // one polishing step
                p0 = 1.0;
                p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                x -= p1 / dp;
                break;
            }
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

const GaussRule& rule_low() {
    static const GaussRule r = make_gauss_rule(10);
    return r;
}
const GaussRule& rule_high() {
    static const GaussRule r = make_gauss_rule(21);
    return r;
}

struct Panel {
    double a, b;
    double value;  // high-order estimate
    double err;
};

struct PanelWorse {
    bool operator()(const Panel& p, const Panel& q) const { return p.err < q.err; }
};

template <class F>
Panel eval_panel(const F& g, double a, double b, long& evals) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const GaussRule& lo = rule_low();
    const GaussRule& hi = rule_high();
    double slo = 0.0, shi = 0.0;
    for (std::size_t i = 0; i < lo.nodes.size(); ++i)
        slo += lo.weights[i] * g(mid + half * lo.nodes[i]);
    for (std::size_t i = 0; i < hi.nodes.size(); ++i)
        shi += hi.weights[i] * g(mid + half * hi.nodes[i]);
    evals += static_cast<long>(lo.nodes.size() + hi.nodes.size());
    slo *= half;
    shi *= half;
    double err = std::abs(shi - slo);
    if (!std::isfinite(shi)) err = kInf;
    return Panel{a, b, shi, err};
}

template <class F, class ToX>
QuadratureResult adapt_finite(const F& g, double a, double b, const QuadratureOptions& opt,
                              std::vector<QuadPanel>* panels, const ToX& to_x) {
    long evals = 0;
    std::priority_queue<Panel, std::vector<Panel>, PanelWorse> heap;
    double total = 0.0, total_err = 0.0;
    const int initial = 8;
    for (int i = 0; i < initial; ++i) {
        double pa = a + (b - a) * i / initial;
        double pb = a + (b - a) * (i + 1) / initial;
        Panel p = eval_panel(g, pa, pb, evals);
        total += p.value;
        total_err += p.err;
        heap.push(p);
    }
    auto tolerance = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
    std::vector<Panel> frozen;  // panels no longer splittable in double precision
    while (total_err > tolerance()) {
        if (evals >= opt.max_evaluations)
            throw QuadratureError("integrate: evaluation budget exhausted (error " +
                                  std::to_string(total_err) + " > tol " +
                                  std::to_string(tolerance()) + ")");
        Panel worst = heap.top();
        heap.pop();
        double m = 0.5 * (worst.a + worst.b);
        if (m <= worst.a || m >= worst.b) {
            frozen.push_back(worst);
            if (heap.empty() || heap.top().err <= worst.err) break;
            continue;
        }
        total -= worst.value;
        total_err -= worst.err;
        Panel left = eval_panel(g, worst.a, m, evals);
        Panel right = eval_panel(g, m, worst.b, evals);
        total += left.value + right.value;
        total_err += left.err + right.err;
        heap.push(left);
        heap.push(right);
    }
    if (panels) {
        while (!heap.empty()) {
            frozen.push_back(heap.top());
            heap.pop();
        }
        for (const Panel& p : frozen) {
            double xa = to_x(p.a), xb = to_x(p.b);
            if (xa > xb) std::swap(xa, xb);
            panels->push_back(QuadPanel{xa, xb, p.value, p.err});
        }
    }
    return QuadratureResult{total, total_err, std::max(evals, 1L)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& fn, Interval domain,
                           const QuadratureOptions& opt, std::vector<QuadPanel>* panels) {
    const double lo = domain.lo, hi = domain.hi;
    if (!(lo < hi)) throw std::invalid_argument("integrate: empty or inverted domain");
    const bool lo_inf = std::isinf(lo), hi_inf = std::isinf(hi);
    QuadratureResult out;
    if (!lo_inf && !hi_inf) {
        out = adapt_finite([&fn](double x) { return fn(x); }, lo, hi, opt, panels,
                           [](double t) { return t; });
    } else if (lo_inf && hi_inf) {
        QuadratureOptions half_opt = opt;
        half_opt.abs_tol = 0.5 * opt.abs_tol;
        half_opt.max_evaluations = opt.max_evaluations / 2;
        QuadratureResult neg = integrate(fn, Interval{-kInf, 0.0}, half_opt, panels);
        QuadratureResult pos = integrate(fn, Interval{0.0, kInf}, half_opt, panels);
        out = QuadratureResult{neg.value + pos.value, neg.error_estimate + pos.error_estimate,
                               neg.evaluations + pos.evaluations};
    } else if (!lo_inf) {
        // x = lo + t/(1-t), t in (0,1)
        auto g = [&fn, lo](double t) {
            double om = 1.0 - t;
            return fn(lo + t / om) / (om * om);
        };
        auto to_x = [lo](double t) { return t >= 1.0 ? kInf : lo + t / (1.0 - t); };
        out = adapt_finite(g, 0.0, 1.0, opt, panels, to_x);
    } else {
        // (-inf, hi]: mirror of the above
        auto g = [&fn, hi](double t) {
            double om = 1.0 - t;
            return fn(hi - t / om) / (om * om);
        };
        auto to_x = [hi](double t) { return t >= 1.0 ? -kInf : hi - t / (1.0 - t); };
        out = adapt_finite(g, 0.0, 1.0, opt, panels, to_x);
    }
    if (panels)
        std::sort(panels->begin(), panels->end(),
                  [](const QuadPanel& p, const QuadPanel& q) { return p.lo < q.lo; });
    return out;
}

QuadratureResult integrate(const std::function<double(double)>& fn, Interval domain, double tol) {
    QuadratureOptions opt;
    opt.abs_tol = tol;
    return integrate(fn, domain, opt);
}

double gauss_panel(const std::function<double(double)>& fn, double a, double b, double* err) {
    long evals = 0;
    const Panel p = eval_panel(fn, a, b, evals);
    if (err) *err = p.err;
    return p.value;
}

double log_gamma_fn(double x) {
    if (!(x > 0.0)) throw std::domain_error("log_gamma_fn: requires x > 0");
    return std::lgamma(x);
}

// ---------------------------------------------------------------------------
// ln K_nu(z)

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240;

// Temme-style series for K_mu(z) and K_{mu+1}(z), |mu| <= 1/2, z <= 2.
void bessel_k_temme(double mu, double z, double& kmu, double& kmu1) {
    const double eps = std::numeric_limits<double>::epsilon();
    const double mu2 = mu * mu;
    const double gampl = 1.0 / std::tgamma(1.0 + mu);  // 1/Gamma(1+mu)
    const double gammi = 1.0 / std::tgamma(1.0 - mu);  // 1/Gamma(1-mu)
    // gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu), stable limit -gamma_E at mu = 0
    double gam1;
    if (std::abs(mu) < 1e-8) {
        gam1 = -kEulerGamma;
    } else {
        gam1 = gampl * std::expm1(std::lgamma(1.0 + mu) - std::lgamma(1.0 - mu)) / (2.0 * mu);
    }
    const double gam2 = 0.5 * (gammi + gampl);

    const double d = -std::log(0.5 * z);
    const double sigma = mu * d;
    const double pimu = M_PI * mu;
    const double fact = (std::abs(pimu) < 1e-300) ? 1.0 : pimu / std::sin(pimu);
    const double fact2 = (std::abs(sigma) < 1e-300) ? 1.0 : std::sinh(sigma) / sigma;

    double ff = fact * (gam1 * std::cosh(sigma) + gam2 * fact2 * d);
    double sum = ff;
    const double e = std::exp(sigma);          // (z/2)^(-mu)
    double p = 0.5 * e / gampl;                // p0 = (1/2)(z/2)^(-mu) Gamma(1+mu)
    double q = 0.5 / (e * gammi);              // q0 = (1/2)(z/2)^(+mu) Gamma(1-mu)
    double c = 1.0;
    const double d2 = 0.25 * z * z;
    double sum1 = p;
    for (int i = 1; i <= 500; ++i) {
        ff = (i * ff + p + q) / (i * i - mu2);
        c *= d2 / i;
        p /= (i - mu);
        q /= (i + mu);
        const double del = c * ff;
        sum += del;
        const double del1 = c * (p - i * ff);
        sum1 += del1;
        if (std::abs(del) < std::abs(sum) * eps) break;
    }
    kmu = sum;
    kmu1 = sum1 * (2.0 / z);
}

// Steed/Thompson-Barnett continued fraction for z > 2: returns ln K_mu(z) and
// the ratio K_{mu+1}/K_mu.
void bessel_k_cf2(double mu, double z, double& log_kmu, double& ratio) {
    const double eps = std::numeric_limits<double>::epsilon();
    const double mu2 = mu * mu;
    double b = 2.0 * (1.0 + z);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25 - mu2;
    double q = a1, c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i <= 20000; ++i) {
        a -= 2 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) <= eps) break;
    }
    h = a1 * h;
    log_kmu = 0.5 * std::log(M_PI / (2.0 * z)) - z - std::log(s);
    ratio = (mu + z + 0.5 - h) / z;
}

}  // namespace

double log_bessel_k(double nu, double z) {
    if (!(z > 0.0)) throw std::domain_error("log_bessel_k: requires z > 0");
    nu = std::abs(nu);  // K_{-nu} = K_nu
    const int n = static_cast<int>(nu + 0.5);
    const double mu = nu - n;  // |mu| <= 1/2

    double log_k, ratio;
    if (z <= 2.0) {
        double kmu, kmu1;
        bessel_k_temme(mu, z, kmu, kmu1);
        log_k = std::log(kmu);
        ratio = kmu1 / kmu;
    } else {
        bessel_k_cf2(mu, z, log_k, ratio);
    }
    // upward recurrence K_{v+1} = (2v/z) K_v + K_{v-1}, carried as
    // log K and the ratio r_j = K_{mu+j+1}/K_{mu+j} (no overflow).
    for (int j = 0; j < n; ++j) {
        log_k += std::log(ratio);
        ratio = 2.0 * (mu + j + 1) / z + 1.0 / ratio;
    }
    return log_k;
}

// ---------------------------------------------------------------------------
// Regularized incomplete gamma

namespace {

double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 10000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    const double fpmin = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("gamma_p: requires a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("gamma_q: requires a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

// ---------------------------------------------------------------------------
// Philox4x32-10

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> RngStream::philox4x32(const std::array<std::uint32_t, 4>& counter,
                                                   const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> c = counter;
    std::array<std::uint32_t, 2> k = key;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, c[0], hi0, lo0);
        mulhilo(kPhiloxM1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kPhiloxW0;
        k[1] += kPhiloxW1;
    }
    return c;
}

void RngStream::refill() {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                              static_cast<std::uint32_t>(seed_ >> 32)};
    buf_ = philox4x32(ctr, key);
    ++block_;
    buf_pos_ = 0;
}

std::uint64_t RngStream::next_u64() {
    if (buf_pos_ > 2) refill();
    const std::uint64_t lo = buf_[buf_pos_];
    const std::uint64_t hi = buf_[buf_pos_ + 1];
    buf_pos_ += 2;
    return lo | (hi << 32);
}

double RngStream::uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    cached_normal_ = v * m;
    has_cached_normal_ = true;
    return u * m;
}

double RngStream::exponential(double rate) {
    if (!(rate > 0.0)) throw std::domain_error("exponential: requires rate > 0");
    return -std::log(uniform()) / rate;
}

}  // namespace lwmy
