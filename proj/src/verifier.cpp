#include "lwmy/verifier.hpp"

#include <algorithm>
#include <cmath>

namespace lwmy {

namespace {

// Kolmogorov asymptotic survival function with the Stephens correction term,
// good to a few parts in 1e3 for n >= 100 (far finer than the 0.01 levels
// tested here).
double ks_p_value(double d, long n) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double t = d * (sn + 0.12 + 0.11 / sn);
    if (t < 0.2) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * t * t);
        sum += (j % 2 == 1) ? term : -term;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

// bin index from ascending edges (values below the first edge map to 0)
int bin_of(const std::vector<double>& edges, double x) {
    return static_cast<int>(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
}

std::vector<double> quantile_edges(std::vector<double> sorted, int bins) {
    std::vector<double> edges;
    edges.reserve(bins - 1);
    const std::size_t n = sorted.size();
    for (int j = 1; j < bins; ++j) {
        edges.push_back(sorted[n * static_cast<std::size_t>(j) / bins]);
    }
    return edges;
}

}  // namespace

GoodnessOfFitResult ks_test(std::span<const double> samples, const DistributionSpec& target) {
    if (samples.empty()) throw std::invalid_argument("ks_test: requires samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const std::vector<double> f = cdf_many(target, sorted);
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double lo = f[i] - static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n - f[i];
        d = std::max(d, std::max(lo, hi));
    }
    GoodnessOfFitResult r;
    r.ks_statistic = d;
    r.p_value = ks_p_value(d, static_cast<long>(sorted.size()));
    r.n = static_cast<long>(sorted.size());
    r.target = to_string(target);
    return r;
}

IndependenceTestResult chi_square_independence(std::span<const double> u,
                                               std::span<const double> v, int bins) {
    if (u.size() != v.size() || u.empty())
        throw std::invalid_argument("chi_square_independence: mismatched samples");
    if (bins < 2) throw std::invalid_argument("chi_square_independence: requires bins >= 2");
    std::vector<double> su(u.begin(), u.end()), sv(v.begin(), v.end());
    std::sort(su.begin(), su.end());
    std::sort(sv.begin(), sv.end());
    const auto ue = quantile_edges(std::move(su), bins);
    const auto ve = quantile_edges(std::move(sv), bins);
    std::vector<long> counts(static_cast<std::size_t>(bins) * bins, 0);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const int r = bin_of(ue, u[i]);
        const int c = bin_of(ve, v[i]);
        ++counts[static_cast<std::size_t>(r) * bins + c];
    }
    std::vector<double> row(bins, 0.0), col(bins, 0.0);
    for (int r = 0; r < bins; ++r)
        for (int c = 0; c < bins; ++c) {
            row[r] += counts[static_cast<std::size_t>(r) * bins + c];
            col[c] += counts[static_cast<std::size_t>(r) * bins + c];
        }
    const double n = static_cast<double>(u.size());
    double stat = 0.0;
    for (int r = 0; r < bins; ++r)
        for (int c = 0; c < bins; ++c) {
            const double expected = row[r] * col[c] / n;
            if (expected > 0.0) {
                const double diff = counts[static_cast<std::size_t>(r) * bins + c] - expected;
                stat += diff * diff / expected;
            }
        }
    IndependenceTestResult res;
    res.statistic = stat;
    res.rows = bins;
    res.cols = bins;
    res.dof = (bins - 1) * (bins - 1);
    res.p_value = gamma_q(0.5 * res.dof, 0.5 * stat);
    res.n = static_cast<long>(u.size());
    return res;
}

ChiSquareGofResult chi_square_gof(std::span<const double> samples, const DistributionSpec& target,
                                  int bins) {
    if (samples.empty()) throw std::invalid_argument("chi_square_gof: requires samples");
    if (bins < 2) throw std::invalid_argument("chi_square_gof: requires bins >= 2");
    std::vector<double> edges(bins - 1);
    for (int j = 1; j < bins; ++j)
        edges[j - 1] = quantile(target, static_cast<double>(j) / bins);
    std::vector<long> counts(bins, 0);
    for (double x : samples) ++counts[bin_of(edges, x)];
    const double expected = static_cast<double>(samples.size()) / bins;
    double stat = 0.0;
    for (long c : counts) {
        const double diff = c - expected;
        stat += diff * diff / expected;
    }
    ChiSquareGofResult r;
    r.statistic = stat;
    r.dof = bins - 1;
    r.p_value = gamma_q(0.5 * r.dof, 0.5 * stat);
    r.n = static_cast<long>(samples.size());
    return r;
}

IndependenceTestResult check_independence(const DistributionSpec& law_x,
                                          const DistributionSpec& law_y, const TransformSpec& t,
                                          long n, int bins, RngStream& rng,
                                          PairSampling pairing) {
    if (n < 10000) throw std::invalid_argument("check_independence: requires n >= 10^4");
    if (bins < 5) throw std::invalid_argument("check_independence: requires bins >= 5");
    const SampleBatch xs = sample(law_x, n, rng);
    const SampleBatch ys =
        (pairing == PairSampling::Duplicated) ? xs : sample(law_y, n, rng);
    std::vector<double> u(static_cast<std::size_t>(n)), v(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        const auto uv = apply_transform(t, xs.values[i], ys.values[i]);
        u[i] = uv.first;
        v[i] = uv.second;
    }
    IndependenceTestResult r = chi_square_independence(u, v, bins);
    r.seed = rng.seed();
    r.stream_id = rng.stream_id();
    return r;
}

GoodnessOfFitResult check_marginal(std::span<const double> samples,
                                   const DistributionSpec& target) {
    return ks_test(samples, target);
}

GoodnessOfFitResult check_convolution(const DistributionSpec& law_x,
                                      const DistributionSpec& law_y,
                                      const DistributionSpec& target, long n, RngStream& rng) {
    if (n < 10000) throw std::invalid_argument("check_convolution: requires n >= 10^4");
    const SampleBatch xs = sample(law_x, n, rng);
    const SampleBatch ys = sample(law_y, n, rng);
    std::vector<double> sums(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) sums[i] = xs.values[i] + ys.values[i];
    return ks_test(sums, target);
}

PushforwardResult check_pushforward(const DistributionSpec& law_x, const DistributionSpec& law_y,
                                    const TransformSpec& t, const DistributionSpec& target_u,
                                    const DistributionSpec& target_v, long n, int bins,
                                    RngStream& rng) {
    if (n < 10000) throw std::invalid_argument("check_pushforward: requires n >= 10^4");
    const SampleBatch xs = sample(law_x, n, rng);
    const SampleBatch ys = sample(law_y, n, rng);
    std::vector<double> u(static_cast<std::size_t>(n)), v(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        const auto uv = apply_transform(t, xs.values[i], ys.values[i]);
        u[i] = uv.first;
        v[i] = uv.second;
    }
    PushforwardResult out;
    out.first_marginal = ks_test(u, target_u);
    out.second_marginal = ks_test(v, target_v);
    out.independence = chi_square_independence(u, v, bins);
    out.independence.seed = rng.seed();
    out.independence.stream_id = rng.stream_id();
    return out;
}

LogDensityDerivs LogDensity::derivs(double x) const {
    return mode == ResidualReport::DerivMode::Analytic ? log_pdf_derivs(law, x)
                                                       : log_pdf_derivs_fd(law, x);
}

double cns_residual_at(const LwmyFunctionSpec& fn, const LogDensity& phi_x,
                       const LogDensity& phi_y, double x, double y) {
    const double f1x = eval(fn, x, 1);
    const double f2x = eval(fn, x, 2);
    const double f3x = eval(fn, x, 3);
    const double f1xy = eval(fn, x + y, 1);
    const LogDensityDerivs px = phi_x.derivs(x);
    const LogDensityDerivs py = phi_y.derivs(y);
    const double ratio = f2x / f1x;
    return px.d2 - px.d1 * ratio + py.d2 * (1.0 - f1x / f1xy) + py.d1 * ratio +
           (2.0 * f2x * f2x - f3x * f1x) / (f1x * f1x);
}

ResidualReport functional_equation_residual(const LwmyFunctionSpec& fn, const LogDensity& phi_x,
                                            const LogDensity& phi_y,
                                            const std::vector<std::pair<double, double>>& grid) {
    if (phi_x.mode != phi_y.mode)
        throw std::invalid_argument("functional_equation_residual: mixed derivative modes");
    ResidualReport report;
    report.grid = grid;
    report.derivative_mode = phi_x.mode;
    for (const auto& [x, y] : grid) {
        if (!(x > 0.0) || !(y > 0.0))
            throw std::domain_error("functional_equation_residual: grid must be positive");
        report.max_abs_residual =
            std::max(report.max_abs_residual, std::abs(cns_residual_at(fn, phi_x, phi_y, x, y)));
    }
    return report;
}

std::vector<std::pair<double, double>> residual_grid(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) throw std::invalid_argument("residual_grid: bad grid");
    std::vector<double> pts(n);
    for (int i = 0; i < n; ++i)
        pts[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    std::vector<std::pair<double, double>> grid;
    grid.reserve(static_cast<std::size_t>(n) * n);
    for (double x : pts)
        for (double y : pts) grid.emplace_back(x, y);
    return grid;
}

}  // namespace lwmy
