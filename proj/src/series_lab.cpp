#include "lwmy/series_lab.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace lwmy {

std::string CoefficientTable::to_json() const {
    nlohmann::ordered_json j;
    j["seed"] = std::vector<double>(a.begin() + 1,
                                    a.begin() + 1 + std::min(seeded_prefix, n_max));
    j["n_max"] = n_max;
    j["coefficients"] = std::vector<double>(a.begin() + 1, a.end());
    return j.dump();
}

std::string to_string(const ClassificationOutcome& outcome) {
    const char* branch = nullptr;
    switch (outcome.branch) {
        case ClassificationOutcome::Branch::QuadraticA2x2: branch = "quadratic"; break;
        case ClassificationOutcome::Branch::CoshBranch: branch = "cosh"; break;
        case ClassificationOutcome::Branch::LinearQuadratic: branch = "linear-quadratic"; break;
        case ClassificationOutcome::Branch::CoshSinhBranch: branch = "cosh-sinh"; break;
    }
    std::string out = std::string("branch=") + branch +
                      " family=" + to_string(outcome.matched_family);
    if (outcome.rate != 0.0) out += " rate=" + std::to_string(outcome.rate);
    return out;
}

namespace {

// Pascal triangle in doubles; exact below 2^53 for the n <= ~45 used here.
std::vector<std::vector<double>> binomials(int n_rows) {
    std::vector<std::vector<double>> c(static_cast<std::size_t>(n_rows) + 1);
    for (int n = 0; n <= n_rows; ++n) {
        c[n].assign(static_cast<std::size_t>(n) + 1, 1.0);
        for (int k = 1; k < n; ++k) c[n][k] = c[n - 1][k - 1] + c[n - 1][k];
    }
    return c;
}

}  // namespace

CoefficientTable extend_coefficients(const std::array<double, 4>& seed, int n_max) {
    if (n_max < 4) throw std::invalid_argument("extend_coefficients: requires n_max >= 4");
    const double a1 = seed[0], a2 = seed[1], a3 = seed[2], a4 = seed[3];
    if (a1 == 0.0 && a2 == 0.0)
        throw std::invalid_argument(
            "extend_coefficients: a1 = a2 = 0 forces every coefficient to vanish");
    CoefficientTable t;
    t.n_max = n_max;
    t.seeded_prefix = 4;
    t.a.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    t.a[1] = a1;
    t.a[2] = a2;
    t.a[3] = a3;
    t.a[4] = a4;

    const double scale = std::max({std::abs(a1), std::abs(a2), std::abs(a3), std::abs(a4)});
    if (a1 == 0.0) {
        if (std::abs(a3) > 1e-10 * scale)
            throw InconsistentSeriesError(
                "extend_coefficients: a1 = 0 forces a3 = 0 (odd coefficients vanish)");
        t.a[3] = 0.0;
        for (int n = 6; n <= n_max; n += 2)
            t.a[n] = 12.0 * a4 / (static_cast<double>(n) * (n - 1) * a2) * t.a[n - 2];
    } else {
        // row l = 3 at k = 1 pins a4 against the seed
        const double forced_a4 = a2 * a3 / (2.0 * a1);
        if (std::abs(a4 - forced_a4) > 1e-10 * std::max(scale, std::abs(forced_a4)))
            throw InconsistentSeriesError("extend_coefficients: seed violates the cubic row (a4 "
                                          "must equal a2*a3/(2*a1))");
        for (int n = 5; n <= n_max; ++n)
            t.a[n] = 6.0 * a3 * t.a[n - 2] / (static_cast<double>(n) * (n - 1) * a1);
    }

    // remaining quartic rows as a consistency check
    const auto c = binomials(n_max);
    double big = 0.0;
    for (int k = 0; k + 4 <= n_max; ++k) {
        const double t1 = 2.0 * c[k + 4][k] * t.at(k + 4) * a1;
        const double t2 = c[k + 3][k] * t.at(k + 3) * a2;
        const double t3 = -c[k + 2][k] * t.at(k + 2) * a3;
        const double t4 = -2.0 * (k + 1) * t.at(k + 1) * a4;
        const double row_scale =
            std::max({std::abs(t1), std::abs(t2), std::abs(t3), std::abs(t4), 1e-30});
        big = std::max(big, std::abs(t1 + t2 + t3 + t4) / row_scale);
    }
    if (big > 1e-10)
        throw InconsistentSeriesError("extend_coefficients: quartic recurrence row defect " +
                                      std::to_string(big));
    return t;
}

ClassificationOutcome classify(const CoefficientTable& table) {
    if (table.n_max < 4) throw std::invalid_argument("classify: table too short");
    const double a1 = table.at(1), a2 = table.at(2), a3 = table.at(3), a4 = table.at(4);
    const double scale = std::max({std::abs(a1), std::abs(a2), std::abs(a3), std::abs(a4)});
    if (scale == 0.0) throw ClassificationError("classify: zero table");
    auto is_zero = [scale](double v) { return std::abs(v) <= 1e-9 * scale; };

    ClassificationOutcome out;
    if (is_zero(a1)) {
        if (!(a2 < 0.0))
            throw ClassificationError("classify: F'(0+) = 0 requires a2 < 0 for a profile of a "
                                      "decreasing bijection");
        if (!is_zero(a3))
            throw ClassificationError("classify: F'(0+) = 0 with a3 != 0 is inconsistent");
        if (is_zero(a4)) {
            out.branch = ClassificationOutcome::Branch::QuadraticA2x2;
            out.cosh_amplitude = a2;
            out.matched_family = LwmyFunctionSpec::reciprocal(-1.0 / a2);
            return out;
        }
        if (a4 > 0.0)
            throw ClassificationError(
                "classify: a2 < 0, a4 > 0 gives a cosine profile vanishing at a positive point");
        const double rate = std::sqrt(12.0 * a4 / a2);
        const double amp = a2 * a2 / (6.0 * a4);  // negative
        out.branch = ClassificationOutcome::Branch::CoshBranch;
        out.cosh_amplitude = amp;
        out.rate = rate;
        out.matched_family = LwmyFunctionSpec::f1(-amp * rate / 2.0, rate);
        return out;
    }

    if (a1 > 0.0)
        throw ClassificationError("classify: a1 > 0 makes F positive near 0");
    if (is_zero(a3)) {
        if (!(a2 < 0.0))
            throw ClassificationError(a2 > 0.0
                                          ? "classify: a1 < 0, a2 > 0 profile eventually vanishes"
                                          : "classify: pure linear profile integrates to a "
                                            "logarithm, not a bijection of (0,inf)");
        out.branch = ClassificationOutcome::Branch::LinearQuadratic;
        out.matched_family = LwmyFunctionSpec::g1(-a1, a2 / a1);
        return out;
    }
    if (a1 * a3 < 0.0)
        throw ClassificationError(
            "classify: a1*a3 < 0 gives a trigonometric profile vanishing at a positive point");

    const double amp = a1 * a2 / (3.0 * a3);
    const double rate = std::sqrt(6.0 * a3 / a1);
    const double sinh_amp = a1 * std::sqrt(a1 / (6.0 * a3));  // negative
    if (!(amp + sinh_amp < 0.0))
        throw ClassificationError(
            "classify: cosh+sinh profile grows positive (amplitude sum must be negative)");
    const double delta = 2.0 * sinh_amp / (amp + sinh_amp);
    out.branch = ClassificationOutcome::Branch::CoshSinhBranch;
    out.cosh_amplitude = amp;
    out.sinh_amplitude = sinh_amp;
    out.rate = rate;
    out.matched_family = LwmyFunctionSpec::f_delta_star(delta, -rate * sinh_amp, rate);
    return out;
}

double verify_comb20(const CoefficientTable& table, int k_max, int l_max) {
    if (table.n_max < l_max + k_max + 1)
        throw std::invalid_argument("verify_comb20: table too short for the requested rows");
    const auto c = binomials(l_max + k_max + 1);
    const double a1 = table.at(1);
    double worst = 0.0;
    for (int k = 0; k <= k_max; ++k) {
        for (int l = 1; l <= l_max; ++l) {
            double lhs = 0.0, row_scale = 0.0;
            for (int m = 0; m <= l - 1; ++m) {
                const double term =
                    (l - 2 * m + 1) * c[l - m + 1 + k][k] * table.at(l - m + 1 + k) * table.at(m);
                lhs += term;
                row_scale = std::max(row_scale, std::abs(term));
            }
            const double r1 = static_cast<double>(l - 2) * (k + 1) * table.at(k + 1) * table.at(l);
            const double r2 = a1 * table.at(l + k) * c[l + k][k];
            row_scale = std::max({row_scale, std::abs(r1), std::abs(r2)});
            const double defect = std::abs(lhs - r1 - r2);
            worst = std::max(worst, row_scale > 0.0 ? defect / row_scale : defect);
        }
    }
    return worst;
}

ProfileF profile_from_spec(const LwmyFunctionSpec& fn) {
    ProfileF p;
    p.value = [fn](double x) { return big_f(fn, x); };
    p.deriv = [fn](double x) { return big_f_prime(fn, x); };
    p.deriv_at_zero = big_f_prime0(fn);
    return p;
}

double delay_residual(const ProfileF& f, double x, double y) {
    if (!(x > 0.0) || !(y > 0.0)) throw std::domain_error("delay_residual: requires x, y > 0");
    const double fy = f.value(y);
    if (fy == 0.0) throw std::domain_error("delay_residual: F(y) = 0");
    const double lhs = f.deriv(x + y);
    const double rhs =
        (f.deriv(y) + f.deriv_at_zero) / fy * (f.value(x + y) - f.value(x)) - f.deriv(x);
    return lhs - rhs;
}

double OdeSolution::operator()(double yq) const {
    if (y.size() < 2) throw std::logic_error("OdeSolution: empty grid");
    if (yq <= y.front()) return h.front();
    if (yq >= y.back()) return h.back();
    const auto it = std::upper_bound(y.begin(), y.end(), yq);
    const std::size_t i = static_cast<std::size_t>(it - y.begin()) - 1;
    const double dy = y[i + 1] - y[i];
    const double t = (yq - y[i]) / dy;
    const double t2 = t * t, t3 = t2 * t;
    // cubic Hermite basis
    return (2 * t3 - 3 * t2 + 1) * h[i] + (t3 - 2 * t2 + t) * dy * slope[i] +
           (-2 * t3 + 3 * t2) * h[i + 1] + (t3 - t2) * dy * slope[i + 1];
}

OdeSolution solve_h(const std::function<double(double)>& F, double lambda0, double fprime0,
                    Interval y_range, double h0) {
    if (!(y_range.lo < y_range.hi) || !std::isfinite(y_range.lo) || !std::isfinite(y_range.hi))
        throw std::invalid_argument("solve_h: requires a finite ascending range");
    auto rhs = [&F, lambda0, fprime0](double y, double h) {
        const double fy = F(y);
        const double r = (lambda0 - h * fprime0) / fy;
        if (!std::isfinite(r))
            throw std::runtime_error("solve_h: step failure, F vanishes or overflows at y = " +
                                     std::to_string(y));
        return r;
    };
    auto run = [&](long n_steps, OdeSolution& sol) {
        const double dy = (y_range.hi - y_range.lo) / static_cast<double>(n_steps);
        sol.y.assign(1, y_range.lo);
        sol.h.assign(1, h0);
        sol.slope.assign(1, rhs(y_range.lo, h0));
        double y = y_range.lo, h = h0;
        for (long i = 0; i < n_steps; ++i) {
            const double k1 = rhs(y, h);
            const double k2 = rhs(y + 0.5 * dy, h + 0.5 * dy * k1);
            const double k3 = rhs(y + 0.5 * dy, h + 0.5 * dy * k2);
            const double k4 = rhs(y + dy, h + dy * k3);
            h += dy / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            y = y_range.lo + (i + 1) * dy;
            sol.y.push_back(y);
            sol.h.push_back(h);
            sol.slope.push_back(rhs(y, h));
        }
    };
    OdeSolution coarse, fine;
    long n = 64;
    run(n, coarse);
    for (int level = 0; level < 14; ++level) {
        run(2 * n, fine);
        double diff = 0.0;
        for (std::size_t i = 0; i < coarse.y.size(); ++i)
            diff = std::max(diff, std::abs(coarse.h[i] - fine.h[2 * i]));
        if (diff <= 1e-8) return fine;
        coarse = std::move(fine);
        fine = OdeSolution{};
        n *= 2;
    }
    throw std::runtime_error("solve_h: refinement did not converge to 1e-8");
}

}  // namespace lwmy
