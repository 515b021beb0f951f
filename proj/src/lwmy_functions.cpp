#include "lwmy/lwmy_functions.hpp"

#include <cmath>
#include <stdexcept>

#include "lwmy/format.hpp"

namespace lwmy {

LwmyFunctionSpec LwmyFunctionSpec::reciprocal(double alpha) {
    LwmyFunctionSpec s{LwmyFamily::Reciprocal, alpha, 1.0, 1.0};
    validate(s);
    return s;
}
LwmyFunctionSpec LwmyFunctionSpec::f1(double alpha, double beta) {
    LwmyFunctionSpec s{LwmyFamily::F1, alpha, beta, 1.0};
    validate(s);
    return s;
}
LwmyFunctionSpec LwmyFunctionSpec::g1(double alpha, double beta) {
    LwmyFunctionSpec s{LwmyFamily::G1, alpha, beta, 1.0};
    validate(s);
    return s;
}
LwmyFunctionSpec LwmyFunctionSpec::f_delta_star(double delta, double alpha, double beta) {
    LwmyFunctionSpec s{LwmyFamily::FDeltaStar, alpha, beta, delta};
    validate(s);
    return s;
}

void validate(const LwmyFunctionSpec& fn) {
    if (!(fn.alpha > 0.0) || !(fn.beta > 0.0) || !(fn.delta > 0.0))
        throw std::invalid_argument("LwmyFunctionSpec: scales must be positive");
}

std::string to_string(const LwmyFunctionSpec& fn) {
    switch (fn.family) {
        case LwmyFamily::Reciprocal:
            return "reciprocal(" + format_double(fn.alpha) + ")";
        case LwmyFamily::F1:
            return "f1(" + format_double(fn.alpha) + "," + format_double(fn.beta) + ")";
        case LwmyFamily::G1:
            return "g1(" + format_double(fn.alpha) + "," + format_double(fn.beta) + ")";
        case LwmyFamily::FDeltaStar:
            return "fdstar(" + format_double(fn.delta) + "," + format_double(fn.alpha) + "," +
                   format_double(fn.beta) + ")";
    }
    return "?";
}

namespace {

// Base functions at unit scales; u > 0, em = e^{-u}, D = 1 - e^{-u}.

double f1_base(double u, int order) {
    const double em = std::exp(-u);
    const double D = -std::expm1(-u);
    switch (order) {
        case 0: return 1.0 / std::expm1(u);
        case 1: return -em / (D * D);
        case 2: return em * (1.0 + em) / (D * D * D);
        default: return -em * (1.0 + em * (4.0 + em)) / (D * D * D * D);
    }
}

double g1_base(double u, int order) {
    const double w = u * (1.0 + u);
    switch (order) {
        case 0: return std::log1p(1.0 / u);
        case 1: return -1.0 / w;
        case 2: return (2.0 * u + 1.0) / (w * w);
        default: return -2.0 * (3.0 * u * (u + 1.0) + 1.0) / (w * w * w);
    }
}

double fd_base(double u, double delta, int order) {
    const double em = std::exp(-u);
    const double D = -std::expm1(-u);           // 1 - e^{-u}
    const double A = 1.0 + (delta - 1.0) * em;  // e^{-u}(e^u + delta - 1)
    const double AD = A * D;
    switch (order) {
        case 0: return std::log1p(delta / std::expm1(u));
        case 1: return -delta * em / AD;
        case 2: return delta * em * (1.0 + (delta - 1.0) * em * em) / (AD * AD);
        default: {
            const double d1 = delta - 1.0;
            const double em2 = em * em;
            const double num = -em + (delta - 2.0) * em2 - 6.0 * d1 * em2 * em -
                               d1 * (delta - 2.0) * em2 * em2 - d1 * d1 * em2 * em2 * em;
            return delta * num / (AD * AD * AD);
        }
    }
}

void check_positive(double x, const char* what) {
    if (!(x > 0.0)) throw std::domain_error(std::string(what) + ": requires a positive argument");
}

void check_unit_interval(double x, const char* what, bool allow_one) {
    const bool ok = x > 0.0 && (allow_one ? x <= 1.0 : x < 1.0);
    if (!ok) throw std::domain_error(std::string(what) + ": argument outside (0,1)");
}

}  // namespace

double eval(const LwmyFunctionSpec& fn, double x, int order) {
    validate(fn);
    check_positive(x, "eval");
    if (order < 0 || order > 3) throw std::invalid_argument("eval: order must be 0..3");
    const double scale = std::pow(fn.beta, order) / fn.alpha;
    switch (fn.family) {
        case LwmyFamily::Reciprocal:
            switch (order) {
                case 0: return fn.alpha / x;
                case 1: return -fn.alpha / (x * x);
                case 2: return 2.0 * fn.alpha / (x * x * x);
                default: return -6.0 * fn.alpha / (x * x * x * x);
            }
        case LwmyFamily::F1: return scale * f1_base(fn.beta * x, order);
        case LwmyFamily::G1: return scale * g1_base(fn.beta * x, order);
        case LwmyFamily::FDeltaStar: return scale * fd_base(fn.beta * x, fn.delta, order);
    }
    throw std::logic_error("eval: unreachable");
}

LwmyFunctionSpec inverse_spec(const LwmyFunctionSpec& fn) {
    validate(fn);
    switch (fn.family) {
        case LwmyFamily::Reciprocal: return fn;
        case LwmyFamily::F1: return {LwmyFamily::G1, fn.beta, fn.alpha, 1.0};
        case LwmyFamily::G1: return {LwmyFamily::F1, fn.beta, fn.alpha, 1.0};
        case LwmyFamily::FDeltaStar: return {LwmyFamily::FDeltaStar, fn.beta, fn.alpha, fn.delta};
    }
    throw std::logic_error("inverse_spec: unreachable");
}

double eval_inverse(const LwmyFunctionSpec& fn, double y) {
    check_positive(y, "eval_inverse");
    return eval(inverse_spec(fn), y, 0);
}

double big_f(const LwmyFunctionSpec& fn, double x) { return 1.0 / eval(fn, x, 1); }

double big_f_prime(const LwmyFunctionSpec& fn, double x) {
    validate(fn);
    check_positive(x, "big_f_prime");
    const double a = fn.alpha, b = fn.beta, d = fn.delta;
    switch (fn.family) {
        case LwmyFamily::Reciprocal: return -2.0 * x / a;
        case LwmyFamily::F1: return -2.0 * a * std::sinh(b * x);
        case LwmyFamily::G1: return -a * (1.0 + 2.0 * b * x);
        case LwmyFamily::FDeltaStar:
            return a * (d - 2.0) / d * std::sinh(b * x) - a * std::cosh(b * x);
    }
    throw std::logic_error("big_f_prime: unreachable");
}

double big_f_prime0(const LwmyFunctionSpec& fn) {
    validate(fn);
    switch (fn.family) {
        case LwmyFamily::Reciprocal:
        case LwmyFamily::F1: return 0.0;
        case LwmyFamily::G1:
        case LwmyFamily::FDeltaStar: return -fn.alpha;
    }
    throw std::logic_error("big_f_prime0: unreachable");
}

std::array<double, 4> big_f_taylor(const LwmyFunctionSpec& fn) {
    validate(fn);
    const double a = fn.alpha, b = fn.beta, d = fn.delta;
    switch (fn.family) {
        case LwmyFamily::Reciprocal: return {0.0, -1.0 / a, 0.0, 0.0};
        case LwmyFamily::F1: return {0.0, -a * b, 0.0, -a * b * b * b / 12.0};
        case LwmyFamily::G1: return {-a, -a * b, 0.0, 0.0};
        case LwmyFamily::FDeltaStar:
            return {-a, a * b * (d - 2.0) / (2.0 * d), -a * b * b / 6.0,
                    a * b * b * b * (d - 2.0) / (24.0 * d)};
    }
    throw std::logic_error("big_f_taylor: unreachable");
}

TransformSpec TransformSpec::additive(const LwmyFunctionSpec& f) {
    validate(f);
    return {Kind::Additive, f};
}
TransformSpec TransformSpec::multiplicative(const LwmyFunctionSpec& f) {
    validate(f);
    return {Kind::Multiplicative, f};
}
TransformSpec TransformSpec::uv_prime_map() { return {Kind::UVPrimeMap, std::nullopt}; }
TransformSpec TransformSpec::identity() { return {Kind::Identity, std::nullopt}; }

std::string to_string(const TransformSpec& t) {
    switch (t.kind) {
        case TransformSpec::Kind::Additive: return "additive:" + to_string(*t.fn);
        case TransformSpec::Kind::Multiplicative: return "multiplicative:" + to_string(*t.fn);
        case TransformSpec::Kind::UVPrimeMap: return "uvprime";
        case TransformSpec::Kind::Identity: return "identity";
    }
    return "?";
}

std::pair<double, double> apply_transform(const TransformSpec& t, double x, double y) {
    switch (t.kind) {
        case TransformSpec::Kind::Additive: {
            check_positive(x, "apply_transform(additive)");
            check_positive(y, "apply_transform(additive)");
            const double u = eval(*t.fn, x + y, 0);
            return {u, eval(*t.fn, x, 0) - u};
        }
        case TransformSpec::Kind::Multiplicative: {
            check_unit_interval(x, "apply_transform(multiplicative)", false);
            check_unit_interval(y, "apply_transform(multiplicative)", true);
            const BarConjugate fb = bar_conjugate(*t.fn);
            const double u = fb(x * y);
            return {u, fb(x) / u};
        }
        case TransformSpec::Kind::UVPrimeMap: {
            check_positive(x, "apply_transform(uvprime)");
            check_positive(y, "apply_transform(uvprime)");
            const double s = x + y;
            return {x * (s + 1.0) / ((x + 1.0) * s), s};
        }
        case TransformSpec::Kind::Identity: return {x, y};
    }
    throw std::logic_error("apply_transform: unreachable");
}

std::pair<double, double> apply_inverse_transform(const TransformSpec& t, double u, double v) {
    switch (t.kind) {
        case TransformSpec::Kind::Additive: {
            check_positive(u, "apply_inverse_transform(additive)");
            check_positive(v, "apply_inverse_transform(additive)");
            const LwmyFunctionSpec inv = inverse_spec(*t.fn);
            const double x = eval(inv, u + v, 0);
            return {x, eval(inv, u, 0) - x};
        }
        case TransformSpec::Kind::Multiplicative: {
            check_unit_interval(u, "apply_inverse_transform(multiplicative)", false);
            check_unit_interval(v, "apply_inverse_transform(multiplicative)", true);
            const BarConjugate fb = bar_conjugate(inverse_spec(*t.fn));
            const double x = fb(u * v);
            return {x, fb(u) / x};
        }
        case TransformSpec::Kind::UVPrimeMap: {
            check_unit_interval(u, "apply_inverse_transform(uvprime)", false);
            check_positive(v, "apply_inverse_transform(uvprime)");
            const double den = v + 1.0 - u * v;  // = 1 + v(1-u) > 0
            return {u * v / den, v * (v + 1.0) * (1.0 - u) / den};
        }
        case TransformSpec::Kind::Identity: return {u, v};
    }
    throw std::logic_error("apply_inverse_transform: unreachable");
}

double BarConjugate::operator()(double x) const {
    check_unit_interval(x, "bar_conjugate", false);
    return std::exp(-eval(fn, -std::log(x), 0));
}

BarConjugate bar_conjugate(const LwmyFunctionSpec& fn) {
    validate(fn);
    return BarConjugate{fn};
}

double phi_delta(double delta, double x) {
    if (!(delta > 0.0)) throw std::invalid_argument("phi_delta: requires delta > 0");
    check_unit_interval(x, "phi_delta", true);
    return (1.0 - x) / (1.0 + (delta - 1.0) * x);
}

}  // namespace lwmy
