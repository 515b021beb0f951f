#ifndef LWMY_FUNCTIONS_HPP
#define LWMY_FUNCTIONS_HPP

#include <array>
#include <optional>
#include <string>
#include <utility>

namespace lwmy {

/// The four families of decreasing bijections (0,inf) -> (0,inf) this library
/// works with, each strictly decreasing with closed-form derivatives:
///   Reciprocal   f(x) = alpha / x
///   F1           f(x) = (1/alpha) * f1(beta x),       f1(x) = 1/(e^x - 1)
///   G1           f(x) = (1/alpha) * g1(beta x),       g1(x) = ln((1+x)/x)
///   FDeltaStar   f(x) = (1/alpha) * fd(beta x),       fd(x) = ln((e^x+delta-1)/(e^x-1))
/// f1 and g1 are mutual inverses; Reciprocal and FDeltaStar (alpha=beta=1)
/// are involutions.
enum class LwmyFamily { Reciprocal, F1, G1, FDeltaStar };

struct LwmyFunctionSpec {
    LwmyFamily family = LwmyFamily::Reciprocal;
    double alpha = 1.0;
    double beta = 1.0;
    double delta = 1.0;  // FDeltaStar only

    static LwmyFunctionSpec reciprocal(double alpha = 1.0);
    static LwmyFunctionSpec f1(double alpha = 1.0, double beta = 1.0);
    static LwmyFunctionSpec g1(double alpha = 1.0, double beta = 1.0);
    static LwmyFunctionSpec f_delta_star(double delta, double alpha = 1.0, double beta = 1.0);

    bool operator==(const LwmyFunctionSpec&) const = default;
};

void validate(const LwmyFunctionSpec& fn);
std::string to_string(const LwmyFunctionSpec& fn);

/// f(x) (order 0) or the closed-form derivative f'(x), f''(x), f'''(x)
/// (order 1..3). Evaluation uses expm1/log1p rearrangements throughout, so
/// x near 0 and large x are safe.
double eval(const LwmyFunctionSpec& fn, double x, int order = 0);

/// The inverse bijection as a spec of the same four families:
/// Reciprocal <-> Reciprocal, F1 <-> G1 (scales swapped), FDeltaStar <-> FDeltaStar.
LwmyFunctionSpec inverse_spec(const LwmyFunctionSpec& fn);

/// f^{-1}(y), evaluated through the closed-form inverse family.
double eval_inverse(const LwmyFunctionSpec& fn, double y);

/// F(x) = 1/f'(x); negative on all of (0,inf).
double big_f(const LwmyFunctionSpec& fn, double x);
/// F'(x) in closed form.
double big_f_prime(const LwmyFunctionSpec& fn, double x);
/// F'(0+), the leading Taylor coefficient of F.
double big_f_prime0(const LwmyFunctionSpec& fn);
/// First four Taylor coefficients a1..a4 of F at 0+.
std::array<double, 4> big_f_taylor(const LwmyFunctionSpec& fn);

/// Pair transformations on sample couples.
///   Additive        (x,y) in (0,inf)^2  -> (f(x+y), f(x)-f(x+y))
///   Multiplicative  (x,y) in (0,1)^2    -> (fb(xy), fb(x)/fb(xy)) with fb the
///                   (0,1)-conjugate of fn (see bar_conjugate)
///   UVPrimeMap      (u,v) in (0,inf)^2  -> ((1+1/(u+v))/(1+1/u), u+v)
///   Identity        pass-through (control transform)
struct TransformSpec {
    enum class Kind { Additive, Multiplicative, UVPrimeMap, Identity };
    Kind kind = Kind::Identity;
    std::optional<LwmyFunctionSpec> fn;  // Additive/Multiplicative only

    static TransformSpec additive(const LwmyFunctionSpec& f);
    static TransformSpec multiplicative(const LwmyFunctionSpec& f);
    static TransformSpec uv_prime_map();
    static TransformSpec identity();
};

std::string to_string(const TransformSpec& t);

std::pair<double, double> apply_transform(const TransformSpec& t, double x, double y);
std::pair<double, double> apply_inverse_transform(const TransformSpec& t, double u, double v);

/// The (0,1)-conjugate fb(x) = exp(-f(-log x)), a decreasing bijection of
/// (0,1) onto itself. For FDeltaStar with alpha=beta=1 it coincides with the
/// homographic map phi_delta.
struct BarConjugate {
    LwmyFunctionSpec fn;
    double operator()(double x) const;
};
BarConjugate bar_conjugate(const LwmyFunctionSpec& fn);

/// phi_delta(x) = (1-x)/(1+(delta-1)x) on (0,1); equal to its own inverse.
double phi_delta(double delta, double x);

}  // namespace lwmy

#endif
