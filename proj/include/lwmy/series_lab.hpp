#ifndef LWMY_SERIES_LAB_HPP
#define LWMY_SERIES_LAB_HPP

#include <array>
#include <functional>
#include <stdexcept>
#include <vector>

#include "lwmy/lwmy_functions.hpp"
#include "lwmy/numerics.hpp"

namespace lwmy {

/// Truncated power series F(x) = sum_{n>=1} a_n x^n of a reciprocal-derivative
/// profile F = 1/f'. Index 0 is kept at zero (F(0+) = 0).
struct CoefficientTable {
    std::vector<double> a;  // a[k] = a_k, a[0] == 0
    int n_max = 0;
    int seeded_prefix = 0;  // how many leading coefficients were inputs

    double at(int k) const { return (k >= 0 && k <= n_max) ? a[static_cast<std::size_t>(k)] : 0.0; }

    /// {"seed": [...], "n_max": N, "coefficients": [a1..aN]}
    std::string to_json() const;
};

/// A seed that cannot belong to any profile (contradictory recurrence rows).
class InconsistentSeriesError : public std::runtime_error {
  public:
    explicit InconsistentSeriesError(const std::string& what) : std::runtime_error(what) {}
};

/// No branch of the classification admits the table's sign pattern.
class ClassificationError : public std::runtime_error {
  public:
    explicit ClassificationError(const std::string& what) : std::runtime_error(what) {}
};

/// Extends a1..a4 to n_max coefficients with the two recurrence rows the
/// delay equation induces, checking the remaining rows as consistency
/// constraints (relative defect above 1e-10 is an error):
///   binom(k+3,k) a_{k+3} a_1 = (k+1) a_{k+1} a_3
///   2 binom(k+4,k) a_{k+4} a_1 + binom(k+3,k) a_{k+3} a_2
///     - binom(k+2,k) a_{k+2} a_3 - 2(k+1) a_{k+1} a_4 = 0
/// With a_1 = 0 all odd coefficients vanish and the even ones follow
/// a_{2k} = (12 a_4/a_2)^{k-1} * 2/(2k)! * a_2.
CoefficientTable extend_coefficients(const std::array<double, 4>& seed, int n_max);

struct ClassificationOutcome {
    enum class Branch { QuadraticA2x2, CoshBranch, LinearQuadratic, CoshSinhBranch };
    Branch branch;
    double cosh_amplitude = 0.0;  // A in F = A(cosh(rate x) - 1) + B sinh(rate x)
    double sinh_amplitude = 0.0;  // B (CoshSinhBranch only)
    double rate = 0.0;            // 0 for the polynomial branches
    LwmyFunctionSpec matched_family;
};

/// Recovers the closed-form branch and the function-family scales from the
/// leading coefficients. Throws ClassificationError when the sign conditions
/// exclude every branch (e.g. a profile that would vanish at a positive
/// point, which 1/f' of a decreasing bijection cannot do).
ClassificationOutcome classify(const CoefficientTable& table);

/// One-line summary, e.g. "branch=cosh-sinh family=fdstar(2,1,1) rate=1".
std::string to_string(const ClassificationOutcome& outcome);

/// Largest defect of the full product identity
///   sum_{m=0}^{l-1} (l-2m+1) binom(l-m+1+k,k) a_{l-m+1+k} a_m
///     = (l-2)(k+1) a_{k+1} a_l + a_1 a_{l+k} binom(l+k,k)
/// over 0 <= k <= k_max, 1 <= l <= l_max, scaled per row by the largest
/// participating term.
double verify_comb20(const CoefficientTable& table, int k_max, int l_max);

/// A profile F with derivative and the one-sided derivative at 0.
struct ProfileF {
    std::function<double(double)> value;
    std::function<double(double)> deriv;
    double deriv_at_zero = 0.0;
};

/// F and F' of the four function families in closed form.
ProfileF profile_from_spec(const LwmyFunctionSpec& fn);

/// Residual of the self-contained delay identity
///   F'(x+y) = (F'(y) + F'(0+))/F(y) * (F(x+y) - F(x)) - F'(x),
/// zero for every classified profile.
double delay_residual(const ProfileF& f, double x, double y);

/// Dense solution of a scalar first-order ODE on a range, cubic-Hermite
/// interpolated between nodes.
struct OdeSolution {
    std::vector<double> y;      // ascending nodes
    std::vector<double> h;      // solution values
    std::vector<double> slope;  // right-hand side at the nodes
    double operator()(double yq) const;
};

/// Integrates h'(y) = (lambda0 - h(y) fprime0) / F(y) from y_range.lo with
/// h(y_range.lo) = h0 by the classical fourth-order scheme, halving the step
/// until two refinements agree to 1e-8. Solutions of this equation are the
/// log-density derivatives of the second transform input.
OdeSolution solve_h(const std::function<double(double)>& F, double lambda0, double fprime0,
                    Interval y_range, double h0);

}  // namespace lwmy

#endif
