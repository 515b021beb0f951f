#ifndef LWMY_VERIFIER_HPP
#define LWMY_VERIFIER_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lwmy/distributions.hpp"
#include "lwmy/lwmy_functions.hpp"
#include "lwmy/numerics.hpp"

namespace lwmy {

struct IndependenceTestResult {
    double statistic = 0.0;  // chi-square on the quantile-binned contingency table
    int dof = 0;             // (rows-1)(cols-1)
    double p_value = 1.0;
    int rows = 0, cols = 0;
    long n = 0;
    std::uint64_t seed = 0, stream_id = 0;
};

struct GoodnessOfFitResult {
    double ks_statistic = 0.0;
    double p_value = 1.0;
    long n = 0;
    std::string target;  // readable spec of the tested law
};

struct ResidualReport {
    double max_abs_residual = 0.0;
    std::vector<std::pair<double, double>> grid;
    enum class DerivMode { Analytic, FiniteDifference };
    DerivMode derivative_mode = DerivMode::Analytic;
};

/// Negative-control hook: Duplicated feeds Y := X into the transform, giving
/// perfectly dependent inputs.
enum class PairSampling { Independent, Duplicated };

/// Two-sided Kolmogorov-Smirnov test of samples against the quadrature CDF of
/// `target` (asymptotic p-value with the Stephens small-sample correction).
GoodnessOfFitResult ks_test(std::span<const double> samples, const DistributionSpec& target);

/// Chi-square independence test on a rows x cols contingency table built from
/// per-marginal empirical quantile bins of the (u,v) pairs.
IndependenceTestResult chi_square_independence(std::span<const double> u,
                                               std::span<const double> v, int bins);

/// Chi-square of samples against `bins` equal-probability cells of the
/// quadrature CDF of `target` (dof = bins - 1); the sampler hygiene check.
struct ChiSquareGofResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    long n = 0;
};
ChiSquareGofResult chi_square_gof(std::span<const double> samples, const DistributionSpec& target,
                                  int bins);

/// Samples (X,Y) from the product law, pushes the pairs through `t`, and
/// tests independence of the transformed pair.
IndependenceTestResult check_independence(const DistributionSpec& law_x,
                                          const DistributionSpec& law_y, const TransformSpec& t,
                                          long n, int bins, RngStream& rng,
                                          PairSampling pairing = PairSampling::Independent);

/// KS test of existing samples against a target law.
GoodnessOfFitResult check_marginal(std::span<const double> samples,
                                   const DistributionSpec& target);

/// Samples X and Y independently and KS-tests X+Y against `target`.
GoodnessOfFitResult check_convolution(const DistributionSpec& law_x,
                                      const DistributionSpec& law_y,
                                      const DistributionSpec& target, long n, RngStream& rng);

/// Pushes a product law through `t`, KS-tests both output marginals, and
/// chi-square-tests the independence of the outputs.
struct PushforwardResult {
    GoodnessOfFitResult first_marginal;
    GoodnessOfFitResult second_marginal;
    IndependenceTestResult independence;
};
PushforwardResult check_pushforward(const DistributionSpec& law_x, const DistributionSpec& law_y,
                                    const TransformSpec& t, const DistributionSpec& target_u,
                                    const DistributionSpec& target_v, long n, int bins,
                                    RngStream& rng);

/// Log-density with two derivatives, the object the functional-equation
/// residual consumes. `analytic` uses the closed forms (chain rule for image
/// laws); `finite_difference` uses Richardson-extrapolated central stencils.
struct LogDensity {
    DistributionSpec law;
    ResidualReport::DerivMode mode = ResidualReport::DerivMode::Analytic;
    LogDensityDerivs derivs(double x) const;
};

/// Pointwise residual of the independence functional equation
///   phiX''(x) - phiX'(x) f''/f'(x) + phiY''(y) (1 - f'(x)/f'(x+y))
///     + phiY'(y) f''/f'(x) + (2 f''(x)^2 - f'''(x) f'(x)) / f'(x)^2 = 0
/// evaluated over the grid; a transform/law triple satisfies the independence
/// property exactly when this vanishes identically.
double cns_residual_at(const LwmyFunctionSpec& fn, const LogDensity& phi_x,
                       const LogDensity& phi_y, double x, double y);
ResidualReport functional_equation_residual(const LwmyFunctionSpec& fn, const LogDensity& phi_x,
                                            const LogDensity& phi_y,
                                            const std::vector<std::pair<double, double>>& grid);

/// Log-spaced n x n grid on [lo,hi]^2, the default residual lattice.
std::vector<std::pair<double, double>> residual_grid(double lo, double hi, int n);

}  // namespace lwmy

#endif
