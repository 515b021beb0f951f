#ifndef LWMY_DISTRIBUTIONS_HPP
#define LWMY_DISTRIBUTIONS_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lwmy/lwmy_functions.hpp"
#include "lwmy/numerics.hpp"

namespace lwmy {

struct DistributionSpec;

/// Strictly decreasing smooth bijection with closed-form inverse and
/// derivatives, used to push a base law forward.
///   NegLog: z -> -log z, (0,1) -> (0,inf)
///   Lwmy:   one of the four function families, (0,inf) -> (0,inf)
struct ImageMap {
    enum class Kind { NegLog, Lwmy };
    Kind kind = Kind::NegLog;
    LwmyFunctionSpec fn{};  // Lwmy only

    static ImageMap neg_log();
    static ImageMap lwmy(const LwmyFunctionSpec& f);

    double forward(double x) const;
    double inverse(double u) const;
    /// Derivatives of the inverse map s = m^{-1} at u (orders 1..3).
    double inverse_deriv(double u, int order) const;
    Interval map_support(Interval base) const;
};

std::string to_string(const ImageMap& m);

// Parameter blocks. Supports are open intervals; densities off-support are 0.
struct GigParams { double mu, a, b; };              // x^{mu-1} exp(-(a^2/x + b^2 x)/2) on (0,inf)
struct GammaParams { double shape, rate; };         // x^{shape-1} e^{-rate x} on (0,inf)
struct BetaParams { double a, b; };                 // x^{a-1} (1-x)^{b-1} on (0,1)
struct Kummer2Params { double a, b, c; };           // x^{a-1} (1+x)^{-a-b} e^{-cx} on (0,inf)
struct BetaAlphaParams { double alpha, a, b, c; };  // x^{a-1}(1-x)^{b-1}(alpha x+1-x)^c on (0,1)
struct ImageParams {
    std::shared_ptr<const DistributionSpec> base;
    ImageMap map;
};

struct DistributionSpec {
    std::variant<GigParams, GammaParams, BetaParams, Kummer2Params, BetaAlphaParams, ImageParams>
        value;
};

DistributionSpec make_gig(double mu, double a, double b);
DistributionSpec make_gamma(double shape, double rate);
DistributionSpec make_beta(double a, double b);
DistributionSpec make_kummer2(double a, double b, double c);
DistributionSpec make_beta_alpha(double alpha, double a, double b, double c);
/// Push `base` forward through `map`; log_pdf applies the change-of-variables
/// formula and sampling maps base draws.
DistributionSpec image_law(const DistributionSpec& base, const ImageMap& map);

/// Throws std::invalid_argument when parameters leave the convergence domain
/// (this is also the "divergent integral" guard for normalizing constants).
void validate(const DistributionSpec& spec);
std::string to_string(const DistributionSpec& spec);
Interval support(const DistributionSpec& spec);

/// log of the normalized density; -inf off the open support (total function).
double log_pdf(const DistributionSpec& spec, double x);

/// First and second derivative of log pdf at an interior point of the
/// support. Closed forms for the base families and chain rule for image laws;
/// the finite-difference variant exists as an independent cross-check.
struct LogDensityDerivs { double d1, d2; };
LogDensityDerivs log_pdf_derivs(const DistributionSpec& spec, double x);
LogDensityDerivs log_pdf_derivs_fd(const DistributionSpec& spec, double x);

/// The constant C such that pdf(x) = C * kernel(x); computed by quadrature of
/// the kernel and memoized per spec. For image laws this is the base constant.
double normalizing_constant(const DistributionSpec& spec);

/// CDF by quadrature of the pdf. Monotone in x, 0 below support, 1 above.
double cdf(const DistributionSpec& spec, double x);
/// CDF at many ascending points in one sweep (one small panel per gap).
std::vector<double> cdf_many(const DistributionSpec& spec, std::span<const double> sorted_xs);
/// Inverse CDF by bisection on the cached cumulative table.
double quantile(const DistributionSpec& spec, double p);

struct SampleBatch {
    std::vector<double> values;
    DistributionSpec spec;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    double acceptance_rate = 1.0;  // accepted / proposed over all rejection loops

    void write_csv(std::ostream& os, bool with_values = true) const;
    std::string to_json(bool with_values = true) const;
};

/// Exact sampling (rejection based; no approximations). Deterministic given
/// (spec, n, rng state).
SampleBatch sample(const DistributionSpec& spec, long n, RngStream& rng);

}  // namespace lwmy

#endif
