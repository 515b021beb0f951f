#ifndef LWMY_NUMERICS_HPP
#define LWMY_NUMERICS_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>

namespace lwmy {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Integration domain; lo/hi may be -inf/+inf (half-infinite or full line).
struct Interval {
    double lo;
    double hi;
};

struct QuadratureResult {
    double value;
    double error_estimate;  // absolute, always >= 0
    long evaluations;       // integrand calls, always >= 1
};

/// Thrown when the adaptive integrator exhausts its evaluation budget
/// before reaching the requested tolerance.
class QuadratureError : public std::runtime_error {
  public:
    explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-12;            // stop when err <= max(abs_tol, rel_tol*|value|)
    long max_evaluations = 4'000'000;  // budget before QuadratureError
};

/// One converged panel of an adaptive run, reported in the original
/// (untransformed) coordinate; hi may be +inf for the outermost tail panel.
struct QuadPanel {
    double lo, hi;
    double value;
    double err;
};

/// Adaptive panel integration: Gauss-Legendre 10/21 pair per panel, bisection
/// of the worst panel until the summed error estimate meets the tolerance.
/// Half-infinite domains are folded to [0,1) by x = a + t/(1-t) (mirrored for
/// upper-infinite ends); the full line splits at 0. Endpoints are never
/// evaluated, so integrable endpoint singularities are handled by refinement.
/// When `panels` is non-null the final panel partition is returned, sorted,
/// for callers that cache cumulative integrals.
QuadratureResult integrate(const std::function<double(double)>& fn, Interval domain,
                           const QuadratureOptions& opt, std::vector<QuadPanel>* panels = nullptr);
QuadratureResult integrate(const std::function<double(double)>& fn, Interval domain,
                           double tol);

/// One (G10, G21) rule application on a finite [a,b] without adaptivity;
/// err receives |G21 - G10|. The fast path for many tiny sub-panel integrals.
double gauss_panel(const std::function<double(double)>& fn, double a, double b, double* err);

/// ln Gamma(x) for x > 0. Thin wrapper with the domain check this library
/// relies on everywhere; accuracy is that of the platform lgamma.
double log_gamma_fn(double x);

/// ln K_nu(z), the modified Bessel function of the second kind, for real nu
/// and z > 0. Symmetric in nu. Temme series for z <= 2, Steed continued
/// fraction for z > 2, then upward recurrence on the order carried as
/// (log value, ratio) so large orders cannot overflow.
double log_bessel_k(double nu, double z);

/// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x),
/// a > 0, x >= 0. Series / continued-fraction split at x = a + 1.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

/// Counter-based pseudo-random stream (Philox4x32-10).
///
/// The generator is fixed so that reports are bit-reproducible:
///   key     = (seed mod 2^32, seed div 2^32)
///   counter = (block mod 2^32, block div 2^32, stream mod 2^32, stream div 2^32)
/// where `block` counts 128-bit outputs from 0. Each block yields two 64-bit
/// words (word0 | word1<<32, word2 | word3<<32). uniform() maps a 64-bit draw
/// to ((u >> 11) + 0.5) * 2^-53, strictly inside (0,1). normal() is the
/// Marsaglia polar method (second variate cached). Streams with distinct
/// stream ids use disjoint counter blocks and are independent by construction.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : seed_(seed), stream_(stream_id) {}

    std::uint64_t next_u64();
    double uniform();                   // (0,1), both endpoints excluded
    double normal();                    // standard normal
    double exponential(double rate);    // rate > 0

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_; }

    /// One Philox4x32-10 block, exposed for known-answer tests.
    static std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                                   const std::array<std::uint32_t, 2>& key);

  private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int buf_pos_ = 4;
    bool has_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

}  // namespace lwmy

#endif
