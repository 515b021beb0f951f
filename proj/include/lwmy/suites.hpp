#ifndef LWMY_SUITES_HPP
#define LWMY_SUITES_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lwmy/distributions.hpp"

namespace lwmy::suites {

/// One named experiment run: the suite, its numeric parameters, the seed list
/// and test sizes. Unknown parameter keys are rejected at parse time.
struct SuiteConfig {
    std::string suite;
    std::map<std::string, double> params;  // suite-specific numeric parameters
    std::vector<std::uint64_t> seeds;      // defaults to seed, seed+1, ..., seed+num_seeds-1
    long n = 100000;
    int bins = 20;
    int jobs = 1;
};

struct CheckRecord {
    std::string check;    // independence | ks | chi2-gof | residual | classify | ...
    std::string inputs;   // readable description of laws and transform
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    long n = 0;
    double statistic = 0.0;
    std::optional<double> p_value;
    std::optional<double> residual;
    double threshold = 0.0;
    bool pass = false;
};

struct CheckSummary {
    std::string check;
    int passes = 0;
    int total = 0;
    int required = 0;
    bool pass = false;
};

struct SuiteReport {
    std::string suite;
    std::map<std::string, double> parameters;
    std::vector<std::uint64_t> seeds;
    long n = 0;
    int bins = 0;
    std::vector<CheckRecord> checks;
    std::vector<CheckSummary> summaries;
    bool pass = false;

    /// Deterministic JSON document (byte-identical for identical configs).
    std::string to_json() const;
};

/// The complete public suite surface.
std::vector<std::string> suite_names();
bool is_suite(const std::string& name);
/// Default parameters of a suite (also the set of accepted parameter keys).
std::map<std::string, double> suite_defaults(const std::string& name);

/// Runs a named suite; throws std::invalid_argument on unknown suites,
/// unknown parameter keys, or parameters violating operation preconditions.
SuiteReport run_suite(const SuiteConfig& config);

/// Parses a readable law string: gig(mu,a,b), gamma(shape,rate), beta(a,b),
/// kummer2(a,b,c), betaalpha(alpha,a,b,c), and the image wrappers
/// neglog(<law>), recip(<law>), g1image(<law>).
DistributionSpec parse_distribution(const std::string& text);

/// Parses a flat key=value config file ('#' comments, blank lines skipped).
std::vector<std::pair<std::string, std::string>> parse_config_file(const std::string& path);

}  // namespace lwmy::suites

#endif
