#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vrjp {

enum class Verdict { Pass, Fail, Inconclusive };

struct CheckResult {
  std::string name;
  Verdict verdict = Verdict::Pass;
  std::string detail;  // instance, observed value, bound, tolerance
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckResult> checks;
  Verdict overall() const;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  int threads = 1;
  // desk-scale statistical defaults
  std::uint64_t mixture_runs = 1'000'000;
  int mixture_fields_per_chain = 25'000;
  int sampler_samples_per_chain = 15'000;
  int sampler_burnin = 2'000;
  int chains = 4;
};

SuiteResult verify_density(const VerifyOptions& opt);
SuiteResult verify_moments(const VerifyOptions& opt);
SuiteResult verify_tilt(const VerifyOptions& opt);
SuiteResult verify_convexity(const VerifyOptions& opt);
SuiteResult verify_taylor(const VerifyOptions& opt);
SuiteResult verify_mixture(const VerifyOptions& opt);
SuiteResult verify_deformation(const VerifyOptions& opt);

// suite in {density, moments, tilt, convexity, taylor, mixture, deformation,
// all}; throws std::invalid_argument otherwise.
std::vector<SuiteResult> run_verify_suite(const std::string& suite,
                                          const VerifyOptions& opt);

const char* verdict_name(Verdict v);

}  // namespace vrjp
