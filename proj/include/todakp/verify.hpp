#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "todakp/soliton_data.hpp"

namespace todakp {

struct CheckRecord {
  std::string name;
  int trials = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::vector<CheckRecord> checks;
  std::uint64_t seed = 0;
  int trials = 0;
  int n_max = 0;
  std::string environment;
  double runtime_seconds = 0.0;
  bool all_pass() const {
    for (const auto &c : checks)
      if (!c.pass) return false;
    return !checks.empty();
  }
};

struct VerifyConfig {
  std::uint64_t seed = 42;
  int trials = 100;
  int n_max = 8;
};

// Deterministic random instances: n uniform in [2, n_max], kappa sorted
// uniforms in [-2.5, 2.5] with a gap floor, weights positive uniforms.
class InstanceSampler {
public:
  explicit InstanceSampler(std::uint64_t seed) : rng_(seed) {}
  SolitonData draw(int n_max);
  SolitonData draw_fixed_n(int n);
  TimeVector draw_time(int order, double amplitude);
  double uniform(double lo, double hi);
  int uniform_int(int lo, int hi);

private:
  std::mt19937_64 rng_;
};

// Runs every module invariant over `trials` random instances plus the fixed
// worked instances; failures are recorded, not thrown.
VerificationReport verify_suite(const VerifyConfig &config);

std::string report_to_json(const VerificationReport &report,
                           bool include_timing = true);

}  // namespace todakp
