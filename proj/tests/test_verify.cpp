#include <string>

#include "doctest.h"
#include "todakp/verify.hpp"

using namespace todakp;

TEST_CASE("the suite passes on a seeded instance stream") {
  VerifyConfig cfg;
  cfg.seed = 7;
  cfg.trials = 10;
  cfg.n_max = 6;
  VerificationReport rep = verify_suite(cfg);
  REQUIRE(rep.checks.size() > 30);
  for (const auto &c : rep.checks) {
    CAPTURE(c.name);
    CHECK(c.trials > 0);
    CHECK(c.pass);
  }
  CHECK(rep.all_pass());
  CHECK(rep.seed == 7);
  CHECK(rep.trials == 10);
  CHECK(rep.n_max == 6);
  CHECK(rep.runtime_seconds > 0.0);
}

TEST_CASE("the report is deterministic for a fixed seed") {
  VerifyConfig cfg;
  cfg.seed = 42;
  cfg.trials = 5;
  cfg.n_max = 5;
  std::string a = report_to_json(verify_suite(cfg), false);
  std::string b = report_to_json(verify_suite(cfg), false);
  CHECK(a == b);
  CHECK(a.find("\"checks\"") != std::string::npos);
  CHECK(a.find("\"all_pass\": true") != std::string::npos);
  CHECK(a.find("runtime_seconds") == std::string::npos);
}

TEST_CASE("different seeds draw different instance streams") {
  VerifyConfig ca, cb;
  ca.seed = 1;
  cb.seed = 2;
  ca.trials = cb.trials = 3;
  ca.n_max = cb.n_max = 5;
  CHECK(report_to_json(verify_suite(ca), false) !=
        report_to_json(verify_suite(cb), false));
}
