// Runs every acceptance criterion and prints one line per criterion.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <vector>

#include "pelliptic/suite.hpp"

using namespace pell;

int main(int argc, char** argv) {
  SuiteConfig cfg;
  cfg.seed = 42;
  cfg.digest = digest_of("acceptance seed=42");
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty())
    for (int i = 1; i <= kCriteria; ++i) ids.push_back(i);

  int failed = 0;
  for (int id : ids) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = false;
    try {
      const CriterionOutcome out = run_criterion(id, cfg);
      pass = out.pass();
      int ok = 0;
      for (const ReportRow& r : out.rows) {
        if (r.pass) {
          ++ok;
        } else if (detail.empty()) {
          char buf[256];
          std::snprintf(buf, sizeof buf, "; first failure %s/%s value %.3g bound %.3g",
                        r.experiment_id.c_str(), r.metric.c_str(), r.value, r.bound);
          detail = buf;
        }
      }
      detail = std::to_string(ok) + "/" + std::to_string(out.rows.size()) + " rows" + detail;
    } catch (const std::exception& e) {
      detail = std::string("error: ") + e.what();
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d %-32s %s (%s, %.1fs)\n", id, criterion_title(id).c_str(),
                pass ? "PASS" : "FAIL", detail.c_str(), sec);
    std::fflush(stdout);
    if (!pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
