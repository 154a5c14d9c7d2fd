#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace pell {

struct ReportRow {
  std::string experiment_id, metric;
  double value = 0, bound = 0, margin = 0, tolerance = 0;
  bool pass = false;
  double h = 0;  // grid step, 0 when no grid is involved
  int n_t = 0;   // time steps, 0 when no flow is involved
  std::uint64_t seed = 0;
  std::string provenance;  // config digest
};

struct SuiteConfig {
  std::uint64_t seed = 42;
  std::string digest;
};

inline constexpr int kCriteria = 10;

struct CriterionOutcome {
  int id = 0;
  std::string title;
  std::vector<ReportRow> rows;
  bool pass() const;
};

std::string criterion_title(int id);
// Each criterion draws from streams keyed by (seed, id, sub-experiment).
CriterionOutcome run_criterion(int id, const SuiteConfig& cfg);

void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const ReportRow& r);
// 16 hex digits of a 64-bit hash.
std::string digest_of(const std::string& text);

}  // namespace pell
