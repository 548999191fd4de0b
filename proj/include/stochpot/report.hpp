#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stochpot {

// One verification row: the paper's closed form, the independent oracle value
// (quadrature / exact), and the Monte Carlo estimate with its batch-means
// standard error. Verdicts assert against the oracle; paper rows are notes.
struct MomentReport {
  std::string statistic;
  double paper_value = 0.0;
  double oracle_value = 0.0;
  double mc_estimate = 0.0;
  double mc_stderr = 0.0;
  long n_samples = 0;
  std::string provenance;  // which source the verdict asserts against
  std::string verdict;     // "pass", "fail", or "note:..."

  static MomentReport oracle_row(const std::string& stat, double paper, double oracle, double mc,
                                 double se, long n, double n_sigma = 3.0);
  static MomentReport paper_note(const std::string& stat, double paper, double oracle, double mc,
                                 double se, long n, double n_sigma = 3.0);
  static MomentReport exact_row(const std::string& stat, double expected, double got, double tol);
  static MomentReport info_row(const std::string& stat, double value);

  bool failed() const { return verdict == "fail"; }
};

struct ReportSet {
  std::string id;  // e.g. "thm_3_6"
  std::vector<MomentReport> rows;

  void add(MomentReport r) { rows.push_back(std::move(r)); }
  bool all_passed() const;
  int fail_count() const;
};

void write_csv(const ReportSet& r, std::ostream& os);
void write_json(const ReportSet& r, std::ostream& os);
void print_summary(const ReportSet& r, std::ostream& os);

}  // namespace stochpot
