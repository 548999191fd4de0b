#include "stochpot/report.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace stochpot {

MomentReport MomentReport::oracle_row(const std::string& stat, double paper, double oracle,
                                      double mc, double se, long n, double n_sigma) {
  MomentReport r;
  r.statistic = stat;
  r.paper_value = paper;
  r.oracle_value = oracle;
  r.mc_estimate = mc;
  r.mc_stderr = se;
  r.n_samples = n;
  r.provenance = "oracle";
  const double band = n_sigma * se;
  r.verdict = std::abs(mc - oracle) <= band ? "pass" : "fail";
  return r;
}

MomentReport MomentReport::paper_note(const std::string& stat, double paper, double oracle,
                                      double mc, double se, long n, double n_sigma) {
  MomentReport r;
  r.statistic = stat;
  r.paper_value = paper;
  r.oracle_value = oracle;
  r.mc_estimate = mc;
  r.mc_stderr = se;
  r.n_samples = n;
  r.provenance = "paper";
  const double band = n_sigma * se;
  r.verdict = std::abs(mc - paper) <= band ? "note:paper-agrees" : "note:paper-disagrees";
  return r;
}

MomentReport MomentReport::exact_row(const std::string& stat, double expected, double got,
                                     double tol) {
  MomentReport r;
  r.statistic = stat;
  r.oracle_value = expected;
  r.mc_estimate = got;
  r.mc_stderr = 0.0;
  r.n_samples = 0;
  r.provenance = "oracle";
  r.verdict = std::abs(got - expected) <= tol ? "pass" : "fail";
  return r;
}

MomentReport MomentReport::info_row(const std::string& stat, double value) {
  MomentReport r;
  r.statistic = stat;
  r.oracle_value = value;
  r.mc_estimate = value;
  r.provenance = "mc";
  r.verdict = "note:reported";
  return r;
}

bool ReportSet::all_passed() const { return fail_count() == 0; }

int ReportSet::fail_count() const {
  int n = 0;
  for (const auto& r : rows)
    if (r.failed()) ++n;
  return n;
}

namespace {
std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}
}  // namespace

void write_csv(const ReportSet& r, std::ostream& os) {
  os << "statistic,paper_value,oracle_value,mc_estimate,mc_stderr,n_samples,provenance,verdict\n";
  for (const auto& row : r.rows) {
    os << row.statistic << ',' << fmt(row.paper_value) << ',' << fmt(row.oracle_value) << ','
       << fmt(row.mc_estimate) << ',' << fmt(row.mc_stderr) << ',' << row.n_samples << ','
       << row.provenance << ',' << row.verdict << '\n';
  }
}

void write_json(const ReportSet& r, std::ostream& os) {
  os << "{\n  \"id\": \"" << r.id << "\",\n  \"rows\": [\n";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    os << "    {\"statistic\": \"" << row.statistic << "\", \"paper_value\": " << fmt(row.paper_value)
       << ", \"oracle_value\": " << fmt(row.oracle_value)
       << ", \"mc_estimate\": " << fmt(row.mc_estimate) << ", \"mc_stderr\": " << fmt(row.mc_stderr)
       << ", \"n_samples\": " << row.n_samples << ", \"provenance\": \"" << row.provenance
       << "\", \"verdict\": \"" << row.verdict << "\"}";
    os << (i + 1 < r.rows.size() ? ",\n" : "\n");
  }
  os << "  ]\n}\n";
}

void print_summary(const ReportSet& r, std::ostream& os) {
  for (const auto& row : r.rows) {
    os << "  [" << row.verdict << "] " << row.statistic << ": mc=" << fmt(row.mc_estimate)
       << " oracle=" << fmt(row.oracle_value);
    if (row.provenance == "paper") os << " paper=" << fmt(row.paper_value);
    if (row.mc_stderr > 0) os << " +- " << fmt(row.mc_stderr);
    os << '\n';
  }
}

}  // namespace stochpot
