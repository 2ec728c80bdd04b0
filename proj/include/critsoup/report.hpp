#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace critsoup {

/// One line of a statistical report. Non-applicable numeric fields hold NaN.
struct StatRow {
  std::string functional;
  double parameter = 0.0;  // beta, u, alpha... depending on the experiment
  std::size_t n_effective = 0;
  double statistic = 0.0;
  double p_value = 1.0;
  double ratio = 0.0;
  double std_error = 0.0;
  bool gate = false;  // row participates in the experiment verdict
  bool pass = true;
};

/// Named collection of rows plus free-form header notes.
///
/// CSV layout (one header line, then one line per row):
///   experiment,functional,beta,n_effective,statistic,p_value,ratio,std_error
/// The `beta` column carries the row's parameter whatever its meaning in a
/// given experiment. Notes and gate verdicts are only present in the JSON
/// form.
class StatReport {
 public:
  explicit StatReport(std::string experiment) : experiment_(std::move(experiment)) {}

  const std::string& experiment() const { return experiment_; }
  const std::vector<StatRow>& rows() const { return rows_; }
  const std::vector<std::string>& notes() const { return notes_; }

  /// Appends a row. Throws if p_value lies outside [0, 1] or std_error < 0.
  StatRow& add(StatRow row);
  void note(std::string line) { notes_.push_back(std::move(line)); }
  void merge(const StatReport& other);

  /// True iff every gated row passes.
  bool passed() const;
  std::size_t failures() const;

  void write_csv(std::ostream& out, bool header = true) const;
  std::string to_csv(bool header = true) const;
  std::string to_json() const;

 private:
  std::string experiment_;
  std::vector<std::string> notes_;
  std::vector<StatRow> rows_;
};

}  // namespace critsoup
