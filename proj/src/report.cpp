#include "critsoup/report.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace critsoup {
namespace {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

nlohmann::json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

StatRow& StatReport::add(StatRow row) {
  if (!std::isnan(row.p_value) && (row.p_value < 0.0 || row.p_value > 1.0)) {
    throw std::invalid_argument("StatReport: p-value outside [0, 1] in row " + row.functional);
  }
  if (!std::isnan(row.std_error) && row.std_error < 0.0) {
    throw std::invalid_argument("StatReport: negative standard error in row " + row.functional);
  }
  rows_.push_back(std::move(row));
  return rows_.back();
}

void StatReport::merge(const StatReport& other) {
  for (const auto& n : other.notes_) notes_.push_back(n);
  for (const auto& r : other.rows_) rows_.push_back(r);
}

bool StatReport::passed() const { return failures() == 0; }

std::size_t StatReport::failures() const {
  std::size_t n = 0;
  for (const auto& r : rows_) {
    if (r.gate && !r.pass) ++n;
  }
  return n;
}

void StatReport::write_csv(std::ostream& out, bool header) const {
  if (header) out << "experiment,functional,beta,n_effective,statistic,p_value,ratio,std_error\n";
  for (const auto& r : rows_) {
    out << experiment_ << ',' << r.functional << ',' << format_number(r.parameter) << ',' << r.n_effective << ','
        << format_number(r.statistic) << ',' << format_number(r.p_value) << ',' << format_number(r.ratio) << ','
        << format_number(r.std_error) << '\n';
  }
}

std::string StatReport::to_csv(bool header) const {
  std::ostringstream s;
  write_csv(s, header);
  return s.str();
}

std::string StatReport::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment_;
  j["notes"] = notes_;
  j["passed"] = passed();
  auto rows = nlohmann::json::array();
  for (const auto& r : rows_) {
    rows.push_back({{"functional", r.functional},
                    {"parameter", number_or_null(r.parameter)},
                    {"n_effective", r.n_effective},
                    {"statistic", number_or_null(r.statistic)},
                    {"p_value", number_or_null(r.p_value)},
                    {"ratio", number_or_null(r.ratio)},
                    {"std_error", number_or_null(r.std_error)},
                    {"gate", r.gate},
                    {"pass", r.pass}});
  }
  j["rows"] = rows;
  return j.dump(2);
}

}  // namespace critsoup
