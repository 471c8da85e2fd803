#include "hmd/rule_io.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hmd/errors.hpp"

namespace hmd {

namespace {

std::string fmt17(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  while (first != last && *first == ' ') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{}) throw InputError("rule CSV: cannot parse '" + s + "'");
  return v;
}

}  // namespace

void write_rule_csv(std::ostream& os, const JointModel& m, const TabularRule& d) {
  if (d.rows() != m.ny() || d.cols() != m.nx()) throw InputError("rule does not match model");
  os << "y\\x";
  for (std::size_t i = 0; i < m.nx(); ++i) os << ',' << fmt17(m.x(i));
  os << '\n';
  for (std::size_t j = 0; j < m.ny(); ++j) {
    os << fmt17(m.y(j));
    for (std::size_t i = 0; i < m.nx(); ++i) os << ',' << fmt17(d(j, i));
    os << '\n';
  }
}

TabularRule read_rule_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InputError("rule CSV: empty input");
  const auto header = split(line);
  if (header.size() < 2) throw InputError("rule CSV: header needs at least one value column");
  const std::size_t nx = header.size() - 1;
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != nx + 1) {
      throw InputError("rule CSV: row " + std::to_string(rows.size() + 1) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(nx + 1));
    }
    std::vector<double> r(nx);
    for (std::size_t i = 0; i < nx; ++i) r[i] = parse_double(fields[i + 1]);
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw InputError("rule CSV: no rows");
  Eigen::MatrixXd d(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(nx));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      d(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = rows[j][i];
    }
  }
  return TabularRule(std::move(d));
}

std::string threshold_rule_to_json(const ThresholdRule& t, const JointModel& m) {
  nlohmann::json j;
  j["x_bar"] = t.x_bar;
  auto samples = nlohmann::json::array();
  for (std::size_t i = 0; i < m.nx(); ++i) {
    samples.push_back({m.x(i), t.threshold_at(m.x(i), m.y_support())});
  }
  j["y_bar_samples"] = std::move(samples);
  return j.dump();
}

ThresholdRule threshold_rule_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("threshold record: ") + e.what());
  }
  if (!j.contains("x_bar") || !j.contains("y_bar_samples")) {
    throw InputError("threshold record needs x_bar and y_bar_samples");
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& s : j.at("y_bar_samples")) {
    xs.push_back(s.at(0).get<double>());
    ys.push_back(s.at(1).get<double>());
  }
  if (xs.empty()) throw InputError("threshold record has no samples");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw InputError("threshold samples must be increasing in x");
  }
  ThresholdRule t;
  t.x_bar = j.at("x_bar").get<double>();
  t.y_bar = [xs = std::move(xs), ys = std::move(ys)](double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - xs.begin());
    const double w = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    return (1.0 - w) * ys[k - 1] + w * ys[k];
  };
  return t;
}

}  // namespace hmd
