#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "skewt/errors.hpp"
#include "skewt/posterior.hpp"
#include "skewt/predictive.hpp"
#include "skewt/risk.hpp"

namespace skewt {

// ---------------------------------------------------------------------------
// Raw data ingestion
// ---------------------------------------------------------------------------

struct RawTwoGroupData {
  std::vector<double> group1;
  std::vector<double> group2;

  void validate() const {
    if (group1.size() < 2 || group2.size() < 2)
      throw validation_error("RawTwoGroupData: each group needs at least 2 observations");
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline double parse_number(const std::string& tok, const std::string& what) {
  const std::string t = trim(tok);
  if (t.empty()) throw validation_error(what + ": empty numeric field");
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw validation_error(what + ": not a number: '" + t + "'");
  }
  if (pos != t.size()) throw validation_error(what + ": trailing junk in number: '" + t + "'");
  return v;
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_variance(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace detail

inline RawTwoGroupData parse_raw_csv(std::istream& in) {
  RawTwoGroupData out;
  std::string line;
  bool saw_header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
        static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF)
      line.erase(0, 3);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (!saw_header) {
      std::string h = t;
      for (char& c : h) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      h.erase(std::remove(h.begin(), h.end(), ' '), h.end());
      if (h != "group,value")
        throw validation_error("raw CSV: expected header 'group,value', got '" + t + "'");
      saw_header = true;
      continue;
    }
    const std::size_t comma = t.find(',');
    if (comma == std::string::npos)
      throw validation_error("raw CSV line " + std::to_string(lineno) + ": expected group,value");
    const std::string g = detail::trim(t.substr(0, comma));
    const double v = detail::parse_number(t.substr(comma + 1),
                                          "raw CSV line " + std::to_string(lineno));
    if (g == "1")
      out.group1.push_back(v);
    else if (g == "2")
      out.group2.push_back(v);
    else
      throw validation_error("raw CSV line " + std::to_string(lineno) + ": unknown group label '" +
                             g + "'");
  }
  if (!saw_header) throw validation_error("raw CSV: missing header 'group,value'");
  out.validate();
  return out;
}

// x1 = mean(group1), x2 = mean(group2), s2 = group-1 sample variance, k = n1-1.
inline TwoSampleSummary summarize_raw(const RawTwoGroupData& raw) {
  raw.validate();
  TwoSampleSummary sm(detail::mean_of(raw.group1), detail::mean_of(raw.group2),
                      detail::sample_variance(raw.group1),
                      static_cast<double>(raw.group1.size() - 1));
  sm.validate();
  return sm;
}

inline TwoSampleSummary ingest_raw(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw validation_error("ingest_raw: cannot open '" + path + "'");
  RawTwoGroupData raw = parse_raw_csv(f);
  return summarize_raw(raw);
}

// ---------------------------------------------------------------------------
// Flag parsing helpers
// ---------------------------------------------------------------------------

// "x1,x2,s,n": group means, group-1 sd, group-1 sample size.
inline TwoSampleSummary parse_summary_flag(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) parts.push_back(tok);
  if (parts.size() != 4)
    throw validation_error("--summary expects x1,x2,s,n (got '" + text + "')");
  const double x1 = detail::parse_number(parts[0], "--summary x1");
  const double x2 = detail::parse_number(parts[1], "--summary x2");
  const double s = detail::parse_number(parts[2], "--summary s");
  const double n = detail::parse_number(parts[3], "--summary n");
  if (!(s > 0.0)) throw validation_error("--summary: s must be positive");
  if (!(n >= 3.0) || n != std::floor(n))
    throw validation_error("--summary: n must be an integer >= 3");
  TwoSampleSummary sm(x1, x2, s * s, n - 1.0);
  sm.validate();
  return sm;
}

// "start:stop:step" inclusive grid.
inline std::vector<double> parse_deltas(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  if (parts.size() != 3)
    throw validation_error("--deltas expects START:STOP:STEP (got '" + text + "')");
  const double start = detail::parse_number(parts[0], "--deltas start");
  const double stop = detail::parse_number(parts[1], "--deltas stop");
  const double step = detail::parse_number(parts[2], "--deltas step");
  if (!(step > 0.0)) throw validation_error("--deltas: step must be positive");
  if (stop < start) throw validation_error("--deltas: stop must be >= start");
  std::vector<double> out;
  const std::size_t count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

inline std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(detail::parse_number(tok, what));
  if (out.empty()) throw validation_error(what + ": empty list");
  return out;
}

// ---------------------------------------------------------------------------
// Output formatting
// ---------------------------------------------------------------------------

inline std::string format_number(double v, bool full_precision = false) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), full_precision ? "%.17g" : "%.6g", v);
  return buf;
}

inline double round_sig6(double v) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return std::stod(buf);
}

// Round every numeric leaf so the JSON dump carries 6 significant digits.
inline nlohmann::json json_round6(const nlohmann::json& j) {
  if (j.is_number_float()) return round_sig6(j.get<double>());
  if (j.is_object()) {
    nlohmann::json o = nlohmann::json::object();
    for (auto it = j.begin(); it != j.end(); ++it) o[it.key()] = json_round6(it.value());
    return o;
  }
  if (j.is_array()) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& v : j) a.push_back(json_round6(v));
    return a;
  }
  return j;
}

inline std::string dump_json(const nlohmann::json& j, bool full_precision) {
  return (full_precision ? j : json_round6(j)).dump(2) + "\n";
}

inline std::string risk_curve_csv(const RiskCurve& curve, bool full_precision = false) {
  std::string out = "delta,risk_baseline,risk_restricted,ratio,se\n";
  for (const auto& r : curve.rows) {
    out += format_number(r.delta, full_precision);
    out += ',';
    out += format_number(r.risk_baseline, full_precision);
    out += ',';
    out += format_number(r.risk_restricted, full_precision);
    out += ',';
    out += format_number(r.ratio, full_precision);
    out += ',';
    out += format_number(r.mc_standard_error, full_precision);
    out += '\n';
  }
  return out;
}

inline nlohmann::json risk_curve_json(const RiskCurve& curve) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : curve.rows) {
    rows.push_back({{"delta", r.delta},
                    {"risk_baseline", r.risk_baseline},
                    {"risk_restricted", r.risk_restricted},
                    {"ratio", r.ratio},
                    {"se", r.mc_standard_error}});
  }
  return nlohmann::json{{"rows", rows}};
}

inline std::string samples_csv(const std::vector<double>& samples, bool full_precision = false) {
  std::string out = "value\n";
  for (double v : samples) {
    out += format_number(v, full_precision);
    out += '\n';
  }
  return out;
}

inline std::string reports_csv(const std::vector<std::pair<std::string, PredictiveReport>>& reps,
                               bool full_precision = false) {
  std::string out = "estimator,family,nu,alpha0,alpha1,alpha2,xi,tau,mean,p10,p50,p90\n";
  for (const auto& [name, rep] : reps) {
    auto cell = [&](const char* key) -> std::string {
      if (!rep.params.contains(key)) return "";
      return format_number(rep.params.at(key).get<double>(), full_precision);
    };
    out += name;
    out += ',';
    out += rep.params.at("family").get<std::string>();
    out += ',';
    out += cell("nu");
    out += ',';
    out += cell("alpha0");
    out += ',';
    out += cell("alpha1");
    out += ',';
    out += cell("alpha2");
    out += ',';
    out += cell("xi");
    out += ',';
    out += cell("tau");
    out += ',';
    out += format_number(rep.mean, full_precision);
    out += ',';
    out += format_number(rep.p10, full_precision);
    out += ',';
    out += format_number(rep.p50, full_precision);
    out += ',';
    out += format_number(rep.p90, full_precision);
    out += '\n';
  }
  return out;
}

}  // namespace skewt
