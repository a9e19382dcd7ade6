/*
 * Copyright 2026 The CryptGraph Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Decoded analytics results, MSE, and their text / JSON reports.

#ifndef CRYPTGRAPH_ANALYTICS_RESULT_HPP_
#define CRYPTGRAPH_ANALYTICS_RESULT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cryptgraph/common/errors.hpp"

namespace cryptgraph {

// (1/N) * sum of squared differences.
inline double Mse(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ValidationError("MSE needs equal lengths, got " + std::to_string(a.size()) +
                          " and " + std::to_string(b.size()));
  }
  if (a.empty()) return 0.0;
  long double acc = 0.0L;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const long double d = static_cast<long double>(a[k]) - b[k];
    acc += d * d;
  }
  return static_cast<double>(acc / a.size());
}

inline double MaxAbsDiff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("vectors differ in length");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::fabs(a[k] - b[k]));
  return m;
}

struct AnalyticsResult {
  std::string algorithm;  // "cc" or "pagerank" (optionally suffixed, e.g. "cc-plain")
  std::string backend;    // "transparent", "lattice" or "plain"
  std::vector<double> per_vertex;
  double avg = 0.0;
  double max = 0.0;
  double min = 0.0;
  std::optional<double> mse_vs_oracle;
  std::optional<int> iterations;
  std::optional<bool> converged;
  std::map<std::string, std::size_t> outsourcing;  // batch / item counts
  std::map<std::string, double> timings;           // seconds

  int n() const { return static_cast<int>(per_vertex.size()); }
};

inline AnalyticsResult MakeResult(std::string algorithm, std::string backend,
                                  std::vector<double> values,
                                  const std::vector<double>* oracle = nullptr) {
  AnalyticsResult r;
  r.algorithm = std::move(algorithm);
  r.backend = std::move(backend);
  r.per_vertex = std::move(values);
  if (!r.per_vertex.empty()) {
    const auto [lo, hi] = std::minmax_element(r.per_vertex.begin(), r.per_vertex.end());
    r.min = *lo;
    r.max = *hi;
    r.avg = std::accumulate(r.per_vertex.begin(), r.per_vertex.end(), 0.0L) /
            static_cast<long double>(r.per_vertex.size());
  }
  if (oracle) r.mse_vs_oracle = Mse(r.per_vertex, *oracle);
  return r;
}

using OrderedJson = nlohmann::ordered_json;

// Timings are excluded unless asked for, so reports from fixed seeds stay
// byte-identical across runs.
inline OrderedJson ResultToJson(const AnalyticsResult& r, bool with_timings = false) {
  OrderedJson j;
  j["algorithm"] = r.algorithm;
  j["backend"] = r.backend;
  j["n"] = r.n();
  j["avg"] = r.avg;
  j["max"] = r.max;
  j["min"] = r.min;
  j["mse_vs_oracle"] = r.mse_vs_oracle ? OrderedJson(*r.mse_vs_oracle) : OrderedJson(nullptr);
  if (r.iterations) j["iterations"] = *r.iterations;
  if (r.converged) j["converged"] = *r.converged;
  if (!r.outsourcing.empty()) {
    OrderedJson o = OrderedJson::object();
    for (const auto& [k, v] : r.outsourcing) o[k] = v;
    j["outsourcing"] = o;
  }
  j["per_vertex"] = r.per_vertex;
  if (with_timings) {
    OrderedJson t = OrderedJson::object();
    for (const auto& [k, v] : r.timings) t[k] = v;
    j["timings"] = t;
  }
  return j;
}

inline AnalyticsResult ResultFromJson(const nlohmann::json& j) {
  try {
    AnalyticsResult r;
    r.algorithm = j.at("algorithm").get<std::string>();
    r.backend = j.at("backend").get<std::string>();
    r.per_vertex = j.at("per_vertex").get<std::vector<double>>();
    if (j.at("n").get<int>() != r.n()) throw ValidationError("n disagrees with per_vertex");
    r.avg = j.at("avg").get<double>();
    r.max = j.at("max").get<double>();
    r.min = j.at("min").get<double>();
    if (auto it = j.find("mse_vs_oracle"); it != j.end() && !it->is_null()) {
      r.mse_vs_oracle = it->get<double>();
    }
    if (auto it = j.find("iterations"); it != j.end()) r.iterations = it->get<int>();
    if (auto it = j.find("converged"); it != j.end()) r.converged = it->get<bool>();
    if (auto it = j.find("outsourcing"); it != j.end()) {
      r.outsourcing = it->get<std::map<std::string, std::size_t>>();
    }
    if (auto it = j.find("timings"); it != j.end()) {
      r.timings = it->get<std::map<std::string, double>>();
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad result document: ") + e.what());
  }
}

namespace internal {

inline std::string Fmt(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

}  // namespace internal

inline std::string ResultToText(const AnalyticsResult& r, bool with_timings = false) {
  std::ostringstream os;
  os << "algorithm " << r.algorithm << "\n";
  os << "backend   " << r.backend << "\n";
  os << "n         " << r.n() << "\n";
  if (r.iterations) {
    os << "iterations " << *r.iterations << (r.converged.value_or(false) ? " (converged)" : "")
       << "\n";
  }
  os << "avg       " << internal::Fmt("%.6f", r.avg) << "\n";
  os << "max       " << internal::Fmt("%.6f", r.max) << "\n";
  os << "min       " << internal::Fmt("%.6f", r.min) << "\n";
  if (r.mse_vs_oracle) os << "mse       " << internal::Fmt("%.3e", *r.mse_vs_oracle) << "\n";
  for (const auto& [k, v] : r.outsourcing) os << "outsourced " << k << " " << v << "\n";
  if (with_timings) {
    for (const auto& [k, v] : r.timings) {
      os << "time      " << k << " " << internal::Fmt("%.6f", v) << " s\n";
    }
  }
  for (int i = 0; i < r.n(); ++i) {
    os << "vertex " << i << " " << internal::Fmt("%.9f", r.per_vertex[i]) << "\n";
  }
  return os.str();
}

// Side-by-side comparison of two results over the same vertex set.
inline std::string CompareText(const AnalyticsResult& a, const AnalyticsResult& b) {
  const double mse = Mse(a.per_vertex, b.per_vertex);
  std::ostringstream os;
  os << "                " << a.backend << "/" << a.algorithm << "    " << b.backend << "/"
     << b.algorithm << "\n";
  os << "avg             " << internal::Fmt("%.6f", a.avg) << "    "
     << internal::Fmt("%.6f", b.avg) << "\n";
  os << "max             " << internal::Fmt("%.6f", a.max) << "    "
     << internal::Fmt("%.6f", b.max) << "\n";
  os << "min             " << internal::Fmt("%.6f", a.min) << "    "
     << internal::Fmt("%.6f", b.min) << "\n";
  os << "mse             " << internal::Fmt("%.3e", mse) << "\n";
  os << "max abs diff    " << internal::Fmt("%.3e", MaxAbsDiff(a.per_vertex, b.per_vertex))
     << "\n";
  return os.str();
}

}  // namespace cryptgraph

#endif  // CRYPTGRAPH_ANALYTICS_RESULT_HPP_
