//
// Copyright 2026 The Unlearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Renders a results file as a method comparison table plus a per-run CSV.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "unlearn/error.h"
#include "unlearn/experiment.h"

namespace unlearn {

using nlohmann::json;

namespace {

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string Full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string PadRight(const std::string& s, size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string PadLeft(const std::string& s, size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

double Number(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key) || !obj.at(key).is_number()) {
    throw Error("malformed results: " + where + "." + key +
                " is missing or not a number");
  }
  return obj.at(key).get<double>();
}

struct MethodMeans {
  double ta = 0, fa = 0, ra = 0, mia = 0, rte = 0, work = 0, frm = 0;
};

}  // namespace

RenderedReport RenderReport(const json& results) {
  if (!results.is_object() || results.empty()) {
    throw Error("malformed results: expected a non-empty JSON object");
  }
  if (results.value("format", "") != kResultsFormat) {
    throw Error(std::string("malformed results: format is not '") +
                kResultsFormat + "'");
  }
  if (!results.contains("runs") || !results.at("runs").is_array() ||
      results.at("runs").empty()) {
    throw Error("malformed results: no runs recorded");
  }

  // Validate everything before producing any output.
  std::map<size_t, std::vector<const json*>> by_method;
  const auto& known = KnownMethods();
  const json& runs = results.at("runs");
  for (size_t i = 0; i < runs.size(); ++i) {
    const json& run = runs[i];
    const std::string where = "runs[" + std::to_string(i) + "]";
    if (!run.is_object() || !run.contains("method") ||
        !run.at("method").is_string()) {
      throw Error("malformed results: " + where + ".method is missing");
    }
    const std::string method = run.at("method").get<std::string>();
    const size_t rank = static_cast<size_t>(
        std::find(known.begin(), known.end(), method) - known.begin());
    if (rank == known.size()) {
      throw Error("malformed results: " + where + " has unknown method '" +
                  method + "'");
    }
    if (!run.contains("metrics") || !run.contains("reference")) {
      throw Error("malformed results: " + where + " lacks metrics or reference");
    }
    for (const char* key :
         {"ta", "fa", "ra", "mia", "rte_seconds", "work_units"}) {
      Number(run.at("metrics"), key, where + ".metrics");
    }
    for (const char* key : {"fa", "ra", "mia"}) {
      Number(run.at("reference"), key, where + ".reference");
    }
    Number(run, "trial", where);
    by_method[rank].push_back(&run);
  }
  if (!by_method.count(0)) {
    throw Error("malformed results: no retrain runs to compare against");
  }

  std::map<size_t, MethodMeans> means;
  for (const auto& [rank, list] : by_method) {
    MethodMeans m;
    for (const json* run : list) {
      const json& x = run->at("metrics");
      m.ta += x.at("ta").get<double>();
      m.fa += x.at("fa").get<double>();
      m.ra += x.at("ra").get<double>();
      m.mia += x.at("mia").get<double>();
      m.rte += x.at("rte_seconds").get<double>();
      m.work += x.at("work_units").get<double>();
      m.frm += x.at("frm").is_number() ? x.at("frm").get<double>() : NAN;
    }
    const double n = static_cast<double>(list.size());
    m.ta /= n, m.fa /= n, m.ra /= n, m.mia /= n;
    m.rte /= n, m.work /= n, m.frm /= n;
    means[rank] = m;
  }
  const MethodMeans& ref = means.at(0);

  RenderedReport out;
  std::ostringstream table;
  const size_t w = 17;
  table << PadRight("method", 16) << PadLeft("TA", 8) << PadLeft("FA", w)
        << PadLeft("RA", w) << PadLeft("MIA", w) << PadLeft("RTE(s)", 10)
        << PadLeft("work", 12) << PadLeft("FRM", 8) << '\n';
  const auto with_delta = [&](double v, double r) {
    return Fixed(v, 2) + " (" + Fixed(std::fabs(v - r), 2) + ")";
  };
  for (const auto& [rank, m] : means) {
    table << PadRight(known[rank], 16) << PadLeft(Fixed(m.ta, 2), 8)
          << PadLeft(with_delta(m.fa, ref.fa), w)
          << PadLeft(with_delta(m.ra, ref.ra), w)
          << PadLeft(with_delta(m.mia, ref.mia), w)
          << PadLeft(Fixed(m.rte, 3), 10)
          << PadLeft(Fixed(m.work, 0), 12) << PadLeft(Fixed(m.frm, 3), 8)
          << '\n';
  }
  table << "rates in percent, mean over trials; (x) = |value - retrain|; "
           "MIA = TN / |D_f|\n";
  out.table = table.str();

  std::ostringstream csv;
  csv << "method,trial,ta,fa,ra,mia,rte_seconds,work_units,frm,"
         "ref_fa,ref_ra,ref_mia\n";
  for (const auto& [rank, list] : by_method) {
    for (const json* run : list) {
      const json& x = run->at("metrics");
      const json& r = run->at("reference");
      csv << known[rank] << ',' << run->at("trial").get<int>() << ','
          << Full(x.at("ta").get<double>()) << ','
          << Full(x.at("fa").get<double>()) << ','
          << Full(x.at("ra").get<double>()) << ','
          << Full(x.at("mia").get<double>()) << ','
          << Full(x.at("rte_seconds").get<double>()) << ','
          << x.at("work_units").get<size_t>() << ','
          << (x.at("frm").is_number() ? Full(x.at("frm").get<double>())
                                      : std::string("nan"))
          << ',' << Full(r.at("fa").get<double>()) << ','
          << Full(r.at("ra").get<double>()) << ','
          << Full(r.at("mia").get<double>()) << '\n';
    }
  }
  out.csv = csv.str();
  return out;
}

RenderedReport RenderReportFile(const std::string& results_path) {
  std::ifstream in(results_path);
  if (!in) throw Error("cannot open results file '" + results_path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error("results file '" + results_path + "' is empty");
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error("results file '" + results_path + "' is not valid JSON: " +
                e.what());
  }
  return RenderReport(j);
}

}  // namespace unlearn
