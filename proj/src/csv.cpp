// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "mixsim/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace mixsim {

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  return out + '"';
}

std::string cell_text(const CsvCell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) {
    return quote(*s);
  }
  if (const auto* i = std::get_if<std::int64_t>(&cell)) {
    return std::to_string(*i);
  }
  const double x = std::get<double>(cell);
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string csi_tag(const CsiModel& m) {
  switch (m.mode) {
    case CsiMode::Perfect:
      return "perfect";
    case CsiMode::FixedError: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "fixed%g", m.sigma_e2);
      return buf;
    }
    case CsiMode::PowerScaledError:
      return "power_scaled";
  }
  return "perfect";
}

}  // namespace

std::string to_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    out += (i ? "," : "") + quote(table.header[i]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out += (i ? "," : "") + cell_text(row[i]);
    }
    out += '\n';
  }
  return out;
}

void emit_csv(const CsvTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  out << to_csv(table);
  out.flush();
  if (!out) {
    throw IoError("write to '" + path + "' failed");
  }
}

std::string result_label(const SchemeResult& result, bool with_csi) {
  std::string label = to_string(result.outage.scheme);
  if (with_csi) {
    label += "_" + csi_tag(result.outage.csi);
  }
  return label;
}

CsvTable outage_table(const ExperimentResult& result) {
  CsvTable t;
  t.header = {"snr_db", "user_rank"};
  const bool paired = result.results.size() > 1;
  const bool with_csi = result.config.csi.size() > 1;
  for (const auto& r : result.results) {
    const std::string p = paired ? result_label(r, with_csi) + "_" : "";
    for (const char* col : {"outage", "ci_lo", "ci_hi", "events", "trials"}) {
      t.header.push_back(p + col);
    }
  }
  const int users = result.config.users;
  for (std::size_t point = 0; point < result.config.snr_db.size(); ++point) {
    for (int rank = 0; rank <= users; ++rank) {
      CsvRow row{result.config.snr_db[point],
                 rank == users ? std::string("overall") : std::to_string(rank + 1)};
      for (const auto& r : result.results) {
        const Interval ci = r.outage.interval(point, rank);
        row.emplace_back(r.outage.estimate(point, rank));
        row.emplace_back(ci.lo);
        row.emplace_back(ci.hi);
        row.emplace_back(r.outage.events[point][rank]);
        row.emplace_back(r.outage.trials);
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

CsvTable sum_rate_table(const ExperimentResult& result) {
  CsvTable t;
  t.header = {"snr_db", "scheme", "mean", "std_error"};
  const bool with_csi = result.config.csi.size() > 1;
  for (std::size_t point = 0; point < result.config.snr_db.size(); ++point) {
    for (const auto& r : result.results) {
      t.rows.push_back({result.config.snr_db[point], result_label(r, with_csi),
                        r.sum_rate.mean[point], r.sum_rate.std_error[point]});
    }
  }
  return t;
}

CsvTable histogram_table(const ExperimentResult& result, double snr_db) {
  CsvTable t;
  t.header = {"bin_lo", "bin_hi", "count", "scheme"};
  const bool with_csi = result.config.csi.size() > 1;
  for (const auto& r : result.results) {
    for (const auto& h : r.histograms) {
      if (std::abs(h.snr_db - snr_db) > 1e-9) {
        continue;
      }
      for (std::size_t b = 0; b < h.counts.size(); ++b) {
        t.rows.push_back({static_cast<double>(b) * h.bin_width,
                          static_cast<double>(b + 1) * h.bin_width, h.counts[b],
                          result_label(r, with_csi)});
      }
    }
  }
  return t;
}

}  // namespace mixsim
