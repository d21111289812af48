// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#pragma once

#include <string>
#include <variant>
#include <vector>

#include "mixsim/montecarlo.hpp"

namespace mixsim {

using CsvCell = std::variant<std::string, double, std::int64_t>;
using CsvRow = std::vector<CsvCell>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;
};

/// RFC 4180 text: header row, LF line endings, doubles with 17 significant
/// digits, fields quoted only when they contain ',', '"' or a line break.
std::string to_csv(const CsvTable& table);

/// Writes to_csv(table) to `path`; throws IoError on failure.
void emit_csv(const CsvTable& table, const std::string& path);

/// Column prefix of one result: the scheme, plus the CSI model when the run
/// has several.
std::string result_label(const SchemeResult& result, bool with_csi);

/// snr_db, user_rank, outage, ci_lo, ci_hi, events, trials for one result;
/// with several results the five value columns repeat per result, prefixed
/// by its label. user_rank is 1..K, then "overall".
CsvTable outage_table(const ExperimentResult& result);

/// snr_db, scheme, mean, std_error.
CsvTable sum_rate_table(const ExperimentResult& result);

/// bin_lo, bin_hi, count, scheme for the histograms taken at `snr_db`.
CsvTable histogram_table(const ExperimentResult& result, double snr_db);

}  // namespace mixsim
