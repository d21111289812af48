// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "mixsim/runner.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "mixsim/config.hpp"
#include "mixsim/csv.hpp"

#ifndef MIXSIM_VERSION_STRING
#define MIXSIM_VERSION_STRING "0.1.0"
#endif

namespace fs = std::filesystem;

namespace mixsim {

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string snr_tag(double db) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", db);
  return buf;
}

// Writes through a temporary file and renames it into place.
class OutputSet {
 public:
  void write(const fs::path& path, const std::string& body) {
    const fs::path tmp = path.string() + ".tmp";
    pending_.push_back(tmp);
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) {
        throw IoError("cannot open '" + tmp.string() + "' for writing");
      }
      out << body;
      out.flush();
      if (!out) {
        throw IoError("write to '" + tmp.string() + "' failed");
      }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
      throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() +
                    "': " + ec.message());
    }
    pending_.pop_back();
    written_.push_back(path);
  }

  void remove_all() noexcept {
    std::error_code ec;
    for (const auto& p : pending_) fs::remove(p, ec);
    for (const auto& p : written_) fs::remove(p, ec);
  }

 private:
  std::vector<fs::path> pending_;
  std::vector<fs::path> written_;
};

}  // namespace

std::string version_string() { return MIXSIM_VERSION_STRING; }

RunManifest run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                           int workers) {
  config.validate();
  RunManifest m;
  m.version = version_string();
  m.seed = config.seed;
  m.started = utc_now();

  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
  }

  const ExperimentResult result = run_experiment_mc(config, workers);

  OutputSet files;
  try {
    const fs::path outage = dir / "outage.csv";
    files.write(outage, to_csv(outage_table(result)));
    m.outputs.push_back(outage.string());

    const fs::path sum_rate = dir / "sum_rate.csv";
    files.write(sum_rate, to_csv(sum_rate_table(result)));
    m.outputs.push_back(sum_rate.string());

    for (double db : config.histogram_snr_db) {
      const fs::path hist = dir / ("histogram_" + snr_tag(db) + "dB.csv");
      files.write(hist, to_csv(histogram_table(result, db)));
      m.outputs.push_back(hist.string());
    }

    const fs::path echo = dir / "config.txt";
    files.write(echo, serialize_config(config));
    m.config_path = echo.string();

    m.finished = utc_now();
    const fs::path manifest = dir / "manifest.txt";
    std::string body;
    body += "version = " + m.version + "\n";
    body += "experiment = " + config.name + "\n";
    body += "seed = " + std::to_string(m.seed) + "\n";
    body += "trials = " + std::to_string(config.trials) + "\n";
    body += "started = " + m.started + "\n";
    body += "finished = " + m.finished + "\n";
    body += "config = " + m.config_path + "\n";
    for (const auto& o : m.outputs) {
      body += "output = " + o + "\n";
    }
    files.write(manifest, body);
    m.manifest_path = manifest.string();
  } catch (...) {
    files.remove_all();
    throw;
  }
  return m;
}

}  // namespace mixsim
