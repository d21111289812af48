// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "mixsim/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mixsim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
  return v;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
  return v;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    out += (i ? ", " : "") + items[i];
  }
  return out;
}

std::string join_doubles(const std::vector<double>& xs) {
  std::vector<std::string> s;
  for (double x : xs) {
    s.push_back(format_double(x));
  }
  return join(s);
}

std::string csi_to_text(const CsiModel& m) {
  if (m.mode == CsiMode::FixedError) {
    return "fixed:" + format_double(m.sigma_e2);
  }
  return to_string(m.mode);
}

CsiModel csi_from_text(const std::string& text) {
  const auto colon = text.find(':');
  const std::string mode = trim(text.substr(0, colon));
  if (mode == "fixed") {
    if (colon == std::string::npos) {
      throw ConfigError("csi: fixed mode needs a variance, e.g. fixed:0.1");
    }
    return CsiModel::fixed(to_double("csi", text.substr(colon + 1)));
  }
  if (colon != std::string::npos) {
    throw ConfigError("csi: only the fixed mode takes a variance");
  }
  const CsiMode m = csi_mode_from_string(mode);
  return m == CsiMode::Perfect ? CsiModel::perfect() : CsiModel::power_scaled();
}

ExperimentConfig base_preset(const std::string& name, int n, int k) {
  ExperimentConfig c;
  c.name = name;
  c.antennas = n;
  c.users = k;
  c.grouping.theta_th = 0.9;
  c.deltas.r_th = 1.5;
  c.deltas.c_margin = 2.0;
  return c;
}

void use_fixed_splits(ExperimentConfig& c) {
  c.deltas.fixed[2] = {0.2, 0.8};
  c.deltas.fixed[3] = {0.05, 0.2, 0.75};
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::vector<double> parse_snr_grid(const std::string& text) {
  const std::string t = trim(text);
  if (t.find(':') == std::string::npos) {
    std::vector<double> out;
    for (const auto& item : split_list(t)) {
      out.push_back(to_double("snr_db", item));
    }
    if (out.empty()) {
      throw ConfigError("snr_db: grid is empty");
    }
    return out;
  }
  std::vector<std::string> parts;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ':')) {
    parts.push_back(item);
  }
  if (parts.size() != 3) {
    throw ConfigError("snr_db: expected lo:step:hi, got '" + text + "'");
  }
  const double lo = to_double("snr_db", parts[0]);
  const double step = to_double("snr_db", parts[1]);
  const double hi = to_double("snr_db", parts[2]);
  if (!(step > 0.0) || !(hi >= lo)) {
    throw ConfigError("snr_db: need step > 0 and hi >= lo in '" + text + "'");
  }
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 100000) {
    throw ConfigError("snr_db: grid '" + text + "' has too many points");
  }
  std::vector<double> out;
  for (long i = 0; i < count; ++i) {
    out.push_back(lo + static_cast<double>(i) * step);
  }
  return out;
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "name") {
    if (value.empty()) throw ConfigError("name: must not be empty");
    c.name = value;
  } else if (key == "antennas") {
    c.antennas = to_int<int>(key, value);
  } else if (key == "users") {
    c.users = to_int<int>(key, value);
  } else if (key == "schemes" || key == "scheme") {
    c.schemes.clear();
    for (const auto& s : split_list(value)) {
      c.schemes.push_back(scheme_from_string(s));
    }
  } else if (key == "snr_db") {
    c.snr_db = parse_snr_grid(value);
  } else if (key == "trials") {
    c.trials = to_int<std::int64_t>(key, value);
  } else if (key == "seed") {
    c.seed = to_int<std::uint64_t>(key, value);
  } else if (key == "csi") {
    c.csi.clear();
    for (const auto& s : split_list(value)) {
      c.csi.push_back(csi_from_text(s));
    }
  } else if (key == "grouping.method") {
    c.grouping.method = grouping_method_from_string(value);
  } else if (key == "grouping.theta_th") {
    c.grouping.theta_th = to_double(key, value);
  } else if (key == "grouping.theta_tau1") {
    c.grouping.theta_tau1 = to_double(key, value);
  } else if (key == "grouping.theta_tau2") {
    c.grouping.theta_tau2 = to_double(key, value);
  } else if (key == "mixture.r_th") {
    c.deltas.r_th = to_double(key, value);
  } else if (key == "mixture.c_margin") {
    c.deltas.c_margin = to_double(key, value);
  } else if (key.rfind("mixture.deltas.", 0) == 0) {
    const int size = to_int<int>(key, key.substr(std::string("mixture.deltas.").size()));
    if (size < 1) throw ConfigError(key + ": group size must be >= 1");
    std::vector<double> d;
    for (const auto& s : split_list(value)) {
      d.push_back(to_double(key, s));
    }
    c.deltas.fixed[size] = d;
  } else if (key == "maxmin.randomizations") {
    c.maxmin.randomizations = to_int<int>(key, value);
  } else if (key == "maxmin.iterations") {
    c.maxmin.iterations = to_int<int>(key, value);
  } else if (key == "maxmin.step") {
    c.maxmin.step = to_double(key, value);
  } else if (key == "maxmin.polished_roundings") {
    c.maxmin.polished_roundings = to_int<int>(key, value);
  } else if (key == "histogram.snr_db") {
    c.histogram_snr_db.clear();
    for (const auto& s : split_list(value)) {
      c.histogram_snr_db.push_back(to_double(key, s));
    }
  } else if (key == "histogram.bin") {
    c.histogram_bin = to_double(key, value);
  } else if (key == "histogram.max") {
    c.histogram_max = to_double(key, value);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig base) {
  std::stringstream ss(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section != "grouping" && section != "mixture" && section != "maxmin" &&
          section != "histogram") {
        throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" + section +
                          "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string qualified = section.empty() ? key : section + "." + key;
    try {
      apply_setting(base, qualified, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const InvalidInputError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + qualified + ": " + e.what());
    }
  }
  base.validate();
  return base;
}

ExperimentConfig parse_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read config file '" + path + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), std::move(base));
}

std::string serialize_config(const ExperimentConfig& c) {
  std::vector<std::string> schemes;
  for (Scheme s : c.schemes) {
    schemes.push_back(to_string(s));
  }
  std::vector<std::string> csi;
  for (const auto& m : c.csi) {
    csi.push_back(csi_to_text(m));
  }
  std::ostringstream o;
  o << "name = " << c.name << '\n'
    << "antennas = " << c.antennas << '\n'
    << "users = " << c.users << '\n'
    << "schemes = " << join(schemes) << '\n'
    << "snr_db = " << join_doubles(c.snr_db) << '\n'
    << "trials = " << c.trials << '\n'
    << "seed = " << c.seed << '\n'
    << "csi = " << join(csi) << '\n'
    << "\n[grouping]\n"
    << "method = " << to_string(c.grouping.method) << '\n'
    << "theta_th = " << format_double(c.grouping.theta_th) << '\n'
    << "theta_tau1 = " << format_double(c.grouping.theta_tau1) << '\n'
    << "theta_tau2 = " << format_double(c.grouping.theta_tau2) << '\n'
    << "\n[mixture]\n"
    << "r_th = " << format_double(c.deltas.r_th) << '\n'
    << "c_margin = " << format_double(c.deltas.c_margin) << '\n';
  for (const auto& [size, d] : c.deltas.fixed) {
    o << "deltas." << size << " = " << join_doubles(d) << '\n';
  }
  o << "\n[maxmin]\n"
    << "randomizations = " << c.maxmin.randomizations << '\n'
    << "iterations = " << c.maxmin.iterations << '\n'
    << "step = " << format_double(c.maxmin.step) << '\n'
    << "polished_roundings = " << c.maxmin.polished_roundings << '\n'
    << "\n[histogram]\n"
    << "snr_db = " << join_doubles(c.histogram_snr_db) << '\n'
    << "bin = " << format_double(c.histogram_bin) << '\n'
    << "max = " << format_double(c.histogram_max) << '\n';
  return o.str();
}

std::vector<std::string> preset_names() {
  return {"fig2a", "fig2b", "fig3a", "fig3b-4", "fig3b-8", "fig4", "fig5", "fig9", "fig10"};
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  if (name == "fig2a" || name == "fig2b") {
    c = base_preset(name, 3, name == "fig2a" ? 2 : 3);
    use_fixed_splits(c);
    c.snr_db = parse_snr_grid("0:2:20");
    c.trials = 1000000;
  } else if (name == "fig3a") {
    c = base_preset(name, 4, 3);
    use_fixed_splits(c);
    c.schemes = {Scheme::Mixture, Scheme::Zf};
    c.snr_db = parse_snr_grid("0:2:24");
    c.trials = 1000000;
  } else if (name == "fig3b-4" || name == "fig3b-8") {
    const int n = name == "fig3b-4" ? 4 : 8;
    c = base_preset(name, n, n);
    c.schemes = {Scheme::Mixture, Scheme::Zf};
    c.snr_db = parse_snr_grid("0:4:40");
    c.trials = name == "fig3b-4" ? 1000000 : 200000;
  } else if (name == "fig4") {
    c = base_preset(name, 4, 4);
    c.schemes = {Scheme::Mixture, Scheme::Zf};
    c.snr_db = {10.0, 15.0, 20.0, 40.0, 60.0};
    c.histogram_snr_db = c.snr_db;
    c.histogram_max = 25.0;
    c.trials = 500000;
  } else if (name == "fig5") {
    c = base_preset(name, 4, 4);
    c.schemes = {Scheme::Mixture, Scheme::Zf, Scheme::SingleGroup};
    c.snr_db = parse_snr_grid("0:5:60");
    c.trials = 100000;
  } else if (name == "fig9") {
    c = base_preset(name, 4, 4);
    c.csi = {CsiModel::fixed(0.1), CsiModel::power_scaled()};
    c.snr_db = parse_snr_grid("0:5:40");
    c.trials = 200000;
  } else if (name == "fig10") {
    c = base_preset(name, 4, 4);
    c.schemes = {Scheme::Mixture, Scheme::Zf};
    c.grouping.method = GroupingMethod::Sus;
    c.grouping.theta_tau1 = 0.25;
    c.grouping.theta_tau2 = 0.55;
    c.snr_db = parse_snr_grid("0:4:40");
    c.trials = 1000000;
  } else {
    throw ConfigError("preset: unknown name '" + name + "' (" + join(preset_names()) + ")");
  }
  c.validate();
  return c;
}

}  // namespace mixsim
