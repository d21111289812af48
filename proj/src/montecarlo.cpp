// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "mixsim/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "mixsim/rng.hpp"

namespace mixsim {

namespace {

enum Salt : std::uint64_t { kChannelSalt = 0, kErrorSalt = 1, kBeamSalt = 2 };

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

bool on_grid(const std::vector<double>& grid, double x) {
  return std::any_of(grid.begin(), grid.end(), [x](double g) { return std::abs(g - x) < 1e-9; });
}

// Per-(scheme, csi) accumulators for one block of trials.
struct Tally {
  std::vector<std::vector<std::int64_t>> events;  // [point][rank or overall]
  std::vector<double> rate_sum;                   // [point]
  std::vector<double> rate_sq;                    // [point]
  std::vector<RateHistogram> hist;

  Tally(const ExperimentConfig& cfg, const std::vector<double>& hist_points) {
    events.assign(cfg.snr_db.size(), std::vector<std::int64_t>(cfg.users + 1, 0));
    rate_sum.assign(cfg.snr_db.size(), 0.0);
    rate_sq.assign(cfg.snr_db.size(), 0.0);
    const auto bins = static_cast<std::size_t>(std::ceil(cfg.histogram_max / cfg.histogram_bin));
    for (double db : hist_points) {
      RateHistogram h;
      h.snr_db = db;
      h.bin_width = cfg.histogram_bin;
      h.counts.assign(bins, 0);
      hist.push_back(std::move(h));
    }
  }

  void add(const Tally& o) {
    for (std::size_t p = 0; p < events.size(); ++p) {
      for (std::size_t r = 0; r < events[p].size(); ++r) {
        events[p][r] += o.events[p][r];
      }
      rate_sum[p] += o.rate_sum[p];
      rate_sq[p] += o.rate_sq[p];
    }
    for (std::size_t i = 0; i < hist.size(); ++i) {
      for (std::size_t b = 0; b < hist[i].counts.size(); ++b) {
        hist[i].counts[b] += o.hist[i].counts[b];
      }
      hist[i].total += o.hist[i].total;
      hist[i].below_target += o.hist[i].below_target;
      hist[i].near_cap += o.hist[i].near_cap;
      hist[i].capped += o.hist[i].capped;
    }
  }
};

struct Slot {
  Scheme scheme;
  std::size_t csi;
};

class Engine {
 public:
  explicit Engine(const ExperimentConfig& cfg)
      : cfg_(cfg), experiment_id_(experiment_id_from_name(cfg.name)) {
    for (Scheme s : cfg.schemes) {
      for (std::size_t c = 0; c < cfg.csi.size(); ++c) {
        slots_.push_back({s, c});
      }
    }
    for (double db : cfg.snr_db) {
      powers_.push_back(db_to_linear(db));
    }
    for (std::size_t p = 0; p < cfg.snr_db.size(); ++p) {
      if (on_grid(cfg.histogram_snr_db, cfg.snr_db[p])) {
        hist_point_of_.push_back(static_cast<int>(hist_points_.size()));
        hist_points_.push_back(cfg.snr_db[p]);
      } else {
        hist_point_of_.push_back(-1);
      }
    }
    needs_error_ = std::any_of(cfg.csi.begin(), cfg.csi.end(),
                               [](const CsiModel& m) { return m.mode != CsiMode::Perfect; });
  }

  std::vector<Tally> make_tallies() const {
    return std::vector<Tally>(slots_.size(), Tally(cfg_, hist_points_));
  }

  const std::vector<Slot>& slots() const { return slots_; }
  const std::vector<double>& hist_points() const { return hist_points_; }

  void run_trial(std::int64_t trial, std::vector<Tally>& tallies) const {
    const auto t = static_cast<std::uint64_t>(trial);
    RngStream channel_rng = RngStream::derive(cfg_.seed, experiment_id_, t, kChannelSalt);
    const ChannelSet truth = sample_channels(cfg_.antennas, cfg_.users, channel_rng);
    const std::vector<int> rank = truth.rank_of();
    CMatrixXd unit_error;
    if (needs_error_) {
      RngStream error_rng = RngStream::derive(cfg_.seed, experiment_id_, t, kErrorSalt);
      unit_error = sample_unit_error(cfg_.antennas, cfg_.users, error_rng);
    }

    for (std::size_t s = 0; s < slots_.size(); ++s) {
      const Scheme scheme = slots_[s].scheme;
      const CsiModel& csi = cfg_.csi[slots_[s].csi];
      Tally& tally = tallies[s];
      LinkDesign design;
      std::vector<double> caps;
      for (std::size_t p = 0; p < powers_.size(); ++p) {
        if (p == 0 || !csi.power_independent()) {
          const ChannelSet est =
              csi.mode == CsiMode::Perfect
                  ? truth
                  : apply_csi_error(truth, unit_error, csi.error_variance(powers_[p]));
          design = make_design(scheme, est, t);
          caps = caps_of(design);
        }
        const std::vector<double> rates = evaluate_rates(design, truth.h, powers_[p]);
        record(tally, p, rates, caps, rank);
      }
    }
  }

 private:
  LinkDesign make_design(Scheme scheme, const ChannelSet& est, std::uint64_t trial) const {
    switch (scheme) {
      case Scheme::Zf:
        return design_zf(est);
      case Scheme::Mrt:
        return design_mrt(est);
      case Scheme::SingleGroup: {
        RngStream rng = RngStream::derive(cfg_.seed, experiment_id_, trial, kBeamSalt);
        return design_mixture(single_group(est), cfg_.deltas, rng, cfg_.maxmin);
      }
      case Scheme::Mixture:
        break;
    }
    RngStream rng = RngStream::derive(cfg_.seed, experiment_id_, trial, kBeamSalt);
    return design_mixture(group_users(est, cfg_.grouping), cfg_.deltas, rng, cfg_.maxmin);
  }

  std::vector<double> caps_of(const LinkDesign& design) const {
    std::vector<double> caps(cfg_.users, std::numeric_limits<double>::infinity());
    for (const auto& st : design.streams) {
      const auto c = saturation_caps(st.deltas);
      for (std::size_t i = 0; i < st.members.size(); ++i) {
        caps[st.members[i]] = c[i];
      }
    }
    return caps;
  }

  void record(Tally& tally, std::size_t p, const std::vector<double>& rates,
              const std::vector<double>& caps, const std::vector<int>& rank) const {
    const double r_th = cfg_.r_th();
    bool any = false;
    double sum = 0.0;
    for (int u = 0; u < cfg_.users; ++u) {
      sum += rates[u];
      if (rates[u] < r_th) {
        ++tally.events[p][rank[u]];
        any = true;
      }
    }
    if (any) {
      ++tally.events[p][cfg_.users];
    }
    tally.rate_sum[p] += sum;
    tally.rate_sq[p] += sum * sum;

    if (hist_point_of_[p] < 0) {
      return;
    }
    RateHistogram& h = tally.hist[static_cast<std::size_t>(hist_point_of_[p])];
    const auto last = static_cast<std::int64_t>(h.counts.size()) - 1;
    for (int u = 0; u < cfg_.users; ++u) {
      const auto b = std::clamp(static_cast<std::int64_t>(std::floor(rates[u] / h.bin_width)),
                                std::int64_t{0}, last);
      ++h.counts[static_cast<std::size_t>(b)];
      ++h.total;
      if (rates[u] < r_th) {
        ++h.below_target;
      }
      if (std::isfinite(caps[u])) {
        ++h.capped;
        if (rates[u] >= caps[u] - 0.1 && rates[u] <= caps[u]) {
          ++h.near_cap;
        }
      }
    }
  }

  const ExperimentConfig& cfg_;
  std::uint64_t experiment_id_;
  std::vector<Slot> slots_;
  std::vector<double> powers_;
  std::vector<double> hist_points_;
  std::vector<int> hist_point_of_;
  bool needs_error_ = false;
};

}  // namespace

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Mixture:
      return "mixture";
    case Scheme::Zf:
      return "zf";
    case Scheme::Mrt:
      return "mrt";
    case Scheme::SingleGroup:
      return "single_group";
  }
  return "mixture";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "mixture") return Scheme::Mixture;
  if (name == "zf") return Scheme::Zf;
  if (name == "mrt") return Scheme::Mrt;
  if (name == "single_group") return Scheme::SingleGroup;
  throw ConfigError("scheme: unknown value '" + name + "' (mixture | zf | mrt | single_group)");
}

void ExperimentConfig::validate() const {
  if (antennas < 1 || users < 1) {
    throw ConfigError("antennas and users must be >= 1");
  }
  if (users > antennas) {
    throw ConfigError("users: K = " + std::to_string(users) + " exceeds N = " +
                      std::to_string(antennas));
  }
  if (schemes.empty()) {
    throw ConfigError("scheme: at least one scheme is required");
  }
  if (std::set<Scheme>(schemes.begin(), schemes.end()).size() != schemes.size()) {
    throw ConfigError("scheme: duplicate entries");
  }
  if (snr_db.empty()) {
    throw ConfigError("snr_db: grid is empty");
  }
  for (std::size_t i = 0; i < snr_db.size(); ++i) {
    if (!std::isfinite(snr_db[i]) || (i > 0 && !(snr_db[i] > snr_db[i - 1]))) {
      throw ConfigError("snr_db: grid must be finite and strictly increasing");
    }
  }
  if (trials < 1) {
    throw ConfigError("trials must be >= 1");
  }
  if (csi.empty()) {
    throw ConfigError("csi: at least one model is required");
  }
  for (const auto& m : csi) {
    m.validate();
  }
  const bool grouped = std::find(schemes.begin(), schemes.end(), Scheme::Mixture) != schemes.end();
  if (grouped) {
    grouping.validate();
    if (grouping.method == GroupingMethod::Algorithm1 && users > kMaxExhaustiveUsers) {
      throw ConfigError("grouping.method: algorithm1 is limited to K <= " +
                        std::to_string(kMaxExhaustiveUsers) + "; use sus");
    }
  }
  deltas.validate();
  if (maxmin.randomizations < 0 || maxmin.iterations < 0 || maxmin.polished_roundings < 0 ||
      !(maxmin.step > 0.0)) {
    throw ConfigError("maxmin: counts must be >= 0 and step > 0");
  }
  if (!(histogram_bin > 0.0) || !(histogram_max > histogram_bin)) {
    throw ConfigError("histogram: need bin > 0 and max > bin");
  }
  for (double db : histogram_snr_db) {
    if (!on_grid(snr_db, db)) {
      throw ConfigError("histogram.snr_db: " + std::to_string(db) + " dB is not on the grid");
    }
  }
}

Interval wilson_interval(std::int64_t events, std::int64_t trials) {
  if (trials <= 0) {
    return {0.0, 1.0};
  }
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(events) / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  const double lo = events == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = events == trials ? 1.0 : std::min(1.0, centre + half);
  return {lo, hi};
}

double OutageCurve::estimate(std::size_t point, int rank) const {
  return trials > 0 ? static_cast<double>(events.at(point).at(rank)) / trials : 0.0;
}

Interval OutageCurve::interval(std::size_t point, int rank) const {
  return wilson_interval(events.at(point).at(rank), trials);
}

double RateHistogram::mass_below_target() const {
  return total > 0 ? static_cast<double>(below_target) / total : 0.0;
}

double RateHistogram::mass_near_cap() const {
  return capped > 0 ? static_cast<double>(near_cap) / capped : 0.0;
}

const SchemeResult& ExperimentResult::find(Scheme scheme, std::size_t csi_index) const {
  for (const auto& r : results) {
    if (r.outage.scheme == scheme && r.outage.csi == config.csi.at(csi_index)) {
      return r;
    }
  }
  throw InvalidInputError("scheme '" + to_string(scheme) + "' was not part of the run");
}

ExperimentResult run_experiment_mc(const ExperimentConfig& config, int workers) {
  config.validate();
  const Engine engine(config);
  const std::int64_t blocks = (config.trials + kBlockTrials - 1) / kBlockTrials;
  const int n_workers =
      static_cast<int>(std::clamp<std::int64_t>(workers < 1 ? 1 : workers, 1, blocks));

  // Counts are integers and can be merged in any order; the floating-point
  // sums are kept per block and reduced in block order afterwards.
  std::vector<std::vector<Tally>> block_tallies(static_cast<std::size_t>(blocks));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&]() {
    try {
      for (;;) {
        const std::int64_t b = next.fetch_add(1);
        if (b >= blocks) {
          return;
        }
        std::vector<Tally> tallies = engine.make_tallies();
        const std::int64_t end = std::min(config.trials, (b + 1) * kBlockTrials);
        for (std::int64_t t = b * kBlockTrials; t < end; ++t) {
          engine.run_trial(t, tallies);
        }
        block_tallies[static_cast<std::size_t>(b)] = std::move(tallies);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) {
        failure = std::current_exception();
      }
      next.store(blocks);
    }
  };

  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_workers; ++i) {
      pool.emplace_back(work);
    }
    for (auto& th : pool) {
      th.join();
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  std::vector<Tally> total = engine.make_tallies();
  for (auto& bt : block_tallies) {
    for (std::size_t s = 0; s < total.size(); ++s) {
      total[s].add(bt[s]);
    }
    bt.clear();
  }

  ExperimentResult result;
  result.config = config;
  const double n = static_cast<double>(config.trials);
  for (std::size_t s = 0; s < engine.slots().size(); ++s) {
    SchemeResult r;
    r.outage.scheme = engine.slots()[s].scheme;
    r.outage.csi = config.csi[engine.slots()[s].csi];
    r.outage.users = config.users;
    r.outage.snr_db = config.snr_db;
    r.outage.events = std::move(total[s].events);
    r.outage.trials = config.trials;
    r.sum_rate.snr_db = config.snr_db;
    for (std::size_t p = 0; p < config.snr_db.size(); ++p) {
      const double mean = total[s].rate_sum[p] / n;
      const double var =
          config.trials > 1 ? std::max(0.0, (total[s].rate_sq[p] - n * mean * mean) / (n - 1.0))
                            : 0.0;
      r.sum_rate.mean.push_back(mean);
      r.sum_rate.std_error.push_back(std::sqrt(var / n));
    }
    r.histograms = std::move(total[s].hist);
    result.results.push_back(std::move(r));
  }
  return result;
}

OutageCurve estimate_outage(const ExperimentConfig& config, int workers) {
  return run_experiment_mc(config, workers).results.front().outage;
}

SumRateCurve avg_sum_rate(const ExperimentConfig& config, int workers) {
  return run_experiment_mc(config, workers).results.front().sum_rate;
}

RateHistogram rate_histogram(ExperimentConfig config, double snr_db, int workers) {
  if (!on_grid(config.snr_db, snr_db)) {
    config.snr_db = {snr_db};
  }
  config.histogram_snr_db = {snr_db};
  return run_experiment_mc(config, workers).results.front().histograms.front();
}

std::pair<OutageCurve, OutageCurve> csi_floor_study(ExperimentConfig config, double sigma_e2,
                                                    int workers) {
  config.schemes = {config.schemes.front()};
  config.csi = {CsiModel::fixed(sigma_e2), CsiModel::power_scaled()};
  ExperimentResult r = run_experiment_mc(config, workers);
  return {std::move(r.results[0].outage), std::move(r.results[1].outage)};
}

double linear_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InsufficientDataError("linear_slope: need at least two points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (!(denom > 0.0)) {
    throw InsufficientDataError("linear_slope: x values are all equal");
  }
  return (n * sxy - sx * sy) / denom;
}

double fit_slope(const OutageCurve& curve, int rank, const SlopeRange& range) {
  if (rank < 0 || rank > curve.users) {
    throw InvalidInputError("fit_slope: rank out of range");
  }
  std::vector<double> x, y;
  for (std::size_t p = 0; p < curve.snr_db.size(); ++p) {
    const double est = curve.estimate(p, rank);
    if (est >= range.lo && est <= range.hi && curve.events[p][rank] >= range.min_events) {
      x.push_back(curve.snr_db[p] / 10.0);
      y.push_back(-std::log10(est));
    }
  }
  if (x.size() < 3) {
    throw InsufficientDataError("fit_slope: only " + std::to_string(x.size()) +
                                " grid points qualify (need 3)");
  }
  return linear_slope(x, y);
}

}  // namespace mixsim
