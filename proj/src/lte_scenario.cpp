#include "jamgame/lte_scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "jamgame/errors.hpp"

namespace jamgame::lte {

using ordered_json = nlohmann::ordered_json;

bool is_uplink(Channel c) { return c == Channel::kPucch || c == Channel::kPrach; }

double CellConfig::jammer_power() const {
  if (jammer_power_w >= 0.0) return jammer_power_w;
  return enb_power_w / std::pow(10.0, carrier_to_jammer_db / 10.0);
}

double CellConfig::mean_users() const {
  return user_density * std::numbers::pi * cell_radius_m * cell_radius_m;
}

void CellConfig::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw DataError(std::string("cell config: ") + msg);
  };
  require(cell_radius_m > 0.0, "cell_radius_m must be > 0");
  require(user_density >= 0.0, "user_density must be >= 0");
  require(path_loss_exponent > 0.0, "path_loss_exponent must be > 0");
  require(reference_distance_m > 0.0, "reference_distance_m must be > 0");
  require(std::isfinite(k_db), "k_db must be finite");
  require(noise_w > 0.0, "noise_w must be > 0");
  require(enb_power_w >= 0.0 && ue_power_w >= 0.0, "powers must be >= 0");
  require(std::isfinite(carrier_to_jammer_db), "carrier_to_jammer_db must be finite");
  require(jam_probability >= 0.0 && jam_probability <= 1.0, "jam_probability must lie in [0, 1]");
  require(fairness_window >= 1.0, "fairness_window must be >= 1");
  require(rb_count >= 1, "rb_count must be >= 1");
  require(rb_bandwidth_hz > 0.0, "rb_bandwidth_hz must be > 0");
  require(capacity_fraction > 0.0 && capacity_fraction <= 1.0,
          "capacity_fraction must lie in (0, 1]");
  require(subframes >= 1, "subframes must be >= 1");
  require(std::isfinite(demod_threshold_db), "demod_threshold_db must be finite");
  require(acquiring_fraction >= 0.0 && acquiring_fraction <= 1.0,
          "acquiring_fraction must lie in [0, 1]");
  require(weights.rate_cheater >= 0.0 && weights.connected_cheater >= 0.0 &&
              weights.connected_saboteur >= 0.0 && weights.rate_enb >= 0.0,
          "weights must be >= 0");
  require(drops >= 1, "drops must be >= 1");
  require(jobs >= 1, "jobs must be >= 1");
  require(states.size() == 2, "states must be [cheater-type, saboteur-type]");
  require(!jammer_actions.empty() && !enb_actions.empty(), "action tables must not be empty");
  for (const auto& a : enb_actions) {
    require(a.csrs_gain >= 0.0 && a.downlink_gain >= 0.0 && a.rate_scale >= 0.0,
            "eNodeB action gains must be >= 0");
    require(a.bandwidth_fraction > 0.0 && a.bandwidth_fraction <= 1.0,
            "bandwidth_fraction must lie in (0, 1]");
    require(a.jam_evasion >= 0.0 && a.jam_evasion <= 1.0, "jam_evasion must lie in [0, 1]");
    require(a.unavailable_fraction >= 0.0 && a.unavailable_fraction <= 1.0,
            "unavailable_fraction must lie in [0, 1]");
  }
  std::vector<std::string> labels;
  for (const auto& a : jammer_actions) labels.push_back(a.label);
  ActionSet check_j(labels);
  labels.clear();
  for (const auto& a : enb_actions) labels.push_back(a.label);
  ActionSet check_0(labels);
  require(prior.size() == states.size(), "prior length must match states");
  validate_distribution(prior, "cell config prior");
  require(lambda > 0.0 && lambda < 1.0, "lambda must lie in (0, 1)");
  require(horizon >= 1, "horizon must be >= 1");
}

CellConfig default_cell_config() {
  using C = Channel;
  CellConfig c;
  c.jammer_actions = {
      {"Inactive", {}},
      {"Jam CS-RS", {C::kCsRs}},
      {"Jam CS-RS + PUCCH", {C::kCsRs, C::kPucch}},
      {"Jam CS-RS + PBCH + PRACH", {C::kCsRs, C::kPbch, C::kPrach}},
      {"Jam CS-RS + PCFICH + PUCCH + PRACH", {C::kCsRs, C::kPcfich, C::kPucch, C::kPrach}},
  };
  c.enb_actions.resize(5);
  c.enb_actions[0].label = "Normal";
  c.enb_actions[1].label = "Pilot Boosting";
  c.enb_actions[1].csrs_gain = 2.0;
  c.enb_actions[1].downlink_gain = 0.8;
  c.enb_actions[2].label = "Throttling";
  c.enb_actions[2].rate_scale = 0.2;
  c.enb_actions[3].label = "Change f_c + SIB 2";
  c.enb_actions[3].bandwidth_fraction = 0.7;
  c.enb_actions[3].jam_evasion = 0.5;
  c.enb_actions[3].protected_channels = {C::kPrach};
  c.enb_actions[4].label = "Change Timing";
  c.enb_actions[4].jam_evasion = 0.7;
  c.enb_actions[4].unavailable_fraction = 0.2;
  return c;
}

namespace {

Channel channel_from_name(const std::string& name) {
  for (std::size_t i = 0; i < kNumChannels; ++i)
    if (kChannelNames[i] == name) return static_cast<Channel>(i);
  throw DataError("cell config: unknown channel '" + name + "'");
}

std::vector<Channel> channels_from_json(const ordered_json& j, const std::string& what) {
  if (!j.is_array()) throw DataError("cell config: " + what + " must be an array");
  std::vector<Channel> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw DataError("cell config: " + what + " must hold channel names");
    out.push_back(channel_from_name(v.get<std::string>()));
  }
  return out;
}

ordered_json channels_to_json(const std::vector<Channel>& cs) {
  ordered_json out = ordered_json::array();
  for (Channel c : cs) out.push_back(std::string(kChannelNames[static_cast<std::size_t>(c)]));
  return out;
}

// Reads fields of one JSON object, rejecting any key nobody asked for.
class Fields {
 public:
  Fields(const ordered_json& j, std::string what) : j_(j), what_(std::move(what)) {
    if (!j.is_object()) throw DataError("cell config: " + what_ + " must be an object");
  }
  // Call once every field has been read.
  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.contains(key))
        throw DataError("cell config: unknown field '" + key + "' in " + what_);
  }

  const ordered_json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  void number(const std::string& key, double& out) {
    if (const auto* v = get(key)) {
      if (!v->is_number()) throw DataError("cell config: '" + key + "' must be a number");
      out = v->get<double>();
    }
  }
  template <typename Int>
  void integer(const std::string& key, Int& out) {
    if (const auto* v = get(key)) {
      if (!v->is_number_integer())
        throw DataError("cell config: '" + key + "' must be an integer");
      out = v->get<Int>();
    }
  }

 private:
  const ordered_json& j_;
  std::string what_;
  std::set<std::string> seen_;
};

}  // namespace

CellConfig load_cell_config(std::string_view document) {
  ordered_json j;
  try {
    j = ordered_json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("malformed cell config: ") + e.what());
  }
  CellConfig c = default_cell_config();
  {
    Fields f(j, "cell config");
    f.number("cell_radius_m", c.cell_radius_m);
    f.number("user_density", c.user_density);
    f.number("path_loss_exponent", c.path_loss_exponent);
    f.number("reference_distance_m", c.reference_distance_m);
    f.number("k_db", c.k_db);
    f.number("noise_w", c.noise_w);
    f.number("enb_power_w", c.enb_power_w);
    f.number("ue_power_w", c.ue_power_w);
    f.number("carrier_to_jammer_db", c.carrier_to_jammer_db);
    f.number("jammer_power_w", c.jammer_power_w);
    f.number("jam_probability", c.jam_probability);
    f.number("fairness_window", c.fairness_window);
    f.integer("rb_count", c.rb_count);
    f.number("rb_bandwidth_hz", c.rb_bandwidth_hz);
    f.number("capacity_fraction", c.capacity_fraction);
    f.integer("subframes", c.subframes);
    f.number("demod_threshold_db", c.demod_threshold_db);
    f.number("acquiring_fraction", c.acquiring_fraction);
    f.integer("drops", c.drops);
    f.integer("seed", c.seed);
    f.integer("jobs", c.jobs);
    f.number("lambda", c.lambda);
    f.integer("horizon", c.horizon);
    if (const auto* w = f.get("weights")) {
      Fields fw(*w, "weights");
      fw.number("rate_cheater", c.weights.rate_cheater);
      fw.number("connected_cheater", c.weights.connected_cheater);
      fw.number("connected_saboteur", c.weights.connected_saboteur);
      fw.number("rate_enb", c.weights.rate_enb);
      fw.finish();
    }
    if (const auto* s = f.get("states")) {
      if (!s->is_array()) throw DataError("cell config: states must be an array");
      c.states.clear();
      for (const auto& v : *s) {
        if (!v.is_string()) throw DataError("cell config: states must hold strings");
        c.states.push_back(v.get<std::string>());
      }
    }
    if (const auto* p = f.get("prior")) {
      if (!p->is_array()) throw DataError("cell config: prior must be an array");
      c.prior.clear();
      for (const auto& v : *p) {
        if (!v.is_number()) throw DataError("cell config: prior must hold numbers");
        c.prior.push_back(v.get<double>());
      }
    }
    if (const auto* a = f.get("jammer_actions")) {
      if (!a->is_array()) throw DataError("cell config: jammer_actions must be an array");
      c.jammer_actions.clear();
      for (const auto& v : *a) {
        Fields fa(v, "jammer action");
        JammerActionEffect e;
        const auto* label = fa.get("label");
        if (label == nullptr || !label->is_string())
          throw DataError("cell config: jammer action needs a label");
        e.label = label->get<std::string>();
        if (const auto* ch = fa.get("jammed")) e.jammed = channels_from_json(*ch, "jammed");
        fa.finish();
        c.jammer_actions.push_back(std::move(e));
      }
    }
    if (const auto* a = f.get("enb_actions")) {
      if (!a->is_array()) throw DataError("cell config: enb_actions must be an array");
      c.enb_actions.clear();
      for (const auto& v : *a) {
        Fields fa(v, "eNodeB action");
        EnbActionEffect e;
        const auto* label = fa.get("label");
        if (label == nullptr || !label->is_string())
          throw DataError("cell config: eNodeB action needs a label");
        e.label = label->get<std::string>();
        fa.number("csrs_gain", e.csrs_gain);
        fa.number("downlink_gain", e.downlink_gain);
        fa.number("rate_scale", e.rate_scale);
        fa.number("bandwidth_fraction", e.bandwidth_fraction);
        fa.number("jam_evasion", e.jam_evasion);
        fa.number("unavailable_fraction", e.unavailable_fraction);
        if (const auto* ch = fa.get("protected_channels"))
          e.protected_channels = channels_from_json(*ch, "protected_channels");
        fa.finish();
        c.enb_actions.push_back(std::move(e));
      }
    }
    f.finish();
  }
  c.validate();
  return c;
}

CellConfig load_cell_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open cell config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_cell_config(ss.str());
}

std::string save_cell_config(const CellConfig& c) {
  c.validate();
  ordered_json j;
  j["cell_radius_m"] = c.cell_radius_m;
  j["user_density"] = c.user_density;
  j["path_loss_exponent"] = c.path_loss_exponent;
  j["reference_distance_m"] = c.reference_distance_m;
  j["k_db"] = c.k_db;
  j["noise_w"] = c.noise_w;
  j["enb_power_w"] = c.enb_power_w;
  j["ue_power_w"] = c.ue_power_w;
  j["carrier_to_jammer_db"] = c.carrier_to_jammer_db;
  j["jammer_power_w"] = c.jammer_power_w;
  j["jam_probability"] = c.jam_probability;
  j["fairness_window"] = c.fairness_window;
  j["rb_count"] = c.rb_count;
  j["rb_bandwidth_hz"] = c.rb_bandwidth_hz;
  j["capacity_fraction"] = c.capacity_fraction;
  j["subframes"] = c.subframes;
  j["demod_threshold_db"] = c.demod_threshold_db;
  j["acquiring_fraction"] = c.acquiring_fraction;
  j["weights"] = {{"rate_cheater", c.weights.rate_cheater},
                  {"connected_cheater", c.weights.connected_cheater},
                  {"connected_saboteur", c.weights.connected_saboteur},
                  {"rate_enb", c.weights.rate_enb}};
  j["drops"] = c.drops;
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  j["states"] = c.states;
  ordered_json ja = ordered_json::array();
  for (const auto& a : c.jammer_actions)
    ja.push_back({{"label", a.label}, {"jammed", channels_to_json(a.jammed)}});
  j["jammer_actions"] = ja;
  ordered_json ea = ordered_json::array();
  for (const auto& a : c.enb_actions)
    ea.push_back({{"label", a.label},
                  {"csrs_gain", a.csrs_gain},
                  {"downlink_gain", a.downlink_gain},
                  {"rate_scale", a.rate_scale},
                  {"bandwidth_fraction", a.bandwidth_fraction},
                  {"jam_evasion", a.jam_evasion},
                  {"unavailable_fraction", a.unavailable_fraction},
                  {"protected_channels", channels_to_json(a.protected_channels)}});
  j["enb_actions"] = ea;
  j["prior"] = c.prior;
  j["lambda"] = c.lambda;
  j["horizon"] = c.horizon;
  return j.dump(2) + "\n";
}

namespace {

// Strictly positive unit-mean exponential.
double exp_gain(Rng& rng) { return -std::log(rng.uniform() + 0x1.0p-54); }

double clamp_distance(const CellConfig& config, double d) {
  if (d >= config.reference_distance_m) return d;
  static std::atomic<bool> warned{false};
  if (!warned.exchange(true))
    std::cerr << "warning: distance below the reference distance d0 clamped to d0\n";
  return config.reference_distance_m;
}

std::size_t used_rbs(const CellConfig& config, const EnbActionEffect& e) {
  const auto n = static_cast<std::size_t>(std::lround(config.rb_count * e.bandwidth_fraction));
  return std::max<std::size_t>(n, 1);
}

}  // namespace

UserDrop drop_users(const CellConfig& config, Rng& rng) {
  UserDrop d;
  const double mean = config.mean_users();
  if (mean > 0.0) {
    std::poisson_distribution<long> poisson(mean);
    d.num_users = static_cast<std::size_t>(poisson(rng.engine()));
  }
  const std::size_t n = d.num_users;
  const double radius = config.cell_radius_m;
  auto place = [&](double& x, double& y) {
    const double r = radius * std::sqrt(rng.uniform());
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    x = r * std::cos(phi);
    y = r * std::sin(phi);
  };
  place(d.jammer_x, d.jammer_y);
  d.jammer_r0 = std::hypot(d.jammer_x, d.jammer_y);
  d.x.resize(n);
  d.y.resize(n);
  d.r0.resize(n);
  d.rj.resize(n);
  d.acquiring.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    place(d.x[m], d.y[m]);
    d.r0[m] = std::hypot(d.x[m], d.y[m]);
    d.rj[m] = std::hypot(d.x[m] - d.jammer_x, d.y[m] - d.jammer_y);
    d.acquiring[m] = rng.uniform() < config.acquiring_fraction;
  }
  const auto sf = static_cast<std::size_t>(config.subframes);
  const auto rbs = static_cast<std::size_t>(config.rb_count);
  d.ctrl_h.resize(sf * n * kNumChannels);
  d.ctrl_g.resize(sf * n * kNumChannels);
  d.data_h.resize(sf * (n + 1) * rbs);
  d.jam_draw.resize(sf);
  d.outage_draw.resize(sf);
  for (std::size_t s = 0; s < sf; ++s) {
    d.jam_draw[s] = rng.uniform();
    d.outage_draw[s] = rng.uniform();
  }
  for (double& v : d.ctrl_h) v = exp_gain(rng);
  for (double& v : d.ctrl_g) v = exp_gain(rng);
  for (double& v : d.data_h) v = exp_gain(rng);
  d.initial_average.assign(n + 1, 1.0);
  return d;
}

double path_loss_db(const CellConfig& config, double tx_dbm, double d) {
  d = clamp_distance(config, d);
  return tx_dbm + config.k_db -
         10.0 * config.path_loss_exponent * std::log10(d / config.reference_distance_m);
}

double path_gain(const CellConfig& config, double d) {
  d = clamp_distance(config, d);
  return std::pow(10.0, config.k_db / 10.0) *
         std::pow(d / config.reference_distance_m, -config.path_loss_exponent);
}

double sinr(const CellConfig& config, double h, double g, double r0, double rj, double p0,
            double pj) {
  return p0 * h * path_gain(config, r0) / (config.noise_w + pj * g * path_gain(config, rj));
}

double sinr_cj(const CellConfig& config, double h, double g, double r0, double rj, double p0,
               double pj) {
  const double cj = p0 / pj;
  return cj * h * path_gain(config, r0) / (config.noise_w / pj + g * path_gain(config, rj));
}

double rb_throughput(double gamma, double epsilon, double rb_bandwidth_hz) {
  if (gamma < 0.0) throw DataError("SINR must be >= 0");
  return epsilon * rb_bandwidth_hz * std::log2(1.0 + gamma);
}

PfsResult pfs_allocate(std::span<const double> rates, std::size_t num_users,
                       std::span<const double> averages, double fairness_window) {
  if (num_users == 0 || rates.size() % num_users != 0 || averages.size() != num_users)
    throw DataError("pfs_allocate: dimension mismatch");
  const std::size_t rbs = rates.size() / num_users;
  PfsResult out;
  out.winners.assign(rbs, kNoWinner);
  std::vector<double> won(num_users, 0.0);
  for (std::size_t k = 0; k < rbs; ++k) {
    double best = 0.0;
    for (std::size_t m = 0; m < num_users; ++m) {
      const double r = rates[m * rbs + k];
      if (r <= 0.0) continue;
      const double ratio =
          averages[m] > 0.0 ? r / averages[m] : std::numeric_limits<double>::infinity();
      if (ratio > best) {
        best = ratio;
        out.winners[k] = m;
      }
    }
    if (out.winners[k] != kNoWinner) won[out.winners[k]] += rates[out.winners[k] * rbs + k];
  }
  out.averages.resize(num_users);
  const double keep = 1.0 - 1.0 / fairness_window;
  for (std::size_t m = 0; m < num_users; ++m)
    out.averages[m] = keep * averages[m] + won[m] / fairness_window;
  return out;
}

RawKpi evaluate_drop(const CellConfig& config, const UserDrop& drop, std::size_t state,
                     std::size_t a_j, std::size_t a_0) {
  const JammerActionEffect& je = config.jammer_actions.at(a_j);
  const EnbActionEffect& ee = config.enb_actions.at(a_0);
  const bool cheater = state == 0;
  const std::size_t n = drop.num_users;
  const std::size_t sched = n + (cheater ? 1 : 0);
  const auto sf = static_cast<std::size_t>(config.subframes);
  const auto all_rbs = static_cast<std::size_t>(config.rb_count);
  const std::size_t rbs = used_rbs(config, ee);
  const double threshold = std::pow(10.0, config.demod_threshold_db / 10.0);

  std::array<double, kNumChannels> jam_power{};
  if (!je.jammed.empty()) {
    const double share = config.jammer_power() / static_cast<double>(je.jammed.size());
    for (Channel c : je.jammed) jam_power[static_cast<std::size_t>(c)] = share;
    for (Channel c : ee.protected_channels) jam_power[static_cast<std::size_t>(c)] = 0.0;
  }
  std::array<double, kNumChannels> tx_power{};
  for (std::size_t c = 0; c < kNumChannels; ++c) {
    const auto ch = static_cast<Channel>(c);
    tx_power[c] = is_uplink(ch) ? config.ue_power_w
                  : ch == Channel::kCsRs ? config.enb_power_w * ee.csrs_gain
                                          : config.enb_power_w * ee.downlink_gain;
  }
  const double data_power = config.enb_power_w * ee.downlink_gain;
  const double jam_threshold = config.jam_probability * (1.0 - ee.jam_evasion);
  constexpr std::array<Channel, 3> kConnectedNeeds = {Channel::kCsRs, Channel::kPcfich,
                                                      Channel::kPucch};
  constexpr std::array<Channel, 3> kAcquiringNeeds = {Channel::kCsRs, Channel::kPbch,
                                                      Channel::kPrach};

  // Pilot SINR without jamming, for the cheater (it does not jam itself).
  const double cheater_gain = path_gain(config, drop.jammer_r0);
  const double cheater_pilot = tx_power[0] * cheater_gain / config.noise_w;

  std::vector<double> averages = drop.initial_average;
  averages.resize(sched);
  std::vector<double> rates(sched * rbs);
  std::vector<double> chan_sinr(kNumChannels);
  double cheater_total = 0.0, connected_total = 0.0, legit_total = 0.0;

  for (std::size_t s = 0; s < sf; ++s) {
    if (drop.outage_draw[s] < ee.unavailable_fraction) {
      for (double& a : averages) a *= 1.0 - 1.0 / config.fairness_window;
      continue;
    }
    const bool jam_on = drop.jam_draw[s] < jam_threshold;
    for (std::size_t m = 0; m < n; ++m) {
      const double* h = &drop.ctrl_h[(s * n + m) * kNumChannels];
      const double* g = &drop.ctrl_g[(s * n + m) * kNumChannels];
      for (std::size_t c = 0; c < kNumChannels; ++c) {
        const bool up = is_uplink(static_cast<Channel>(c));
        const double pj = jam_on ? jam_power[c] : 0.0;
        chan_sinr[c] =
            sinr(config, h[c], g[c], drop.r0[m], up ? drop.jammer_r0 : drop.rj[m], tx_power[c], pj);
      }
      bool ok = true;
      for (Channel c : drop.acquiring[m] ? kAcquiringNeeds : kConnectedNeeds)
        ok = ok && chan_sinr[static_cast<std::size_t>(c)] >= threshold;
      double* row = &rates[m * rbs];
      if (!ok) {
        std::fill(row, row + rbs, 0.0);
        continue;
      }
      connected_total += 1.0;
      // Pilot-aided estimation: the data SINR degrades with the pilot SINR.
      const double pilot = chan_sinr[0];
      const double gain = data_power * path_gain(config, drop.r0[m]) / config.noise_w;
      const double* dh = &drop.data_h[(s * (n + 1) + m) * all_rbs];
      for (std::size_t k = 0; k < rbs; ++k) {
        const double d = gain * dh[k];
        row[k] = ee.rate_scale *
                 rb_throughput(d * pilot / (d + pilot + 1.0), config.capacity_fraction,
                               config.rb_bandwidth_hz);
      }
    }
    if (cheater) {
      const double gain = data_power * cheater_gain / config.noise_w;
      const double* dh = &drop.data_h[(s * (n + 1) + n) * all_rbs];
      double* row = &rates[n * rbs];
      for (std::size_t k = 0; k < rbs; ++k) {
        const double d = gain * dh[k];
        row[k] = ee.rate_scale * rb_throughput(d * cheater_pilot / (d + cheater_pilot + 1.0),
                                               config.capacity_fraction, config.rb_bandwidth_hz);
      }
    }
    if (sched == 0) continue;
    PfsResult pfs = pfs_allocate(rates, sched, averages, config.fairness_window);
    for (std::size_t k = 0; k < rbs; ++k) {
      const std::size_t w = pfs.winners[k];
      if (w == kNoWinner) continue;
      const double r = rates[w * rbs + k];
      if (w < n)
        legit_total += r;
      else
        cheater_total += r;
    }
    averages = std::move(pfs.averages);
  }
  RawKpi out;
  const double subframes = static_cast<double>(sf);
  out.cheater_rate = cheater_total / subframes;
  out.connected = connected_total / subframes;
  out.enb_rate = legit_total / subframes / static_cast<double>(std::max<std::size_t>(n, 1));
  return out;
}

namespace {

// Neumaier compensated sum, taken in index order.
double compensated_sum(const std::vector<double>& xs) {
  double sum = 0.0, c = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    c += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + c;
}

struct DropSeries {
  std::vector<double> cheater_rate, connected, enb_rate;

  explicit DropSeries(std::size_t drops)
      : cheater_rate(drops), connected(drops), enb_rate(drops) {}
  void set(std::size_t d, const RawKpi& k) {
    cheater_rate[d] = k.cheater_rate;
    connected[d] = k.connected;
    enb_rate[d] = k.enb_rate;
  }
};

// Ratio of means; the standard error treats the baseline mean as exact.
Estimate normalize(const std::vector<double>& xs, const std::vector<double>& base) {
  const double n = static_cast<double>(xs.size());
  const double mean = compensated_sum(xs) / n;
  const double base_mean = compensated_sum(base) / n;
  Estimate e;
  if (base_mean == 0.0) {
    if (mean != 0.0) throw DataError("KPI baseline is zero but the action pair's is not");
    e.mean = 1.0;
    return e;
  }
  e.mean = mean / base_mean;
  if (xs.size() > 1) {
    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - mean) * (xs[i] - mean);
    e.se = std::sqrt(compensated_sum(sq) / (n - 1.0) / n) / std::abs(base_mean);
  }
  return e;
}

KpiRecord normalize(const DropSeries& pair, const DropSeries& base) {
  return {normalize(pair.cheater_rate, base.cheater_rate), normalize(pair.connected, base.connected),
          normalize(pair.enb_rate, base.enb_rate)};
}

// Runs body(d, drop) for every drop, fanned out over config.jobs threads.
template <typename Body>
void for_each_drop(const CellConfig& config, Body body) {
  const Rng root(config.seed);
  const auto drops = static_cast<std::size_t>(config.drops);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t d; (d = next.fetch_add(1)) < drops;) {
      try {
        Rng rng = root.substream(static_cast<std::uint64_t>(d));
        body(d, drop_users(config, rng));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = drops;
      }
    }
  };
  const auto jobs = std::min<std::size_t>(static_cast<std::size_t>(config.jobs), drops);
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

KpiRecord simulate_pair(const CellConfig& config, std::size_t state, std::size_t a_j,
                        std::size_t a_0) {
  config.validate();
  if (state >= config.states.size() || a_j >= config.jammer_actions.size() ||
      a_0 >= config.enb_actions.size())
    throw DataError("simulate_pair: action or state out of range");
  const auto drops = static_cast<std::size_t>(config.drops);
  DropSeries pair(drops), base(drops);
  for_each_drop(config, [&](std::size_t d, const UserDrop& drop) {
    base.set(d, evaluate_drop(config, drop, state, 0, 0));
    pair.set(d, evaluate_drop(config, drop, state, a_j, a_0));
  });
  return normalize(pair, base);
}

PayoffEstimate build_payoff_matrices(const CellConfig& config) {
  config.validate();
  const std::size_t nj = config.jammer_actions.size();
  const std::size_t n0 = config.enb_actions.size();
  const std::size_t ns = config.states.size();
  const auto drops = static_cast<std::size_t>(config.drops);
  std::vector<DropSeries> series(ns * nj * n0, DropSeries(drops));
  for_each_drop(config, [&](std::size_t d, const UserDrop& drop) {
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t a = 0; a < nj; ++a)
        for (std::size_t b = 0; b < n0; ++b)
          series[(s * nj + a) * n0 + b].set(d, evaluate_drop(config, drop, s, a, b));
  });

  const UtilityWeights& w = config.weights;
  PayoffEstimate out;
  GameSpec& g = out.game;
  g.states = config.states;
  std::vector<std::string> labels;
  for (const auto& a : config.jammer_actions) labels.push_back(a.label);
  g.jammer_actions = ActionSet(labels);
  labels.clear();
  for (const auto& a : config.enb_actions) labels.push_back(a.label);
  g.enb_actions = ActionSet(labels);
  g.prior = BeliefState{config.prior};
  g.discount = config.lambda;
  g.horizon = config.horizon;
  for (std::size_t s = 0; s < ns; ++s) {
    Matrix u(nj, n0), se(nj, n0);
    const DropSeries& base = series[s * nj * n0];
    for (std::size_t a = 0; a < nj; ++a)
      for (std::size_t b = 0; b < n0; ++b) {
        const KpiRecord k = normalize(series[(s * nj + a) * n0 + b], base);
        if (s == 0) {
          u(a, b) = w.rate_cheater * (k.cheater_rate.mean - 1.0) - w.connected_cheater * k.connected.mean;
          se(a, b) = std::hypot(w.rate_cheater * k.cheater_rate.se, w.connected_cheater * k.connected.se);
        } else {
          u(a, b) = -w.connected_saboteur * k.connected.mean - w.rate_enb * k.enb_rate.mean;
          se(a, b) = std::hypot(w.connected_saboteur * k.connected.se, w.rate_enb * k.enb_rate.se);
        }
      }
    const double scale = std::abs(u(0, 0));
    if (!(scale > 0.0)) throw DataError("baseline utility is zero; cannot normalize");
    for (std::size_t a = 0; a < nj; ++a)
      for (std::size_t b = 0; b < n0; ++b) {
        u(a, b) /= scale;
        se(a, b) /= scale;
      }
    g.payoff.push_back(std::move(u));
    out.standard_error.push_back(std::move(se));
  }
  g.validate();
  return out;
}

}  // namespace jamgame::lte
