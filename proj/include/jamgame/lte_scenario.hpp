#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jamgame/game_model.hpp"
#include "jamgame/rng.hpp"

namespace jamgame::lte {

// Narrowband control channels whose SINR is the per-RE carrier over noise plus jamming.
enum class Channel { kCsRs, kPcfich, kPbch, kPucch, kPrach };
inline constexpr std::size_t kNumChannels = 5;
inline constexpr std::array<std::string_view, kNumChannels> kChannelNames = {
    "CS-RS", "PCFICH", "PBCH", "PUCCH", "PRACH"};
// Uplink channels are received at the eNodeB, the rest at the UE.
bool is_uplink(Channel c);

struct JammerActionEffect {
  std::string label;
  std::vector<Channel> jammed;  // jammer power is split evenly over these
};

struct EnbActionEffect {
  std::string label;
  double csrs_gain = 1.0;             // CS-RS power multiplier
  double downlink_gain = 1.0;         // multiplier for other DL channels and PDSCH
  double rate_scale = 1.0;            // grant cap applied after scheduling
  double bandwidth_fraction = 1.0;    // share of RBs still in use
  double jam_evasion = 0.0;           // chance per subframe the jammer misses
  double unavailable_fraction = 0.0;  // chance per subframe the cell is down
  std::vector<Channel> protected_channels;  // jamming on these has no effect
};

struct UtilityWeights {
  double rate_cheater = 5.0;        // alpha^{R_c}
  double connected_cheater = 4.0;   // alpha^{N_c}
  double connected_saboteur = 5.0;  // alpha^{N_s}
  double rate_enb = 4.0;            // alpha^{R_eNB}
};

struct CellConfig {
  double cell_radius_m = 500.0;
  double user_density = 2.5e-5;  // Lambda, users per m^2
  double path_loss_exponent = 3.5;
  double reference_distance_m = 10.0;
  double k_db = -58.5;
  double noise_w = 4e-15;
  double enb_power_w = 0.4;  // per RB / control channel
  double ue_power_w = 0.2;
  double carrier_to_jammer_db = 0.0;
  double jammer_power_w = -1.0;  // < 0: derived from carrier_to_jammer_db
  double jam_probability = 1.0;
  double fairness_window = 100.0;  // t_c, subframes
  int rb_count = 25;
  double rb_bandwidth_hz = 180e3;
  double capacity_fraction = 1.0;  // epsilon
  int subframes = 10;              // per drop
  double demod_threshold_db = 0.0;
  double acquiring_fraction = 0.3;  // UEs needing PBCH/PRACH rather than PCFICH/PUCCH
  UtilityWeights weights;
  int drops = 1000;
  std::uint64_t seed = 1;
  int jobs = 1;

  std::vector<std::string> states = {"cheater", "saboteur"};
  std::vector<JammerActionEffect> jammer_actions;
  std::vector<EnbActionEffect> enb_actions;
  std::vector<double> prior = {0.5, 0.5};
  double lambda = 0.9;
  int horizon = 4;

  double jammer_power() const;
  double mean_users() const;  // Lambda * area
  // Throws DataError on invariant violations.
  void validate() const;
};

// Default parameters and the five-by-five action tables.
CellConfig default_cell_config();
CellConfig load_cell_config(std::string_view document);
CellConfig load_cell_config_file(const std::string& path);
std::string save_cell_config(const CellConfig& config);

// One Monte-Carlo drop. Index m < num_users are the legitimate UEs; the
// jammer sits at its own position (it is the Cheater UE in that state).
struct UserDrop {
  std::size_t num_users = 0;
  std::vector<double> x, y;         // positions, eNodeB at the origin
  std::vector<double> r0;           // UE-eNodeB distance
  std::vector<double> rj;           // UE-jammer distance
  std::vector<bool> acquiring;
  double jammer_x = 0.0, jammer_y = 0.0;
  double jammer_r0 = 0.0;  // jammer-eNodeB distance
  // Unit-mean exponential gains, laid out [subframe][user][channel].
  std::vector<double> ctrl_h, ctrl_g;
  // PDSCH gains, [subframe][user][rb]; user index num_users is the jammer.
  std::vector<double> data_h;
  std::vector<double> jam_draw, outage_draw;  // one uniform per subframe
  std::vector<double> initial_average;        // R-bar_m at subframe 0
};

// N ~ Poisson(Lambda area), positions uniform on the disk.
UserDrop drop_users(const CellConfig& config, Rng& rng);

// Log-distance path loss in dB; d < d0 is clamped to d0 with a one-time warning on stderr.
double path_loss_db(const CellConfig& config, double tx_dbm, double d);
// Linear K (d/d0)^-gamma with the same clamp.
double path_gain(const CellConfig& config, double d);

// p0 h G(r0) / (N + pj g G(rj)), h and g the fading gains, G the path gain.
double sinr(const CellConfig& config, double h, double g, double r0, double rj, double p0,
            double pj);
// The same SINR written through C/J = p0 / pj. pj must be > 0.
double sinr_cj(const CellConfig& config, double h, double g, double r0, double rj, double p0,
               double pj);

// Per-RB rate: epsilon * W_RB * log2(1 + gamma), W_RB = 180 kHz.
double rb_throughput(double gamma, double epsilon, double rb_bandwidth_hz = 180e3);

inline constexpr std::size_t kNoWinner = static_cast<std::size_t>(-1);

struct PfsResult {
  std::vector<std::size_t> winners;  // per RB; kNoWinner if every rate is zero
  std::vector<double> averages;      // R-bar after the moving-average update
};

// Proportional-fair scheduling and average update. rates is users x RBs, row-major. A zero average with a
// positive rate wins outright; ties go to the lowest user index.
PfsResult pfs_allocate(std::span<const double> rates, std::size_t num_users,
                       std::span<const double> averages, double fairness_window);

// Raw per-drop KPIs.
struct RawKpi {
  double cheater_rate = 0.0;  // bits/s, mean over subframes
  double connected = 0.0;     // legitimate UEs, mean over subframes
  double enb_rate = 0.0;      // legitimate throughput per dropped UE
};

RawKpi evaluate_drop(const CellConfig& config, const UserDrop& drop, std::size_t state,
                     std::size_t a_j, std::size_t a_0);

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
};

// KPIs normalized by the baseline (a_j^1, a_0^1) expectation over the same drops.
struct KpiRecord {
  Estimate cheater_rate;
  Estimate connected;
  Estimate enb_rate;
};

// Common random numbers: drop d uses Rng(seed).substream(d) for every pair.
KpiRecord simulate_pair(const CellConfig& config, std::size_t state, std::size_t a_j,
                        std::size_t a_0);

struct PayoffEstimate {
  GameSpec game;
  std::vector<Matrix> standard_error;  // per state, same shape as the payoffs
};

// U^c = a_Rc (R_c^norm - 1) - a_Nc N_c^norm, U^s = -a_Ns N_s^norm - a_R R_eNB^norm,
// each divided by the magnitude of its baseline entry so that entry is -1.
PayoffEstimate build_payoff_matrices(const CellConfig& config);

}  // namespace jamgame::lte
