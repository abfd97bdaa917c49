#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace swlab {

using BigInt = boost::multiprecision::cpp_int;

// Crossbar contention: every input holds a packet with probability rho and
// picks an output uniformly; one packet per output survives. Natural log.

struct CrossbarLoad {
  int n_ports = 0;
  double offered_load = 0.0;
  double carried_load = 0.0;
};

struct PowerStats {
  double signal_mean = 0.0;
  double noise_mean = 0.0;
  double variance = 0.0;
  double psnr = 0.0;  // +inf when noise_mean == 0
};

double carried_load(double rho, int n_ports);
double carried_load_asymptotic(double rho);
double psnr(double carried);
PowerStats power_stats(int n_ports, double rho);

struct CrossbarSimulation {
  CrossbarLoad load;  // carried_load is the empirical busy fraction
  PowerStats stats;   // empirical busy-count moments
  double busy_skewness = 0.0;
  std::uint64_t slots = 0;
  // histogram[i] = number of (slot, output) pairs that received i packets
  std::vector<std::uint64_t> occupancy_histogram;

  std::vector<double> occupancy_pmf() const;
};

CrossbarSimulation simulate_crossbar(int n_ports, double rho,
                                     std::uint64_t slots, std::uint64_t seed);

enum class OccupancyModel { kDistinguishable, kIndistinguishable };

struct OccupancyDistribution {
  OccupancyModel model = OccupancyModel::kDistinguishable;
  double rho = 0.0;
  std::vector<double> pmf;  // pmf[i] = P(i packets at an output)
};

OccupancyDistribution boltzmann_pmf(double rho, OccupancyModel model);

// Fold a pmf down to levels 0..max_level, last bucket absorbing the rest.
std::vector<double> truncate_pmf(const std::vector<double>& pmf, int max_level);
double total_variation(const std::vector<double>& a, const std::vector<double>& b);

// State-counting rules for an occupancy vector n_0..n_r.
enum class StateCountModel {
  kSinglePacketInputs,  // at most one packet per input, packets distinguishable by source
  kDistinguishable,     // inputs unconstrained, packets distinguishable
  kIndistinguishable,   // only the occupancy pattern matters
};

BigInt count_states(int n_ports, int packets, const std::vector<int>& occupancy,
                    StateCountModel model);

struct EntropyMaximizer {
  std::vector<int> occupancy;  // lexicographically smallest argmax
  BigInt weight;
  int ties = 0;                // other vectors attaining the same weight
  std::uint64_t feasible_vectors = 0;
  std::vector<int> poisson_rounded;
  std::optional<BigInt> poisson_rounded_weight;  // empty when infeasible
};

EntropyMaximizer maximize_entropy_bruteforce(int n_ports, int packets,
                                             StateCountModel model);

}  // namespace swlab
