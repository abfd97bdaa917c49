#include "swlab/contention.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "swlab/errors.hpp"

namespace swlab {
namespace {

void require_load(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw DomainError("offered load must lie in [0, 1], got " + std::to_string(rho));
  }
}

BigInt factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

constexpr double kTruncationMass = 1e-12;

}  // namespace

double carried_load(double rho, int n_ports) {
  require_load(rho);
  if (n_ports < 1) throw DomainError("port count must be positive");
  if (rho == 0.0) return 0.0;
  const double n = n_ports;
  // expm1/log1p keep precision for large N
  return -std::expm1(n * std::log1p(-rho / n));
}

double carried_load_asymptotic(double rho) {
  require_load(rho);
  return -std::expm1(-rho);
}

double psnr(double carried) {
  if (!(carried >= 0.0)) throw DomainError("carried load must be non-negative");
  if (carried >= 1.0) throw DomainError("carried load 1 gives infinite PSNR");
  return carried / (1.0 - carried);
}

PowerStats power_stats(int n_ports, double rho) {
  const double c = carried_load(rho, n_ports);
  PowerStats s;
  s.signal_mean = n_ports * c;
  s.noise_mean = n_ports - s.signal_mean;
  s.variance = n_ports * c * (1.0 - c);
  s.psnr = s.noise_mean > 0.0 ? s.signal_mean / s.noise_mean
                              : std::numeric_limits<double>::infinity();
  return s;
}

std::vector<double> CrossbarSimulation::occupancy_pmf() const {
  const double total = std::accumulate(occupancy_histogram.begin(),
                                       occupancy_histogram.end(), 0.0);
  std::vector<double> pmf(occupancy_histogram.size(), 0.0);
  if (total == 0.0) return pmf;
  for (std::size_t i = 0; i < pmf.size(); ++i) pmf[i] = occupancy_histogram[i] / total;
  return pmf;
}

CrossbarSimulation simulate_crossbar(int n_ports, double rho, std::uint64_t slots,
                                     std::uint64_t seed) {
  require_load(rho);
  if (n_ports < 1) throw DomainError("port count must be positive");
  if (slots < 1) throw PreconditionError("slots must be positive");

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution arrival(rho);
  std::uniform_int_distribution<int> pick(0, n_ports - 1);

  CrossbarSimulation sim;
  sim.slots = slots;
  sim.occupancy_histogram.assign(n_ports + 1, 0);
  std::vector<int> hits(n_ports);
  long double s1 = 0, s2 = 0, s3 = 0;
  std::uint64_t busy_total = 0;

  for (std::uint64_t t = 0; t < slots; ++t) {
    std::fill(hits.begin(), hits.end(), 0);
    for (int i = 0; i < n_ports; ++i) {
      if (arrival(rng)) ++hits[pick(rng)];
    }
    int busy = 0;
    for (int h : hits) {
      ++sim.occupancy_histogram[h];
      if (h > 0) ++busy;
    }
    busy_total += busy;
    const long double b = busy;
    s1 += b;
    s2 += b * b;
    s3 += b * b * b;
  }

  const long double n = static_cast<long double>(slots);
  const long double mean = s1 / n;
  const long double var = std::max<long double>(0, s2 / n - mean * mean);
  const long double m3 = s3 / n - 3 * mean * s2 / n + 2 * mean * mean * mean;

  sim.load.n_ports = n_ports;
  sim.load.offered_load = rho;
  sim.load.carried_load =
      static_cast<double>(busy_total) / (static_cast<double>(slots) * n_ports);
  sim.stats.signal_mean = static_cast<double>(mean);
  sim.stats.noise_mean = n_ports - sim.stats.signal_mean;
  sim.stats.variance = static_cast<double>(var);
  sim.stats.psnr = sim.stats.noise_mean > 0.0
                       ? sim.stats.signal_mean / sim.stats.noise_mean
                       : std::numeric_limits<double>::infinity();
  sim.busy_skewness = var > 0 ? static_cast<double>(m3 / std::pow(var, 1.5L)) : 0.0;
  return sim;
}

OccupancyDistribution boltzmann_pmf(double rho, OccupancyModel model) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    throw DomainError("occupancy rho must be non-negative");
  }
  OccupancyDistribution d;
  d.model = model;
  d.rho = rho;
  double p;
  double ratio;
  if (model == OccupancyModel::kDistinguishable) {
    p = std::exp(-rho);
  } else {
    p = 1.0 / (1.0 + rho);
    ratio = rho / (1.0 + rho);
  }
  double cumulative = 0.0;
  for (int i = 0;; ++i) {
    d.pmf.push_back(p);
    cumulative += p;
    if (cumulative > 1.0 - kTruncationMass || p == 0.0) break;
    if (model == OccupancyModel::kDistinguishable) {
      p *= rho / (i + 1);
    } else {
      p *= ratio;
    }
  }
  d.pmf.back() += std::max(0.0, 1.0 - cumulative);
  return d;
}

std::vector<double> truncate_pmf(const std::vector<double>& pmf, int max_level) {
  std::vector<double> out(max_level + 1, 0.0);
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    out[std::min<std::size_t>(i, max_level)] += pmf[i];
  }
  return out;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = std::max(a.size(), b.size());
  double tv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = i < a.size() ? a[i] : 0.0;
    const double y = i < b.size() ? b[i] : 0.0;
    tv += std::abs(x - y);
  }
  return tv / 2.0;
}

BigInt count_states(int n_ports, int packets, const std::vector<int>& occupancy,
                    StateCountModel model) {
  if (n_ports < 1 || packets < 0) throw PreconditionError("need N >= 1 and M >= 0");
  long long outputs = 0;
  long long load = 0;
  for (std::size_t i = 0; i < occupancy.size(); ++i) {
    if (occupancy[i] < 0) throw PreconditionError("negative occupancy count");
    outputs += occupancy[i];
    load += static_cast<long long>(i) * occupancy[i];
  }
  if (outputs != n_ports) {
    throw PreconditionError("occupancy counts must sum to N (" + std::to_string(outputs) +
                            " != " + std::to_string(n_ports) + ")");
  }
  if (load != packets) {
    throw PreconditionError("occupancy levels must sum to M (" + std::to_string(load) +
                            " != " + std::to_string(packets) + ")");
  }
  if (model == StateCountModel::kSinglePacketInputs && packets > n_ports) {
    throw PreconditionError("single-packet inputs need M <= N");
  }

  BigInt placements = factorial(n_ports);
  for (int c : occupancy) placements /= factorial(c);
  if (model == StateCountModel::kIndistinguishable) return placements;

  BigInt labelings = factorial(packets);
  for (std::size_t i = 0; i < occupancy.size(); ++i) {
    const BigInt fi = factorial(static_cast<int>(i));
    for (int c = 0; c < occupancy[i]; ++c) labelings /= fi;
  }
  BigInt w = placements * labelings;
  if (model == StateCountModel::kSinglePacketInputs) {
    w *= factorial(n_ports) / (factorial(n_ports - packets) * factorial(packets));
  }
  return w;
}

EntropyMaximizer maximize_entropy_bruteforce(int n_ports, int packets,
                                             StateCountModel model) {
  if (n_ports < 1 || packets < 0) throw PreconditionError("need N >= 1 and M >= 0");
  if (n_ports > 12) throw ResourceError("exhaustive enumeration limited to N <= 12");
  if (packets > 60) throw ResourceError("exhaustive enumeration limited to M <= 60");
  if (model == StateCountModel::kSinglePacketInputs && packets > n_ports) {
    throw PreconditionError("single-packet inputs need M <= N");
  }

  EntropyMaximizer best;
  std::vector<int> occ(packets + 1, 0);
  bool have = false;

  // Partitions of M into at most N parts; occ[i] counts parts equal to i.
  std::function<void(int, int, int)> walk = [&](int remaining, int max_part, int parts) {
    if (remaining == 0) {
      occ[0] = n_ports - parts;
      const BigInt w = count_states(n_ports, packets, occ, model);
      ++best.feasible_vectors;
      if (!have || w > best.weight) {
        best.weight = w;
        best.occupancy = occ;
        best.ties = 0;
        have = true;
      } else if (w == best.weight) {
        ++best.ties;
        best.occupancy = std::min(best.occupancy, occ);
      }
      occ[0] = 0;
      return;
    }
    if (parts == n_ports) return;
    for (int part = std::min(remaining, max_part); part >= 1; --part) {
      ++occ[part];
      walk(remaining - part, part, parts + 1);
      --occ[part];
    }
  };
  walk(packets, packets, 0);

  while (best.occupancy.size() > 1 && best.occupancy.back() == 0) best.occupancy.pop_back();

  const double rho = static_cast<double>(packets) / n_ports;
  const auto poisson = boltzmann_pmf(rho, OccupancyModel::kDistinguishable);
  std::vector<int> rounded(packets + 1, 0);
  for (int i = 0; i <= packets; ++i) {
    const double p = i < static_cast<int>(poisson.pmf.size()) ? poisson.pmf[i] : 0.0;
    rounded[i] = static_cast<int>(std::lround(n_ports * p));
  }
  try {
    best.poisson_rounded_weight = count_states(n_ports, packets, rounded, model);
  } catch (const PreconditionError&) {
    best.poisson_rounded_weight.reset();
  }
  while (rounded.size() > 1 && rounded.back() == 0) rounded.pop_back();
  best.poisson_rounded = rounded;
  return best;
}

}  // namespace swlab
