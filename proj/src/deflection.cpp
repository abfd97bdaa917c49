#include "swlab/deflection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "swlab/errors.hpp"

namespace swlab {
namespace {

void check_pq(double p, double q) {
  if (!(p > 0.0 && p < 1.0) || std::abs(p + q - 1.0) > 1e-12) {
    throw PreconditionError("need 0 < p < 1 and p + q = 1");
  }
}

}  // namespace

double success_probability(double rho) {
  if (rho > 1.0) {
    throw DomainError("offered load above 1: the loss bound does not apply in that regime");
  }
  if (!(rho >= 0.0)) throw DomainError("offered load must be non-negative");
  if (rho == 0.0) return 1.0;
  return -std::expm1(-rho) / rho;
}

DeflectionParams DeflectionParams::from_load(double rho) {
  DeflectionParams d;
  d.rho = rho;
  d.p = success_probability(rho);
  d.q = 1.0 - d.p;
  const double p = d.p;
  const double q = d.q;
  const double s = std::sqrt(q * q + 4.0 * p * q);
  d.v = s / 2.0;
  if (q > 0.0) {
    d.theta = std::log((q + s) / (2.0 * std::sqrt(p * q)));
    d.slope = std::log((q + s) / 2.0);
    d.intercept = std::log(1.0 / (q * s));
    d.a = 2.0 / (q + s);
    d.c = (q + s) * (q + s) / (4.0 * q * s);
  }
  return d;
}

AbsorptionSeries absorption_series(double p, double q, int k_max) {
  check_pq(p, q);
  if (k_max < 2) throw PreconditionError("k_max must be at least 2");
  AbsorptionSeries s;
  s.g_o.assign(k_max + 1, 0.0);
  s.g_r.assign(k_max + 1, 0.0);
  s.g_q.assign(k_max + 1, 0.0);
  // first-step state is entered at stage 0; every failure returns there
  s.g_o[0] = 1.0;
  for (int k = 1; k <= k_max; ++k) {
    s.g_r[k] = p * s.g_o[k - 1];
    s.g_q[k] = p * s.g_r[k - 1];
    s.g_o[k] = q * (s.g_o[k - 1] + s.g_r[k - 1]);
  }
  return s;
}

double closed_form_term(double p, double q, int k) {
  check_pq(p, q);
  if (k < 2) return 0.0;
  const double v = std::sqrt(q * q + 4.0 * p * q) / 2.0;
  const double theta = std::log((q + 2.0 * v) / (2.0 * std::sqrt(p * q)));
  const double scale = p / (v * q) * std::pow(p * q, (k + 1) / 2.0);
  const double arg = (k - 1) * theta;
  return scale * (k % 2 == 0 ? std::cosh(arg) : std::sinh(arg));
}

double exact_tail(double p, double q, int L) {
  check_pq(p, q);
  if (L < 0) throw PreconditionError("L must be non-negative");
  double o = 1.0, r = 0.0, tail = 0.0;
  for (int k = 1;; ++k) {
    const double next_r = p * o;
    const double g = p * r;
    o = q * (o + r);
    r = next_r;
    if (k > L) {
      tail += g;
      if (k > L + 4 && (o + r) < tail * 1e-18) break;
    }
    if (o + r == 0.0) break;
  }
  return tail;
}

TailBounds closed_form_tail(double p, double q, int L) {
  check_pq(p, q);
  if (q >= 0.5) throw DomainError("deflection probability must be below 1/2");
  if (L < 0) throw PreconditionError("L must be non-negative");
  const double s = std::sqrt(q * q + 4.0 * p * q);
  const double v = s / 2.0;
  const double theta = std::log((q + s) / (2.0 * std::sqrt(p * q)));
  const double slope = std::log((q + s) / 2.0);
  const double intercept = std::log(1.0 / (q * s));
  const double scale = std::pow(p * q, (L + 2) / 2.0) / (v * q);
  const double arg = (L + 2) * theta;
  TailBounds t;
  t.explicit_bound = scale * (L % 2 == 0 ? std::sinh(arg) : std::cosh(arg));
  t.log_linear_bound = std::exp(slope * (L + 2) + intercept);
  return t;
}

double loss_bound(double rho, int L) {
  if (!(rho > 0.0)) throw DomainError("offered load must be positive");
  if (L < 0) throw PreconditionError("L must be non-negative");
  const auto d = DeflectionParams::from_load(rho);
  return d.c * std::pow(d.a, -L);
}

std::vector<double> DeflectionSimulation::exit_pmf() const {
  std::vector<double> pmf(exit_histogram.size(), 0.0);
  if (offered == 0) return pmf;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    pmf[k] = static_cast<double>(exit_histogram[k]) / static_cast<double>(offered);
  }
  return pmf;
}

DeflectionSimulation simulate_deflection(int n, int stages, double rho,
                                         std::uint64_t slots, std::uint64_t seed) {
  if (n < 2) throw PreconditionError("module size must be at least 2");
  if (stages < 2) throw PreconditionError("need at least 2 stages");
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("offered load must lie in [0, 1]");

  struct Packet {
    int dest;
    int module;
    bool need_r;
  };

  const int wires = n * n;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution arrival(rho);
  std::uniform_int_distribution<int> pick_dest(0, wires - 1);

  DeflectionSimulation sim;
  sim.n = n;
  sim.stages = stages;
  sim.rho = rho;
  sim.slots = slots;
  sim.exit_histogram.assign(stages + 1, 0);

  std::vector<std::vector<Packet>> at(n), next(n);
  std::vector<std::vector<int>> contenders(n);
  std::vector<int> losers, free_links;

  for (std::uint64_t t = 0; t < slots; ++t) {
    for (auto& m : at) m.clear();
    for (int w = 0; w < wires; ++w) {
      if (!arrival(rng)) continue;
      at[w / n].push_back({pick_dest(rng), w / n, false});
      ++sim.offered;
    }
    for (int stage = 1; stage <= stages; ++stage) {
      for (auto& m : next) m.clear();
      for (int mod = 0; mod < n; ++mod) {
        auto& pk = at[mod];
        if (pk.empty()) continue;
        for (auto& c : contenders) c.clear();
        for (int i = 0; i < static_cast<int>(pk.size()); ++i) {
          const int link = pk[i].need_r ? pk[i].dest % n : pk[i].dest / n;
          contenders[link].push_back(i);
        }
        losers.clear();
        free_links.clear();
        for (int link = 0; link < n; ++link) {
          auto& c = contenders[link];
          if (c.empty()) {
            free_links.push_back(link);
            continue;
          }
          std::uniform_int_distribution<int> pick(0, static_cast<int>(c.size()) - 1);
          const int w = pick(rng);
          for (int j = 0; j < static_cast<int>(c.size()); ++j) {
            if (j != w) losers.push_back(c[j]);
          }
          Packet p = pk[c[w]];
          if (p.need_r) {
            if (mod * n + link != p.dest) throw std::logic_error("exit wire mismatch");
            ++sim.exit_histogram[stage];
            ++sim.delivered;
          } else {
            p.need_r = true;
            p.module = link;
            next[link].push_back(p);
          }
        }
        std::shuffle(free_links.begin(), free_links.end(), rng);
        for (std::size_t j = 0; j < losers.size(); ++j) {
          Packet p = pk[losers[j]];
          p.need_r = false;
          p.module = free_links[j];
          next[p.module].push_back(p);
        }
      }
      std::swap(at, next);
    }
    for (const auto& m : at) sim.lost += m.size();
  }
  return sim;
}

}  // namespace swlab
