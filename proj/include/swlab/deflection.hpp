#pragma once

#include <cstdint>
#include <vector>

namespace swlab {

// Cascaded Clos stages with deflection routing. A packet needs two
// consecutive successes (output module, then output port); a failure sends
// it back to the first step. Natural log throughout.

struct DeflectionParams {
  double rho = 0.0;
  double p = 1.0;  // success probability at one stage
  double q = 0.0;  // deflection probability
  double v = 0.0;
  double theta = 0.0;
  double slope = 0.0;      // m in ln P_loss <= m (L + 2) + b
  double intercept = 0.0;  // b
  double a = 0.0;
  double c = 0.0;

  static DeflectionParams from_load(double rho);
};

double success_probability(double rho);

struct AbsorptionSeries {
  std::vector<double> g_q;  // absorption (exit) probability at stage k
  std::vector<double> g_r;  // probability of sitting in the second-step state
  std::vector<double> g_o;  // probability of sitting in the first-step state
};

AbsorptionSeries absorption_series(double p, double q, int k_max);

// Product form for G_Q(k) with cosh/sinh factors.
double closed_form_term(double p, double q, int k);

// Exact tail sum over k > L, summed forward until terms vanish.
double exact_tail(double p, double q, int L);

struct TailBounds {
  double explicit_bound = 0.0;    // parity-dependent cosh/sinh expression
  double log_linear_bound = 0.0;  // exp(m (L + 2) + b)
};

TailBounds closed_form_tail(double p, double q, int L);

double loss_bound(double rho, int L);

struct DeflectionSimulation {
  int n = 0;
  int stages = 0;
  double rho = 0.0;
  std::uint64_t slots = 0;
  std::uint64_t offered = 0;
  std::uint64_t delivered = 0;
  std::uint64_t lost = 0;
  std::vector<std::uint64_t> exit_histogram;  // index = exit stage, 1..stages

  double loss() const {
    return offered == 0 ? 0.0 : static_cast<double>(lost) / static_cast<double>(offered);
  }
  std::vector<double> exit_pmf() const;  // normalised over offered packets
};

// Simplified n = k cascade: n modules of size n x n per stage, N = n^2 wires.
DeflectionSimulation simulate_deflection(int n, int stages, double rho,
                                         std::uint64_t slots, std::uint64_t seed);

}  // namespace swlab
