#pragma once

namespace swlab {

// Three-stage Clos network C(m, n, k): k input modules n x m, m central
// modules k x k, k output modules m x n. Indices are 0-based.
struct ClosSpec {
  int m = 1;
  int n = 1;
  int k = 1;

  static ClosSpec make(int m, int n, int k);

  int ports() const { return n * k; }
  double utilization() const { return static_cast<double>(n) / m; }
  bool rearrangeable() const { return m >= n; }
  bool strictly_nonblocking() const { return m >= 2 * n - 1; }
};

struct RoutingTag {
  int central = 0;     // G
  int out_module = 0;  // Q_D
  int out_port = 0;    // R_D

  int destination(int n) const { return n * out_module + out_port; }
  friend bool operator==(const RoutingTag&, const RoutingTag&) = default;
};

struct AddressSplit {
  int quotient = 0;
  int remainder = 0;
};

AddressSplit address_split(int addr, int n);
AddressSplit address_split(int addr, const ClosSpec& spec);

// Natural log: Eqs. for PSNR versus bandwidth.
double nonblocking_psnr(const ClosSpec& spec);
double random_routing_carried_load(const ClosSpec& spec, bool asymptotic_k);
double random_routing_psnr(const ClosSpec& spec, bool asymptotic_k);
double max_data_rate(double m, double psnr);

// Base 2: transmission-side reference formulas.
double shannon_capacity(double bandwidth, double snr);
double binary_entropy(double q);
double bsc_capacity(double q);
double random_coding_bound(int block_length, double a, double c);

}  // namespace swlab
