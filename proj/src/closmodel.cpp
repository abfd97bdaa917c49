#include "swlab/closmodel.hpp"

#include <cmath>
#include <string>

#include "swlab/contention.hpp"
#include "swlab/errors.hpp"

namespace swlab {

ClosSpec ClosSpec::make(int m, int n, int k) {
  if (m < 1 || n < 1 || k < 1) throw PreconditionError("Clos parameters must be positive");
  return ClosSpec{m, n, k};
}

AddressSplit address_split(int addr, int n) {
  if (n < 1) throw DomainError("module width must be positive");
  if (addr < 0) throw DomainError("negative port address");
  return {addr / n, addr % n};
}

AddressSplit address_split(int addr, const ClosSpec& spec) {
  if (addr < 0 || addr >= spec.ports()) {
    throw DomainError("port " + std::to_string(addr) + " outside [0, " +
                      std::to_string(spec.ports()) + ")");
  }
  return address_split(addr, spec.n);
}

double nonblocking_psnr(const ClosSpec& spec) {
  if (spec.m <= spec.n) throw DomainError("nonblocking PSNR needs m > n");
  return static_cast<double>(spec.n) / (spec.m - spec.n);
}

double random_routing_carried_load(const ClosSpec& spec, bool asymptotic_k) {
  if (spec.n > spec.m) throw DomainError("utilization n/m exceeds 1");
  const double sigma = spec.utilization();
  if (asymptotic_k) return -std::expm1(-sigma);
  return -std::expm1(spec.k * std::log1p(-sigma / spec.k));
}

double random_routing_psnr(const ClosSpec& spec, bool asymptotic_k) {
  return psnr(random_routing_carried_load(spec, asymptotic_k));
}

double max_data_rate(double m, double psnr_value) {
  if (!(psnr_value >= 0.0)) throw DomainError("PSNR must be non-negative");
  if (!(m >= 0.0)) throw DomainError("bandwidth must be non-negative");
  return m * std::log1p(psnr_value);
}

double shannon_capacity(double bandwidth, double snr) {
  if (!(snr >= 0.0) || !(bandwidth >= 0.0)) throw DomainError("bandwidth and SNR must be non-negative");
  return bandwidth * std::log2(1.0 + snr);
}

double binary_entropy(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("probability must lie in [0, 1]");
  double h = 0.0;
  if (q > 0.0) h -= q * std::log2(q);
  if (q < 1.0) h -= (1.0 - q) * std::log2(1.0 - q);
  return h;
}

double bsc_capacity(double q) { return 1.0 - binary_entropy(q); }

double random_coding_bound(int block_length, double a, double c) {
  if (!(a > 1.0) || !(c > 1.0)) throw DomainError("bound bases must exceed 1");
  if (block_length < 1) throw DomainError("block length must be positive");
  return std::pow(a, -block_length) + std::pow(c, -block_length);
}

}  // namespace swlab
