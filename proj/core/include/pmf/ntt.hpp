#pragma once

#include <cstddef>
#include <vector>

#include "pmf/zring.hpp"

namespace pmf {

// Shared NTT configuration: five 62-bit primes c*2^24+1, enough headroom for
// convolutions of length up to 2^24 with coefficients below 2^126.
class NttPlan {
 public:
  static const NttPlan& instance();
  const std::vector<u64>& primes() const { return primes_; }
  const std::vector<u64>& gens() const { return gens_; }
  static void transform(std::vector<u64>& a, u64 q, u64 g, bool inverse);

 private:
  NttPlan();
  std::vector<u64> primes_, gens_;
};

// c = a*b truncated to out_len coefficients, in the ring's Montgomery form.
std::vector<u128> ntt_multiply(const ZRing& ring, const std::vector<u128>& a,
                               const std::vector<u128>& b, std::size_t out_len);

}  // namespace pmf
