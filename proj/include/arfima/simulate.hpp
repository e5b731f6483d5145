#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "arfima/core_model.hpp"

namespace arfima {

/// Exact Gaussian FI(d) draw of length n via the Durbin-Levinson
/// innovations recursion on the FI(d) autocovariances. O(n^2).
std::vector<double> simulate_fid_exact(std::size_t n, double d, double mu, double sigma,
                                       std::uint64_t seed);

struct SimSpec {
  std::size_t n = 1024;
  MemoryParams memory;
  double mu = 0.0;
  InnovationSpec innovation;
  std::uint64_t seed = 1;
  /// Discarded warm-up for the ARMA filter and the truncated MA(inf) core;
  /// default 10 * max(p, q, 50).
  std::optional<std::size_t> burnin;

  void validate() const;
  std::size_t resolved_burnin() const;
};

/// ARFIMA(p,d,q) draw: an FI(d) core (exact for Gaussian innovations,
/// truncated MA(inf) otherwise) passed through Phi(B) X = Theta(B) Y.
/// With p = q = 0 and Gaussian innovations this reproduces
/// simulate_fid_exact for the same seed.
std::vector<double> simulate_arfima(const SimSpec& spec);

}  // namespace arfima
