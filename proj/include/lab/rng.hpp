#pragma once

#include <cstdint>

namespace lab {

// Decorrelated per-trial seed; trials are reproducible independent of order.
inline std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index) {
  return base ^ (0x9e3779b97f4a7c15ULL * (index + 1));
}

}  // namespace lab
