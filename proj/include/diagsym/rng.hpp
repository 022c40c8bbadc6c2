#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace diagsym {

using Rng = std::mt19937_64;

// Independent named streams: the same (master, name, index) always gives the
// same generator, regardless of what else was drawn before.
std::uint64_t stream_seed(std::uint64_t master, std::string_view name, std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t master, std::string_view name, std::uint64_t index = 0) {
  return Rng(stream_seed(master, name, index));
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace diagsym
