#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>

namespace vrjp {

inline constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

inline std::uint64_t fnv1a64_bytes(const void* data, std::size_t len,
                             std::uint64_t h = kFnvOffset) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = kFnvOffset) {
  return fnv1a64_bytes(s.data(), s.size(), h);
}

// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double x);

std::string hex64(std::uint64_t x);

double logsumexp(std::span<const double> xs);

// Runs job(0..count-1) on at most `threads` workers. Callers must write results
// into per-index slots; merge order is then independent of scheduling.
void parallel_for(int count, int threads, const std::function<void(int)>& job);

}  // namespace vrjp
