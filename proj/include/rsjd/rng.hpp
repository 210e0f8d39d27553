#pragma once

#include <cstdint>

namespace rsjd {

/// Counter-based random stream keyed by (seed, stream, purpose). Each
/// stream advances an independent SplitMix-style state with its own odd
/// increment derived from the key, so draws depend only on the key and the
/// draw index, never on scheduling order.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t purpose = 0);

    std::uint64_t next_bits();
    double uniform();  // (0, 1)
    double normal();   // standard normal via inverse cdf
    double exponential(double rate);
    int poisson(double mean);

private:
    std::uint64_t state_;
    std::uint64_t gamma_;
};

/// Purpose tags keep conceptually distinct draws on distinct substreams
/// (e.g. shared Brownian noise versus per-path randomisers).
namespace rng_purpose {
inline constexpr std::uint64_t kBrownian = 1;
inline constexpr std::uint64_t kRandomiser = 2;
inline constexpr std::uint64_t kJumps = 3;
inline constexpr std::uint64_t kSojourn = 4;
inline constexpr std::uint64_t kChain = 5;
}  // namespace rng_purpose

}  // namespace rsjd
