#include "rsjd/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "rsjd/math.hpp"

namespace rsjd {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 33;
    z *= 0xff51afd7ed558ccdULL;
    z ^= z >> 33;
    z *= 0xc4ceb9fe1a85ec53ULL;
    z ^= z >> 33;
    return z;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t purpose) {
    state_ = mix64(seed * kGolden + 1) ^ mix64(stream + 0x6a09e667f3bcc909ULL) ^
             mix64(purpose * 0xbb67ae8584caa73bULL + purpose);
    gamma_ = mix64(state_ + kGolden) | 1ULL;
}

std::uint64_t CounterRng::next_bits() {
    state_ += gamma_;
    return mix64(state_);
}

double CounterRng::uniform() {
    return (static_cast<double>(next_bits() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() { return norm_inv(uniform()); }

double CounterRng::exponential(double rate) { return -std::log1p(-uniform()) / rate; }

int CounterRng::poisson(double mean) {
    if (mean < 0.0) throw std::domain_error("poisson: negative mean");
    if (mean == 0.0) return 0;
    if (mean > 200.0) throw std::domain_error("poisson: mean too large for inversion sampling");
    const double u = uniform();
    double p = std::exp(-mean);
    double cum = p;
    int k = 0;
    while (u > cum && k < 2000) {
        ++k;
        p *= mean / k;
        cum += p;
    }
    return k;
}

}  // namespace rsjd
