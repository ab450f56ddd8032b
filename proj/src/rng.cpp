#include "fracvar/rng.hpp"

#include "fracvar/numeric.hpp"

namespace fracvar {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

CounterStream CounterStream::for_replication(std::uint64_t master_seed,
                                             std::uint64_t rep) {
    return CounterStream(mix64(master_seed + kGolden * (rep + 1)));
}

std::uint64_t CounterStream::next_u64() {
    ++counter_;
    return mix64(key_ + kGolden * counter_);
}

double CounterStream::next_uniform() {
    // 53-bit mantissa, offset half an ulp so the value lies strictly in (0,1)
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterStream::next_normal() { return norm_quantile(next_uniform()); }

void CounterStream::fill_normals(std::span<double> out) {
    for (double& x : out) x = next_normal();
}

} // namespace fracvar
