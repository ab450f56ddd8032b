#pragma once

#include <cstdint>
#include <span>

namespace fracvar {

// Counter-based uniform stream (splitmix64 finalizer over a keyed counter).
// Output i depends only on (key, i), so replications are reproducible
// independently of execution order; normals are produced by inversion.
class CounterStream {
public:
    explicit CounterStream(std::uint64_t key) : key_(key) {}

    // Stream for replication `rep` of an experiment with the given master seed.
    static CounterStream for_replication(std::uint64_t master_seed, std::uint64_t rep);

    std::uint64_t key() const { return key_; }

    std::uint64_t next_u64();
    double next_uniform(); // (0,1)
    double next_normal();
    void fill_normals(std::span<double> out);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

} // namespace fracvar
