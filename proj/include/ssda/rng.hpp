#pragma once

#include <cstdint>

#include "ssda/normal.hpp"

namespace ssda {

// Counter-based uniform stream (splitmix64 finalizer over key + i*gamma).
// Output i depends only on (key, i), so draws can be indexed randomly and
// replications are reproducible across platforms and thread schedules.
// Normals come from the inverse CDF applied to the uniform stream.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Derives an independent sub-stream key; used for (seed, replication),
    // (seed, fold shuffle), etc.
    static std::uint64_t derive(std::uint64_t key, std::uint64_t stream) {
        return mix(key ^ mix(stream + 0x9E3779B97F4A7C15ull));
    }

    std::uint64_t at(std::uint64_t index) const {
        return mix(key_ + (index + 1) * 0x9E3779B97F4A7C15ull);
    }

    // Uniform on the open interval (0, 1); never returns an endpoint.
    double uniform_at(std::uint64_t index) const {
        return (static_cast<double>(at(index) >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal_at(std::uint64_t index) const { return inv_norm_cdf(uniform_at(index)); }

    // Sequential convenience interface.
    std::uint64_t next_u64() { return at(counter_++); }
    double next_uniform() { return uniform_at(counter_++); }
    double next_normal() { return normal_at(counter_++); }

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace ssda
