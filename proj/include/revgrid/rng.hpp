#pragma once

#include <cmath>
#include <cstdint>

#include "revgrid/types.hpp"

namespace revgrid {

/// Labels for independent random-number stream families. Streams with
/// different tags never collide even for equal (seed, step, index).
enum class StreamTag : std::uint64_t {
    TerminalGrid = 1,
    StepNoise = 2,
    Regen = 3,
    ForwardGrid = 4,
    Evaluation = 5,
    Population = 6,
    Profile = 7,
    Test = 8,
    Replicate = 9,
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}
}  // namespace detail

/// Counter-based stream keyed by (seed, tag, step, index). Deterministic and
/// platform-independent: outputs do not depend on how work is scheduled
/// across threads, only on the key. Normal variates use Box-Muller so that
/// fixed seeds are bit-identical everywhere (std::normal_distribution is
/// implementation-defined).
class RngStream {
public:
    explicit RngStream(std::uint64_t key) : state_(detail::mix64(key ^ 0x6A09E667F3BCC909ULL)) {}

    RngStream(std::uint64_t seed, StreamTag tag, std::uint64_t step, std::uint64_t index)
        : RngStream(derive_key(seed, tag, step, index)) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return detail::mix64(state_);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // Box-Muller; u1 is shifted away from 0 so the log is finite.
        double u1 = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double angle = 2.0 * M_PI * u2;
        spare_ = r * std::sin(angle);
        has_spare_ = true;
        return r * std::cos(angle);
    }

    Vector normal_vector(int d) {
        Vector z(d);
        for (int i = 0; i < d; ++i) z[i] = next_normal();
        return z;
    }

    static std::uint64_t derive_key(std::uint64_t seed, StreamTag tag, std::uint64_t step,
                                    std::uint64_t index) {
        std::uint64_t key = detail::mix64(seed ^ (static_cast<std::uint64_t>(tag) * 0xD1342543DE82EF95ULL));
        key = detail::mix64(key ^ (step * 0xDABA0B6EB09322E3ULL));
        key = detail::mix64(key ^ (index * 0x2545F4914F6CDD1DULL));
        return key;
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace revgrid
