#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <limits>
#include <span>

#include "aprabe/crypto.hpp"

namespace aprabe {

// Explicit randomness handle. A seeded instance is a SHA-256 counter-mode
// generator (reproducible fixtures); an OS instance draws from the system
// CSPRNG. Never shared implicitly: every randomized operation takes one.
class Rng {
public:
    using result_type = std::uint64_t;

    static Rng from_seed(std::uint64_t seed) {
        Rng rng(true);
        std::array<std::uint8_t, 8> be{};
        for (int i = 0; i < 8; ++i) be[i] = static_cast<std::uint8_t>(seed >> (56 - 8 * i));
        rng.key_ = Sha256().update("aprabe/rng/v1").update(be).finish();
        return rng;
    }

    static Rng from_os() { return Rng(false); }

    bool deterministic() const noexcept { return seeded_; }

    void fill(std::span<std::uint8_t> out) {
        if (!seeded_) {
            os_random_bytes(out);
            return;
        }
        std::size_t done = 0;
        while (done < out.size()) {
            if (available_ == 0) refill();
            const std::size_t take = std::min(available_, out.size() - done);
            std::memcpy(out.data() + done, block_.data() + (block_.size() - available_), take);
            available_ -= take;
            done += take;
        }
    }

    std::uint64_t next_u64() {
        std::array<std::uint8_t, 8> buf{};
        fill(buf);
        std::uint64_t v = 0;
        for (auto b : buf) v = (v << 8) | b;
        return v;
    }

    // Uniform in [0, bound); bound > 0.
    std::uint64_t uniform(std::uint64_t bound) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        for (;;) {
            const auto v = next_u64();
            if (v < limit) return v % bound;
        }
    }

    result_type operator()() { return next_u64(); }
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

private:
    explicit Rng(bool seeded) : seeded_(seeded) {}

    void refill() {
        std::array<std::uint8_t, 8> ctr{};
        for (int i = 0; i < 8; ++i) ctr[i] = static_cast<std::uint8_t>(counter_ >> (56 - 8 * i));
        ++counter_;
        block_ = Sha256().update(key_).update(ctr).finish();
        available_ = block_.size();
    }

    bool seeded_;
    Digest key_{};
    Digest block_{};
    std::size_t available_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace aprabe
