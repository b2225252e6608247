#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "aprabe/algebra.hpp"
#include "aprabe/wire.hpp"

namespace aprabe {

enum class Backend : std::uint8_t { Debug = 1, Curve = 2 };

inline std::string backend_name(Backend b) { return b == Backend::Debug ? "debug" : "curve"; }

inline Backend backend_from_name(const std::string& name) {
    if (name == "debug") return Backend::Debug;
    if (name == "curve") return Backend::Curve;
    throw ValidationError("unknown backend '" + name + "' (expected debug or curve)");
}

inline Backend backend_from_id(std::uint8_t id) {
    if (id == static_cast<std::uint8_t>(Backend::Debug)) return Backend::Debug;
    if (id == static_cast<std::uint8_t>(Backend::Curve)) return Backend::Curve;
    throw FormatError("unknown backend id " + std::to_string(id));
}

inline constexpr std::size_t kDefaultDebugPrimeBits = 32;
inline constexpr std::size_t kDefaultCurvePrimeBits = 80;

// Output of the group generator: N = p1 p2 p3, plus for the curve backend the
// field prime q = c*N - 1 of the supersingular curve y^2 = x^3 + x.
struct BilinearParams {
    Backend backend;
    FactoredModulus modulus;
    Int q;         // Curve only, 0 otherwise
    Int cofactor;  // Curve only, 0 otherwise

    static BilinearParams debug(FactoredModulus m) { return {Backend::Debug, std::move(m), 0, 0}; }

    static BilinearParams curve(FactoredModulus m, Int cofactor) {
        Int q = cofactor * m.n() - 1;
        BilinearParams p{Backend::Curve, std::move(m), std::move(q), std::move(cofactor)};
        p.validate();
        return p;
    }

    const Int& n() const noexcept { return modulus.n(); }
    const RingPtr& ring() const noexcept { return modulus.ring(); }

    void validate() const {
        if (backend == Backend::Debug) {
            if (q != 0 || cofactor != 0) throw ValidationError("debug params carry no curve fields");
            return;
        }
        if (!is_probable_prime(q)) throw ValidationError("curve field size q is not prime");
        if (mod(q, 4) != 3) throw ValidationError("curve field size q must be 3 mod 4");
        if (mod(q + 1, n()) != 0 || cofactor * n() != q + 1)
            throw ValidationError("curve order q+1 must equal cofactor * N");
        if (gcd(cofactor, n()) != 1) throw ValidationError("cofactor must be coprime to N");
    }

    void encode(ByteWriter& w) const {
        w.u8(static_cast<std::uint8_t>(backend));
        for (int i = 1; i <= 3; ++i) w.integer(modulus.prime(i));
        if (backend == Backend::Curve) w.integer(cofactor);
    }

    static BilinearParams decode(ByteReader& r) {
        const Backend b = backend_from_id(r.u8());
        Int p1 = r.integer(), p2 = r.integer(), p3 = r.integer();
        FactoredModulus m(std::move(p1), std::move(p2), std::move(p3));
        if (b == Backend::Debug) return debug(std::move(m));
        return curve(std::move(m), r.integer());
    }

    Digest digest() const {
        ByteWriter w;
        encode(w);
        return Sha256().update("aprabe/params").update(w.bytes()).finish();
    }

    // Short identifier stamped on every element so mixing groups is caught.
    std::uint64_t tag() const {
        const Digest d = digest();
        std::uint64_t t = 0;
        for (int i = 0; i < 8; ++i) t = (t << 8) | d[static_cast<std::size_t>(i)];
        return t;
    }

    friend bool operator==(const BilinearParams& a, const BilinearParams& b) {
        return a.backend == b.backend && a.modulus == b.modulus && a.q == b.q && a.cofactor == b.cofactor;
    }
};

struct CounterSnapshot {
    std::uint64_t exponentiations = 0;     // G exponentiations
    std::uint64_t pairings = 0;
    std::uint64_t gt_exponentiations = 0;  // GT exponentiations

    friend bool operator==(const CounterSnapshot&, const CounterSnapshot&) = default;
};

// Shared by all copies of one group handle.
class OpCounters {
public:
    void count_exp() noexcept { exps_.fetch_add(1, std::memory_order_relaxed); }
    void count_pair() noexcept { pairs_.fetch_add(1, std::memory_order_relaxed); }
    void count_gt_exp() noexcept { gt_exps_.fetch_add(1, std::memory_order_relaxed); }

    CounterSnapshot snapshot() const noexcept {
        return {exps_.load(std::memory_order_relaxed), pairs_.load(std::memory_order_relaxed),
                gt_exps_.load(std::memory_order_relaxed)};
    }
    void reset() noexcept {
        exps_.store(0, std::memory_order_relaxed);
        pairs_.store(0, std::memory_order_relaxed);
        gt_exps_.store(0, std::memory_order_relaxed);
    }

private:
    std::atomic<std::uint64_t> exps_{0};
    std::atomic<std::uint64_t> pairs_{0};
    std::atomic<std::uint64_t> gt_exps_{0};
};

inline constexpr std::size_t kPrimeAttemptBudget = 200'000;
inline constexpr std::size_t kCofactorAttemptBudget = 1'000'000;

// Three distinct primes of exactly prime_bits bits; the curve backend then
// walks cofactors c = 4, 8, 12, ... until q = c*N - 1 is prime (which forces
// q = 3 mod 4).
inline BilinearParams gen_params(std::size_t prime_bits, Backend backend, Rng& rng) {
    if (prime_bits < 16) throw ValidationError("prime_bits must be at least 16");
    Int p1 = random_prime(prime_bits, rng, kPrimeAttemptBudget);
    Int p2, p3;
    do p2 = random_prime(prime_bits, rng, kPrimeAttemptBudget);
    while (p2 == p1);
    do p3 = random_prime(prime_bits, rng, kPrimeAttemptBudget);
    while (p3 == p1 || p3 == p2);
    FactoredModulus m(std::move(p1), std::move(p2), std::move(p3));
    if (backend == Backend::Debug) return BilinearParams::debug(std::move(m));

    for (std::size_t i = 1; i <= kCofactorAttemptBudget; ++i) {
        const Int c = Int(4) * static_cast<unsigned long>(i);
        if (gcd(c, m.n()) != 1) continue;
        const Int q = c * m.n() - 1;
        if (is_probable_prime(q, 1) && is_probable_prime(q)) return BilinearParams::curve(std::move(m), c);
    }
    throw ParamGenError("no prime q = c*N - 1 found within the cofactor budget");
}

}  // namespace aprabe
