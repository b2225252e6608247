#pragma once

// Exact arithmetic over Z_N for composite N: residues, share vectors,
// share-generating matrices, and the unit-pivot linear solve used for
// reconstruction coefficients.

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aprabe/crypto.hpp"
#include "aprabe/error.hpp"
#include "aprabe/rng.hpp"

namespace aprabe {

using Int = mpz_class;

// ---------------------------------------------------------------------------
// Integer encoding helpers

inline std::size_t byte_length(const Int& n) { return n == 0 ? 0 : (mpz_sizeinbase(n.get_mpz_t(), 2) + 7) / 8; }

inline std::size_t bit_length(const Int& n) { return n == 0 ? 0 : mpz_sizeinbase(n.get_mpz_t(), 2); }

// Big-endian, exactly `width` bytes; throws if the value does not fit.
inline Bytes int_to_bytes(const Int& v, std::size_t width) {
    if (v < 0) throw Error("int_to_bytes: negative value");
    const std::size_t need = byte_length(v);
    if (need > width) throw Error("int_to_bytes: value wider than field");
    Bytes out(width, 0);
    if (need > 0) {
        std::size_t count = 0;
        mpz_export(out.data() + (width - need), &count, 1, 1, 1, 0, v.get_mpz_t());
    }
    return out;
}

inline Bytes int_to_bytes(const Int& v) { return int_to_bytes(v, byte_length(v)); }

inline Int int_from_bytes(std::span<const std::uint8_t> data) {
    Int v;
    if (!data.empty()) mpz_import(v.get_mpz_t(), data.size(), 1, 1, 1, 0, data.data());
    return v;
}

inline Int gcd(const Int& a, const Int& b) {
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

inline Int powm(const Int& base, const Int& exp, const Int& mod) {
    Int r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
    return r;
}

// Non-negative residue of v modulo m.
inline Int mod(const Int& v, const Int& m) {
    Int r;
    mpz_mod(r.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t());
    return r;
}

inline std::optional<Int> mod_inverse(const Int& v, const Int& m) {
    Int r;
    if (mpz_invert(r.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t()) == 0) return std::nullopt;
    return r;
}

// Uniform in [0, bound) by rejection on the bit length of bound.
inline Int random_below(Rng& rng, const Int& bound) {
    if (bound <= 0) throw Error("random_below: bound must be positive");
    const std::size_t bits = bit_length(bound);
    const std::size_t nbytes = (bits + 7) / 8;
    const unsigned excess = static_cast<unsigned>(nbytes * 8 - bits);
    Bytes buf(nbytes);
    for (;;) {
        rng.fill(buf);
        buf[0] &= static_cast<std::uint8_t>(0xff >> excess);
        Int v = int_from_bytes(buf);
        if (v < bound) return v;
    }
}

// ---------------------------------------------------------------------------
// Primality

inline constexpr int kMillerRabinRounds = 64;

// Miller-Rabin with witnesses drawn from a fixed-seed generator, so a given
// candidate always gets the same verdict.
inline bool is_probable_prime(const Int& n, int rounds = kMillerRabinRounds) {
    if (n < 2) return false;
    static constexpr unsigned kSmall[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
                                          53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113};
    for (unsigned p : kSmall) {
        if (n == p) return true;
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
    }
    Int d = n - 1;
    unsigned s = 0;
    while (mpz_even_p(d.get_mpz_t())) {
        d >>= 1;
        ++s;
    }
    Rng witnesses = Rng::from_seed(0x4d696c6c65725261ULL);
    const Int span = n - 3;
    for (int round = 0; round < rounds; ++round) {
        const Int a = random_below(witnesses, span) + 2;
        Int x = powm(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (unsigned r = 1; r < s; ++r) {
            x = x * x % n;
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

// Uniform-ish prime with exactly `bits` bits (top bit set).
inline Int random_prime(std::size_t bits, Rng& rng, std::size_t max_attempts = 1'000'000) {
    if (bits < 2) throw ParamGenError("random_prime: need at least 2 bits");
    const Int top = Int(1) << static_cast<mp_bitcnt_t>(bits - 1);
    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
        Int candidate = random_below(rng, top) | top;
        candidate |= 1;
        if (is_probable_prime(candidate)) return candidate;
    }
    throw ParamGenError("random_prime: attempt budget exhausted");
}

// ---------------------------------------------------------------------------
// The ring Z_N

class Ring {
public:
    explicit Ring(Int modulus) : n_(std::move(modulus)) {
        if (n_ < 2) throw ValidationError("ring modulus must be at least 2");
    }
    const Int& modulus() const noexcept { return n_; }
    // Width of the canonical fixed-width encoding of a residue.
    std::size_t byte_width() const noexcept { return byte_length(n_); }

private:
    Int n_;
};

using RingPtr = std::shared_ptr<const Ring>;

inline RingPtr make_ring(Int modulus) { return std::make_shared<const Ring>(std::move(modulus)); }

inline bool same_ring(const RingPtr& a, const RingPtr& b) {
    return a == b || (a && b && a->modulus() == b->modulus());
}

// A residue in [0, N). Every operation reduces eagerly.
class Scalar {
public:
    Scalar() = default;
    Scalar(RingPtr ring, const Int& value) : ring_(std::move(ring)), v_(mod(value, ring_->modulus())) {}
    Scalar(RingPtr ring, long value) : Scalar(std::move(ring), Int(value)) {}

    static Scalar zero(RingPtr ring) { return {std::move(ring), 0L}; }
    static Scalar one(RingPtr ring) { return {std::move(ring), 1L}; }

    const Int& value() const noexcept { return v_; }
    const RingPtr& ring() const noexcept { return ring_; }
    const Int& modulus() const { return ring_->modulus(); }

    bool is_zero() const { return v_ == 0; }
    bool is_unit() const { return gcd(v_, modulus()) == 1; }

    std::optional<Scalar> try_inverse() const {
        auto inv = mod_inverse(v_, modulus());
        if (!inv) return std::nullopt;
        return Scalar(ring_, *inv);
    }
    Scalar inverse() const {
        auto inv = try_inverse();
        if (!inv) throw ValidationError("scalar is not a unit of Z_N");
        return *inv;
    }

    Scalar operator-() const { return {ring_, -v_}; }
    friend Scalar operator+(const Scalar& a, const Scalar& b) { return {check(a, b), a.v_ + b.v_}; }
    friend Scalar operator-(const Scalar& a, const Scalar& b) { return {check(a, b), a.v_ - b.v_}; }
    friend Scalar operator*(const Scalar& a, const Scalar& b) { return {check(a, b), a.v_ * b.v_}; }
    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

    friend bool operator==(const Scalar& a, const Scalar& b) {
        return a.v_ == b.v_ && same_ring(a.ring_, b.ring_);
    }

    // Canonical encoding: big-endian, width = byte length of N.
    Bytes to_bytes() const { return int_to_bytes(v_, ring_->byte_width()); }

    std::string to_string() const { return v_.get_str(); }

private:
    static const RingPtr& check(const Scalar& a, const Scalar& b) {
        if (!same_ring(a.ring_, b.ring_)) throw ParamsMismatch("scalars from different rings");
        return a.ring_;
    }

    RingPtr ring_;
    Int v_;
};

inline Scalar random_scalar(Rng& rng, const RingPtr& ring) { return {ring, random_below(rng, ring->modulus())}; }

// Rejection-samples until gcd(v, N) = 1.
inline Scalar random_unit(Rng& rng, const RingPtr& ring) {
    for (;;) {
        Scalar v = random_scalar(rng, ring);
        if (v.is_unit()) return v;
    }
}

// ---------------------------------------------------------------------------
// N = p1 p2 p3 with its factorization

class FactoredModulus {
public:
    FactoredModulus(Int p1, Int p2, Int p3) : primes_{std::move(p1), std::move(p2), std::move(p3)} {
        for (const auto& p : primes_)
            if (!is_probable_prime(p)) throw ValidationError("modulus factor " + p.get_str() + " is not prime");
        if (primes_[0] == primes_[1] || primes_[0] == primes_[2] || primes_[1] == primes_[2])
            throw ValidationError("modulus factors must be distinct");
        ring_ = make_ring(primes_[0] * primes_[1] * primes_[2]);
    }

    const Int& n() const noexcept { return ring_->modulus(); }
    // i in {1, 2, 3}
    const Int& prime(int i) const {
        if (i < 1 || i > 3) throw ValidationError("subgroup index must be 1, 2 or 3");
        return primes_[static_cast<std::size_t>(i - 1)];
    }
    const RingPtr& ring() const noexcept { return ring_; }

    friend bool operator==(const FactoredModulus& a, const FactoredModulus& b) { return a.primes_ == b.primes_; }

private:
    std::array<Int, 3> primes_;
    RingPtr ring_;
};

// ---------------------------------------------------------------------------
// Vectors and matrices

// Secret-bearing column vector (secret first, then the blinding coordinates).
using ShareVector = std::vector<Scalar>;

class MatrixZN {
public:
    MatrixZN(RingPtr ring, std::size_t rows, std::size_t cols) : ring_(std::move(ring)), rows_(rows), cols_(cols) {
        if (rows == 0 || cols == 0) throw ValidationError("matrix dimensions must be positive");
        entries_.assign(rows * cols, Scalar::zero(ring_));
    }

    // Rows given as signed small integers (formula-compiled matrices).
    static MatrixZN from_rows(const RingPtr& ring, const std::vector<std::vector<long>>& rows) {
        if (rows.empty() || rows.front().empty()) throw ValidationError("matrix dimensions must be positive");
        MatrixZN m(ring, rows.size(), rows.front().size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.cols_) throw ValidationError("ragged matrix rows");
            for (std::size_t j = 0; j < m.cols_; ++j) m.at(i, j) = Scalar(ring, rows[i][j]);
        }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    const RingPtr& ring() const noexcept { return ring_; }

    Scalar& at(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const Scalar& at(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

    std::vector<Scalar> row(std::size_t i) const {
        return {entries_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                entries_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
    }

    friend bool operator==(const MatrixZN& a, const MatrixZN& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
    }

private:
    RingPtr ring_;
    std::size_t rows_;
    std::size_t cols_;
    std::vector<Scalar> entries_;
};

inline Scalar dot(std::span<const Scalar> a, std::span<const Scalar> b) {
    if (a.size() != b.size() || a.empty()) throw ValidationError("dot: dimension mismatch");
    Scalar acc = Scalar::zero(a.front().ring());
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

// Share i is A_i . v.
inline std::vector<Scalar> mat_vec_mul(const MatrixZN& a, const ShareVector& v) {
    if (a.cols() != v.size()) throw ValidationError("mat_vec_mul: matrix has " + std::to_string(a.cols()) +
                                                    " columns but vector has length " + std::to_string(v.size()));
    std::vector<Scalar> out;
    out.reserve(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) out.push_back(dot(a.row(i), v));
    return out;
}

// Elimination met a nonzero non-unit: its gcd with N is a proper factor.
class NonUnitPivot : public Error {
public:
    explicit NonUnitPivot(Int divisor)
        : Error("non-unit pivot during elimination (gcd with N = " + divisor.get_str() + ")"),
          divisor_(std::move(divisor)) {}
    const Int& divisor() const noexcept { return divisor_; }

private:
    Int divisor_;
};

// Finds omega with sum_i omega_i * rows[i] == target (mod N), or nullopt when
// the target is outside the row span. Gauss-Jordan on the transposed system;
// every pivot must be a unit, otherwise NonUnitPivot is thrown.
inline std::optional<std::vector<Scalar>> solve_target(const std::vector<std::vector<Scalar>>& rows,
                                                       const std::vector<Scalar>& target) {
    if (target.empty()) throw ValidationError("solve_target: empty target");
    const RingPtr ring = target.front().ring();
    const Int& n = ring->modulus();
    const std::size_t dim = target.size();
    const std::size_t unknowns = rows.size();
    for (const auto& r : rows)
        if (r.size() != dim) throw ValidationError("solve_target: row length differs from target length");
    if (unknowns == 0) {
        if (std::all_of(target.begin(), target.end(), [](const Scalar& s) { return s.is_zero(); }))
            return std::vector<Scalar>{};
        return std::nullopt;
    }

    // Equation e: sum_i omega_i * rows[i][e] = target[e]; augmented last column.
    std::vector<std::vector<Int>> m(dim, std::vector<Int>(unknowns + 1));
    for (std::size_t e = 0; e < dim; ++e) {
        for (std::size_t i = 0; i < unknowns; ++i) m[e][i] = rows[i][e].value();
        m[e][unknowns] = target[e].value();
    }

    std::vector<std::optional<std::size_t>> pivot_row_of(unknowns);
    std::size_t next = 0;
    for (std::size_t col = 0; col < unknowns && next < dim; ++col) {
        std::optional<std::size_t> pick;
        std::optional<Int> non_unit;
        for (std::size_t r = next; r < dim; ++r) {
            if (m[r][col] == 0) continue;
            Int g = gcd(m[r][col], n);
            if (g == 1) {
                pick = r;
                break;
            }
            if (!non_unit) non_unit = g;
        }
        if (!pick) {
            if (non_unit) throw NonUnitPivot(*non_unit);
            continue;
        }
        std::swap(m[*pick], m[next]);
        const Int inv = *mod_inverse(m[next][col], n);
        for (auto& x : m[next]) x = mod(x * inv, n);
        for (std::size_t r = 0; r < dim; ++r) {
            if (r == next || m[r][col] == 0) continue;
            const Int factor = m[r][col];
            for (std::size_t c = col; c <= unknowns; ++c) m[r][c] = mod(m[r][c] - factor * m[next][c], n);
        }
        pivot_row_of[col] = next++;
    }
    for (std::size_t r = next; r < dim; ++r)
        if (m[r][unknowns] != 0) return std::nullopt;

    std::vector<Scalar> omega;
    omega.reserve(unknowns);
    for (std::size_t i = 0; i < unknowns; ++i)
        omega.emplace_back(ring, pivot_row_of[i] ? m[*pivot_row_of[i]][unknowns] : Int(0));

    // Substitution check.
    for (std::size_t e = 0; e < dim; ++e) {
        Scalar acc = Scalar::zero(ring);
        for (std::size_t i = 0; i < unknowns; ++i) acc += omega[i] * rows[i][e];
        if (!(acc == target[e])) throw Error("solve_target: substitution check failed");
    }
    return omega;
}

// (1, 0, ..., 0) of length n.
inline std::vector<Scalar> unit_target(const RingPtr& ring, std::size_t n) {
    std::vector<Scalar> t(n, Scalar::zero(ring));
    t.front() = Scalar::one(ring);
    return t;
}

}  // namespace aprabe
