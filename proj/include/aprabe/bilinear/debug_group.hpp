#pragma once

// Exponent-space model of a cyclic group G of order N with pairing
// e(g^a, g^b) = e(g,g)^(ab). Discrete logarithms are the representation, so
// this backend is NOT cryptographic. It exists as an exact oracle: subgroup
// membership and every exponent relation can be asserted directly.

#include <memory>
#include <span>

#include "aprabe/bilinear/params.hpp"

namespace aprabe {

class DebugGroup {
public:
    static constexpr Backend kBackend = Backend::Debug;

    struct Element {
        Int exponent;  // relative to the fixed generator of G
        std::uint64_t tag = 0;
        friend bool operator==(const Element&, const Element&) = default;
    };

    struct GtElement {
        Int exponent;  // relative to e(generator, generator)
        std::uint64_t tag = 0;
        friend bool operator==(const GtElement&, const GtElement&) = default;
    };

    explicit DebugGroup(BilinearParams params)
        : params_(std::make_shared<const BilinearParams>(std::move(params))),
          tag_(params_->tag()),
          counters_(std::make_shared<OpCounters>()) {
        if (params_->backend != Backend::Debug) throw ParamsMismatch("DebugGroup needs debug params");
    }

    const BilinearParams& params() const noexcept { return *params_; }
    const RingPtr& ring() const noexcept { return params_->ring(); }
    const Int& order() const noexcept { return params_->n(); }

    Element identity() const { return {0, tag_}; }
    Element generator() const { return {1, tag_}; }

    // Exponent (N/p_i) * r with r uniform in [1, p_i).
    Element random_subgroup(int i, Rng& rng) const {
        const Int& p = params_->modulus.prime(i);
        const Int r = random_below(rng, p - 1) + 1;
        return {order() / p * r, tag_};
    }

    Element exp(const Element& a, const Scalar& k) const {
        check(a.tag);
        check_ring(k);
        counters_->count_exp();
        return {mod(a.exponent * k.value(), order()), tag_};
    }
    Element mul(const Element& a, const Element& b) const {
        check(a.tag);
        check(b.tag);
        return {mod(a.exponent + b.exponent, order()), tag_};
    }
    Element inv(const Element& a) const {
        check(a.tag);
        return {mod(-a.exponent, order()), tag_};
    }
    bool eq(const Element& a, const Element& b) const {
        check(a.tag);
        check(b.tag);
        return a.exponent == b.exponent;
    }

    GtElement pair(const Element& a, const Element& b) const {
        check(a.tag);
        check(b.tag);
        counters_->count_pair();
        return {mod(a.exponent * b.exponent, order()), tag_};
    }

    GtElement gt_identity() const { return {0, tag_}; }
    GtElement gt_generator() const { return {1, tag_}; }
    GtElement gt_exp(const GtElement& a, const Scalar& k) const {
        check(a.tag);
        check_ring(k);
        counters_->count_gt_exp();
        return {mod(a.exponent * k.value(), order()), tag_};
    }
    GtElement gt_mul(const GtElement& a, const GtElement& b) const {
        check(a.tag);
        check(b.tag);
        return {mod(a.exponent + b.exponent, order()), tag_};
    }
    GtElement gt_inv(const GtElement& a) const {
        check(a.tag);
        return {mod(-a.exponent, order()), tag_};
    }
    bool gt_eq(const GtElement& a, const GtElement& b) const {
        check(a.tag);
        check(b.tag);
        return a.exponent == b.exponent;
    }
    GtElement random_gt(Rng& rng) const { return {random_below(rng, order()), tag_}; }

    std::size_t element_size() const { return ring()->byte_width(); }
    std::size_t gt_size() const { return ring()->byte_width(); }

    Bytes serialize(const Element& a) const {
        check(a.tag);
        return int_to_bytes(a.exponent, element_size());
    }
    Bytes serialize(const GtElement& a) const {
        check(a.tag);
        return int_to_bytes(a.exponent, gt_size());
    }
    Element deserialize(std::span<const std::uint8_t> data) const { return {decode_exponent(data), tag_}; }
    GtElement deserialize_gt(std::span<const std::uint8_t> data) const { return {decode_exponent(data), tag_}; }

    CounterSnapshot counters() const noexcept { return counters_->snapshot(); }
    void reset_counters() const noexcept { counters_->reset(); }

    // Oracle access, only meaningful on this backend.
    const Int& exponent(const Element& a) const { return a.exponent; }
    const Int& exponent(const GtElement& a) const { return a.exponent; }

private:
    void check(std::uint64_t tag) const {
        if (tag != tag_) throw ParamsMismatch("element belongs to a different group");
    }
    void check_ring(const Scalar& k) const {
        if (!same_ring(k.ring(), ring())) throw ParamsMismatch("exponent is not a residue mod N");
    }
    Int decode_exponent(std::span<const std::uint8_t> data) const {
        if (data.size() != element_size()) throw FormatError("debug element: malformed length");
        Int e = int_from_bytes(data);
        if (e >= order()) throw FormatError("debug element: exponent out of range");
        return e;
    }

    std::shared_ptr<const BilinearParams> params_;
    std::uint64_t tag_;
    std::shared_ptr<OpCounters> counters_;
};

}  // namespace aprabe
