#pragma once

// Composite-order pairing group on the supersingular curve E: y^2 = x^3 + x
// over F_q with q = 3 mod 4 and #E(F_q) = q + 1 = c * N. G is the order-N
// subgroup, GT the order-N subgroup of F_{q^2}^*, and the symmetric pairing is
// the reduced Tate pairing e(P, phi(Q)) with distortion map
// phi(x, y) = (-x, i*y), i^2 = -1.

#include <memory>
#include <span>

#include "aprabe/bilinear/params.hpp"

namespace aprabe {

namespace curve_detail {

struct Fq2 {
    Int re;
    Int im;
    friend bool operator==(const Fq2&, const Fq2&) = default;
};

struct Point {
    Int x;
    Int y;
    bool infinity = true;  // coordinates are zero when set
    friend bool operator==(const Point&, const Point&) = default;
};

// Arithmetic in F_q, F_q[i]/(i^2 + 1) and on E(F_q), all in affine form.
class Arith {
public:
    explicit Arith(Int q) : q_(std::move(q)) {}

    const Int& q() const noexcept { return q_; }

    Int reduce(const Int& v) const { return mod(v, q_); }
    Int inv(const Int& v) const {
        auto r = mod_inverse(v, q_);
        if (!r) throw Error("curve: inversion of zero in F_q");
        return *r;
    }

    bool on_curve(const Int& x, const Int& y) const { return reduce(y * y - x * x * x - x) == 0; }

    // Square root in F_q (q = 3 mod 4); nullopt for non-residues.
    std::optional<Int> sqrt(const Int& v) const {
        const Int r = powm(v, (q_ + 1) / 4, q_);
        if (reduce(r * r - v) != 0) return std::nullopt;
        return r;
    }

    Point dbl(const Point& p) const {
        if (p.infinity || p.y == 0) return {};
        const Int lambda = reduce((3 * p.x * p.x + 1) * inv(2 * p.y));
        const Int x3 = reduce(lambda * lambda - 2 * p.x);
        return {x3, reduce(lambda * (p.x - x3) - p.y), false};
    }

    Point add(const Point& a, const Point& b) const {
        if (a.infinity) return b;
        if (b.infinity) return a;
        if (a.x == b.x) return reduce(a.y + b.y) == 0 ? Point{} : dbl(a);
        const Int lambda = reduce((b.y - a.y) * inv(b.x - a.x));
        const Int x3 = reduce(lambda * lambda - a.x - b.x);
        return {x3, reduce(lambda * (a.x - x3) - a.y), false};
    }

    Point neg(const Point& p) const { return p.infinity ? p : Point{p.x, reduce(-p.y), false}; }

    Point mul(const Point& p, const Int& k) const {
        if (k < 0) return mul(neg(p), -k);
        Point acc;
        for (auto bit = static_cast<long>(bit_length(k)) - 1; bit >= 0; --bit) {
            acc = dbl(acc);
            if (mpz_tstbit(k.get_mpz_t(), static_cast<mp_bitcnt_t>(bit))) acc = add(acc, p);
        }
        return acc;
    }

    Fq2 f2_mul(const Fq2& a, const Fq2& b) const {
        const Int ac = a.re * b.re;
        const Int bd = a.im * b.im;
        const Int cross = (a.re + a.im) * (b.re + b.im);
        return {reduce(ac - bd), reduce(cross - ac - bd)};
    }
    Fq2 f2_sqr(const Fq2& a) const { return {reduce((a.re + a.im) * (a.re - a.im)), reduce(2 * a.re * a.im)}; }
    Fq2 f2_conj(const Fq2& a) const { return {a.re, reduce(-a.im)}; }
    Fq2 f2_inv(const Fq2& a) const {
        const Int norm_inv = inv(a.re * a.re + a.im * a.im);
        return {reduce(a.re * norm_inv), reduce(-a.im * norm_inv)};
    }
    Fq2 f2_pow(const Fq2& a, const Int& k) const {
        Fq2 acc{1, 0};
        for (auto bit = static_cast<long>(bit_length(k)) - 1; bit >= 0; --bit) {
            acc = f2_sqr(acc);
            if (mpz_tstbit(k.get_mpz_t(), static_cast<mp_bitcnt_t>(bit))) acc = f2_mul(acc, a);
        }
        return acc;
    }

    // Line through T with slope lambda, evaluated at phi(Q) = (-xq, i*yq):
    // (i*yq - yT) - lambda*(-xq - xT).
    Fq2 line_at(const Point& t, const Int& lambda, const Int& xq, const Int& yq) const {
        return {reduce(lambda * (xq + t.x) - t.y), yq};
    }

    // Miller loop for f_{n,P} at phi(Q) in plain double-and-add form. Vertical
    // lines evaluate into F_q and are dropped: the final exponentiation maps
    // all of F_q^* to 1.
    Fq2 miller(const Point& p, const Point& q, const Int& n) const {
        Fq2 f{1, 0};
        Point t = p;
        const Int& xq = q.x;
        const Int& yq = q.y;
        for (auto bit = static_cast<long>(bit_length(n)) - 2; bit >= 0; --bit) {
            f = f2_sqr(f);
            if (!t.infinity) {
                if (t.y == 0) {
                    t = {};
                } else {
                    const Int lambda = reduce((3 * t.x * t.x + 1) * inv(2 * t.y));
                    f = f2_mul(f, line_at(t, lambda, xq, yq));
                    t = dbl(t);
                }
            }
            if (mpz_tstbit(n.get_mpz_t(), static_cast<mp_bitcnt_t>(bit))) {
                if (t.infinity) {
                    t = p;
                } else if (t.x == p.x) {
                    if (reduce(t.y + p.y) == 0) {
                        t = {};
                    } else {
                        const Int lambda = reduce((3 * t.x * t.x + 1) * inv(2 * t.y));
                        f = f2_mul(f, line_at(t, lambda, xq, yq));
                        t = dbl(t);
                    }
                } else {
                    const Int lambda = reduce((p.y - t.y) * inv(p.x - t.x));
                    f = f2_mul(f, line_at(t, lambda, xq, yq));
                    t = add(t, p);
                }
            }
        }
        return f;
    }

    // f^((q^2 - 1)/N) = (f^(q-1))^c, with f^q = conj(f).
    Fq2 final_exp(const Fq2& f, const Int& cofactor) const {
        return f2_pow(f2_mul(f2_conj(f), f2_inv(f)), cofactor);
    }

private:
    Int q_;
};

}  // namespace curve_detail

class CurveGroup {
public:
    static constexpr Backend kBackend = Backend::Curve;

    struct Element {
        curve_detail::Point point;
        std::uint64_t tag = 0;
        friend bool operator==(const Element&, const Element&) = default;
    };

    struct GtElement {
        curve_detail::Fq2 value;
        std::uint64_t tag = 0;
        friend bool operator==(const GtElement&, const GtElement&) = default;
    };

    explicit CurveGroup(BilinearParams params)
        : params_(std::make_shared<const BilinearParams>(std::move(params))),
          tag_(params_->tag()),
          arith_(std::make_shared<const curve_detail::Arith>(params_->q)),
          counters_(std::make_shared<OpCounters>()) {
        if (params_->backend != Backend::Curve) throw ParamsMismatch("CurveGroup needs curve params");
        params_->validate();
        generator_ = std::make_shared<const Element>(Element{derive_generator(), tag_});
        gt_generator_ = std::make_shared<const GtElement>(GtElement{raw_pair(generator_->point, generator_->point), tag_});
    }

    const BilinearParams& params() const noexcept { return *params_; }
    const RingPtr& ring() const noexcept { return params_->ring(); }
    const Int& order() const noexcept { return params_->n(); }
    const Int& field_prime() const noexcept { return params_->q; }

    Element identity() const { return {{}, tag_}; }
    // Canonical full-order generator, derived deterministically from q.
    Element generator() const { return *generator_; }

    // Random curve point times c * (N / p_i); resampled on the identity.
    Element random_subgroup(int i, Rng& rng) const {
        const Int& p = params_->modulus.prime(i);
        const Int k = params_->cofactor * (order() / p);
        for (;;) {
            auto pt = arith_->mul(random_point(rng), k);
            if (!pt.infinity) return {std::move(pt), tag_};
        }
    }

    Element exp(const Element& a, const Scalar& k) const {
        check(a.tag);
        check_ring(k);
        counters_->count_exp();
        return {arith_->mul(a.point, k.value()), tag_};
    }
    Element mul(const Element& a, const Element& b) const {
        check(a.tag);
        check(b.tag);
        return {arith_->add(a.point, b.point), tag_};
    }
    Element inv(const Element& a) const {
        check(a.tag);
        return {arith_->neg(a.point), tag_};
    }
    bool eq(const Element& a, const Element& b) const {
        check(a.tag);
        check(b.tag);
        return a.point == b.point;
    }

    GtElement pair(const Element& a, const Element& b) const {
        check(a.tag);
        check(b.tag);
        counters_->count_pair();
        return {raw_pair(a.point, b.point), tag_};
    }

    GtElement gt_identity() const { return {{1, 0}, tag_}; }
    GtElement gt_generator() const { return *gt_generator_; }
    GtElement gt_exp(const GtElement& a, const Scalar& k) const {
        check(a.tag);
        check_ring(k);
        counters_->count_gt_exp();
        return {arith_->f2_pow(a.value, k.value()), tag_};
    }
    GtElement gt_mul(const GtElement& a, const GtElement& b) const {
        check(a.tag);
        check(b.tag);
        return {arith_->f2_mul(a.value, b.value), tag_};
    }
    GtElement gt_inv(const GtElement& a) const {
        check(a.tag);
        return {arith_->f2_inv(a.value), tag_};
    }
    bool gt_eq(const GtElement& a, const GtElement& b) const {
        check(a.tag);
        check(b.tag);
        return a.value == b.value;
    }
    GtElement random_gt(Rng& rng) const {
        return {arith_->f2_pow(gt_generator_->value, random_below(rng, order())), tag_};
    }

    std::size_t coord_size() const { return byte_length(field_prime()); }
    // flag byte (0x00 infinity, 0x04 affine) || x || y
    std::size_t element_size() const { return 1 + 2 * coord_size(); }
    std::size_t gt_size() const { return 2 * coord_size(); }

    Bytes serialize(const Element& a) const {
        check(a.tag);
        Bytes out;
        out.reserve(element_size());
        out.push_back(a.point.infinity ? 0x00 : 0x04);
        const auto x = int_to_bytes(a.point.x, coord_size());
        const auto y = int_to_bytes(a.point.y, coord_size());
        out.insert(out.end(), x.begin(), x.end());
        out.insert(out.end(), y.begin(), y.end());
        return out;
    }
    Bytes serialize(const GtElement& a) const {
        check(a.tag);
        Bytes out = int_to_bytes(a.value.re, coord_size());
        const auto im = int_to_bytes(a.value.im, coord_size());
        out.insert(out.end(), im.begin(), im.end());
        return out;
    }

    Element deserialize(std::span<const std::uint8_t> data) const {
        if (data.size() != element_size()) throw FormatError("curve point: malformed length");
        const std::size_t w = coord_size();
        Int x = int_from_bytes(data.subspan(1, w));
        Int y = int_from_bytes(data.subspan(1 + w, w));
        if (data[0] == 0x00) {
            if (x != 0 || y != 0) throw FormatError("curve point: non-canonical infinity");
            return identity();
        }
        if (data[0] != 0x04) throw FormatError("curve point: unknown flag byte");
        if (x >= field_prime() || y >= field_prime()) throw FormatError("curve point: coordinate out of range");
        if (!arith_->on_curve(x, y)) throw FormatError("curve point: not on curve");
        curve_detail::Point p{std::move(x), std::move(y), false};
        if (!arith_->mul(p, order()).infinity) throw FormatError("curve point: not in the order-N subgroup");
        return {std::move(p), tag_};
    }

    GtElement deserialize_gt(std::span<const std::uint8_t> data) const {
        if (data.size() != gt_size()) throw FormatError("GT element: malformed length");
        const std::size_t w = coord_size();
        curve_detail::Fq2 v{int_from_bytes(data.subspan(0, w)), int_from_bytes(data.subspan(w, w))};
        if (v.re >= field_prime() || v.im >= field_prime()) throw FormatError("GT element: coordinate out of range");
        if (v.re == 0 && v.im == 0) throw FormatError("GT element: zero");
        if (!(arith_->f2_pow(v, order()) == curve_detail::Fq2{1, 0}))
            throw FormatError("GT element: order does not divide N");
        return {std::move(v), tag_};
    }

    CounterSnapshot counters() const noexcept { return counters_->snapshot(); }
    void reset_counters() const noexcept { counters_->reset(); }

private:
    void check(std::uint64_t tag) const {
        if (tag != tag_) throw ParamsMismatch("element belongs to a different group");
    }
    void check_ring(const Scalar& k) const {
        if (!same_ring(k.ring(), ring())) throw ParamsMismatch("exponent is not a residue mod N");
    }

    curve_detail::Fq2 raw_pair(const curve_detail::Point& a, const curve_detail::Point& b) const {
        if (a.infinity || b.infinity) return {1, 0};
        return arith_->final_exp(arith_->miller(a, b, order()), params_->cofactor);
    }

    std::optional<curve_detail::Point> lift_x(const Int& x) const {
        const Int rhs = arith_->reduce(x * x * x + x);
        if (rhs == 0) return std::nullopt;
        auto y = arith_->sqrt(rhs);
        if (!y) return std::nullopt;
        return curve_detail::Point{x, *y, false};
    }

    curve_detail::Point random_point(Rng& rng) const {
        for (;;) {
            auto p = lift_x(random_below(rng, field_prime()));
            if (!p) continue;
            if (rng.uniform(2) == 1) p->y = arith_->reduce(-p->y);
            return *p;
        }
    }

    // Hash-to-x with a counter until c * R has full order N.
    curve_detail::Point derive_generator() const {
        for (std::uint32_t counter = 0;; ++counter) {
            ByteWriter w;
            w.text("aprabe/curve/generator");
            w.u32(counter);
            const Digest d = sha256(w.bytes());
            auto r = lift_x(mod(int_from_bytes(d), field_prime()));
            if (!r) continue;
            auto g = arith_->mul(*r, params_->cofactor);
            if (g.infinity) continue;
            bool full = true;
            for (int i = 1; i <= 3 && full; ++i)
                full = !arith_->mul(g, order() / params_->modulus.prime(i)).infinity;
            if (full) return g;
        }
    }

    std::shared_ptr<const BilinearParams> params_;
    std::uint64_t tag_;
    std::shared_ptr<const curve_detail::Arith> arith_;
    std::shared_ptr<OpCounters> counters_;
    std::shared_ptr<const Element> generator_;
    std::shared_ptr<const GtElement> gt_generator_;
};

}  // namespace aprabe
