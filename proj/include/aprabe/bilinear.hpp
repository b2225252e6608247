#pragma once

#include <concepts>
#include <span>
#include <utility>

#include "aprabe/bilinear/curve_group.hpp"
#include "aprabe/bilinear/debug_group.hpp"
#include "aprabe/bilinear/params.hpp"

namespace aprabe {

// What the scheme needs from a composite-order symmetric pairing group.
template <class G>
concept BilinearGroup = requires(const G& grp, const typename G::Element& a, const typename G::GtElement& t,
                                 const Scalar& k, Rng& rng, std::span<const std::uint8_t> bytes, int i) {
    { G::kBackend } -> std::convertible_to<Backend>;
    { grp.params() } -> std::same_as<const BilinearParams&>;
    { grp.ring() } -> std::same_as<const RingPtr&>;
    { grp.identity() } -> std::same_as<typename G::Element>;
    { grp.generator() } -> std::same_as<typename G::Element>;
    { grp.random_subgroup(i, rng) } -> std::same_as<typename G::Element>;
    { grp.exp(a, k) } -> std::same_as<typename G::Element>;
    { grp.mul(a, a) } -> std::same_as<typename G::Element>;
    { grp.inv(a) } -> std::same_as<typename G::Element>;
    { grp.eq(a, a) } -> std::same_as<bool>;
    { grp.pair(a, a) } -> std::same_as<typename G::GtElement>;
    { grp.gt_identity() } -> std::same_as<typename G::GtElement>;
    { grp.gt_exp(t, k) } -> std::same_as<typename G::GtElement>;
    { grp.gt_mul(t, t) } -> std::same_as<typename G::GtElement>;
    { grp.gt_inv(t) } -> std::same_as<typename G::GtElement>;
    { grp.gt_eq(t, t) } -> std::same_as<bool>;
    { grp.random_gt(rng) } -> std::same_as<typename G::GtElement>;
    { grp.serialize(a) } -> std::same_as<Bytes>;
    { grp.serialize(t) } -> std::same_as<Bytes>;
    { grp.deserialize(bytes) } -> std::same_as<typename G::Element>;
    { grp.deserialize_gt(bytes) } -> std::same_as<typename G::GtElement>;
    { grp.element_size() } -> std::same_as<std::size_t>;
    { grp.gt_size() } -> std::same_as<std::size_t>;
    { grp.counters() } -> std::same_as<CounterSnapshot>;
    grp.reset_counters();
};

static_assert(BilinearGroup<DebugGroup>);
static_assert(BilinearGroup<CurveGroup>);

// Runs fn.template operator()<G>(G{params}) for the backend named in params.
template <class Fn>
decltype(auto) with_group(const BilinearParams& params, Fn&& fn) {
    if (params.backend == Backend::Debug) return std::forward<Fn>(fn)(DebugGroup(params));
    return std::forward<Fn>(fn)(CurveGroup(params));
}

}  // namespace aprabe
