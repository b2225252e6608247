#pragma once

// Shared fixtures and independent oracles for the test suites.

#include <functional>
#include <set>

#include "aprabe/aprabe.hpp"

namespace aprabe::testing {

inline const BilinearParams& debug_params() {
    static const BilinearParams p = [] {
        Rng rng = Rng::from_seed(0xDEB6);
        return gen_params(kDefaultDebugPrimeBits, Backend::Debug, rng);
    }();
    return p;
}

inline const BilinearParams& curve_params(std::size_t bits = 32) {
    static std::map<std::size_t, BilinearParams> cache;
    auto it = cache.find(bits);
    if (it == cache.end()) {
        Rng rng = Rng::from_seed(0xC0 + bits);
        it = cache.emplace(bits, gen_params(bits, Backend::Curve, rng)).first;
    }
    return it->second;
}

// L x D universe with names a<level>_<column>; the last column of every level
// below the first is the empty attribute.
inline std::shared_ptr<const AttributeMatrix> grid_matrix(std::size_t levels, std::size_t columns) {
    std::vector<std::vector<std::string>> grid(levels, std::vector<std::string>(columns));
    for (std::size_t i = 0; i < levels; ++i)
        for (std::size_t j = 0; j < columns; ++j)
            grid[i][j] = (i > 0 && j + 1 == columns) ? std::string(kEmptyAttribute)
                                                     : "a" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
    return std::make_shared<const AttributeMatrix>(AttributeMatrix::from_levels(std::move(grid)));
}

inline std::shared_ptr<const AttributeMatrix> ehr_matrix() {
    return std::make_shared<const AttributeMatrix>(
        AttributeMatrix::from_levels({{"HospA", "HospB", "Prof", "Yrs5"}, {"Cardio", "Gastro", "∅", "∅"}}));
}

// Every vector of the given depth over the matrix.
inline std::vector<AttributeVector> all_vectors(const AttributeMatrix& m, std::size_t depth) {
    std::vector<std::vector<std::string>> acc{{}};
    for (std::size_t level = 1; level <= depth; ++level) {
        std::vector<std::vector<std::string>> next;
        for (const auto& prefix : acc)
            for (std::size_t j = 1; j <= m.columns(); ++j) {
                if (level == 1 && is_empty_attribute(m.name(level, j))) continue;
                auto names = prefix;
                names.push_back(m.name(level, j));
                if (std::find(next.begin(), next.end(), names) == next.end()) next.push_back(std::move(names));
            }
        acc = std::move(next);
    }
    std::vector<AttributeVector> out;
    for (const auto& names : acc) out.push_back(make_vector(m, names));
    return out;
}

// Boolean evaluation of a formula: the oracle for span-based satisfaction.
inline bool evaluate(const PolicyFormula& f, const std::vector<AttributeVector>& set) {
    switch (f.kind()) {
        case PolicyFormula::Kind::Leaf:
            return std::find(set.begin(), set.end(), f.vector()) != set.end();
        case PolicyFormula::Kind::And:
            return evaluate(f.left(), set) && evaluate(f.right(), set);
        case PolicyFormula::Kind::Or:
            return evaluate(f.left(), set) || evaluate(f.right(), set);
    }
    return false;
}

// Random binary AND/OR tree over the given leaves, in order.
inline PolicyFormula random_formula(const std::vector<AttributeVector>& leaves, std::size_t lo, std::size_t hi,
                                    Rng& rng) {
    if (hi - lo == 1) return PolicyFormula::leaf(leaves[lo]);
    const std::size_t split = lo + 1 + rng.uniform(hi - lo - 1);
    auto left = random_formula(leaves, lo, split, rng);
    auto right = random_formula(leaves, split, hi, rng);
    return rng.uniform(2) ? PolicyFormula::both(std::move(left), std::move(right))
                          : PolicyFormula::either(std::move(left), std::move(right));
}

// `count` distinct vectors drawn from `pool`.
inline std::vector<AttributeVector> pick(std::vector<AttributeVector> pool, std::size_t count, Rng& rng) {
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(std::min(count, pool.size()));
    return pool;
}

// Every binary tree shape with n leaves and every gate assignment.
inline std::vector<PolicyFormula> all_formulas(const std::vector<AttributeVector>& leaves, std::size_t lo,
                                               std::size_t hi) {
    if (hi - lo == 1) return {PolicyFormula::leaf(leaves[lo])};
    std::vector<PolicyFormula> out;
    for (std::size_t split = lo + 1; split < hi; ++split)
        for (const auto& l : all_formulas(leaves, lo, split))
            for (const auto& r : all_formulas(leaves, split, hi)) {
                out.push_back(PolicyFormula::both(l, r));
                out.push_back(PolicyFormula::either(l, r));
            }
    return out;
}

}  // namespace aprabe::testing

namespace aprabe::testing {

// Replaces every leaf u by the OR of the vectors in children.at(u): the
// formula whose authorized sets a delegated structure should have.
inline PolicyFormula substitute(const PolicyFormula& f,
                                const std::map<AttributeVector, std::vector<AttributeVector>>& children) {
    if (f.kind() == PolicyFormula::Kind::Leaf) {
        const auto& kids = children.at(f.vector());
        PolicyFormula out = PolicyFormula::leaf(kids.front());
        for (std::size_t i = 1; i < kids.size(); ++i) out = PolicyFormula::either(out, PolicyFormula::leaf(kids[i]));
        return out;
    }
    auto l = substitute(f.left(), children), r = substitute(f.right(), children);
    return f.kind() == PolicyFormula::Kind::And ? PolicyFormula::both(l, r) : PolicyFormula::either(l, r);
}

// A random delegation spec for `parent`: every row gets one or two distinct
// suffixes from level depth+1. Also returns the parent-vector -> children map.
inline std::pair<ChildSpec, std::map<AttributeVector, std::vector<AttributeVector>>> random_spec(
    const AccessStructure& parent, const AttributeMatrix& m, Rng& rng) {
    const std::size_t level = parent.depth() + 1;
    std::vector<std::string> names;
    for (std::size_t j = 1; j <= m.columns(); ++j)
        if (std::find(names.begin(), names.end(), m.name(level, j)) == names.end()) names.push_back(m.name(level, j));
    ChildSpec spec;
    std::map<AttributeVector, std::vector<AttributeVector>> kids;
    for (std::size_t i = 0; i < parent.rows(); ++i) {
        std::shuffle(names.begin(), names.end(), rng);
        const std::size_t count = std::min<std::size_t>(names.size(), 1 + rng.uniform(2));
        for (std::size_t c = 0; c < count; ++c) {
            spec.assignments.push_back({i, names[c]});
            auto full = parent.rho(i).names();
            full.push_back(names[c]);
            kids[parent.rho(i)].push_back(make_vector(m, full));
        }
    }
    return {spec, kids};
}

}  // namespace aprabe::testing
