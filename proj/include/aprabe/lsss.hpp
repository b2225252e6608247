#pragma once

// Linear secret sharing over attribute vectors: formula compilation into a
// share-generating matrix with an injective row labeling, authorization and
// reconstruction coefficients, and the row-scaling used by key delegation.

#include <map>
#include <set>
#include <variant>

#include "aprabe/algebra.hpp"
#include "aprabe/attrspace.hpp"
#include "aprabe/policy.hpp"
#include "aprabe/wire.hpp"

namespace aprabe {

struct CompiledOrigin {
    std::string policy;  // canonical formula text
    friend bool operator==(const CompiledOrigin&, const CompiledOrigin&) = default;
};

struct DelegatedOrigin {
    Digest parent{};  // fingerprint of the parent structure
    friend bool operator==(const DelegatedOrigin&, const DelegatedOrigin&) = default;
};

using StructureOrigin = std::variant<CompiledOrigin, DelegatedOrigin>;

// The pair (A, rho). Row i of A equals row_scale(i) times a base row with
// entries in {0, 1, -1}; the base row is what elimination runs on, so every
// pivot stays a unit.
class AccessStructure {
public:
    AccessStructure(MatrixZN matrix, std::vector<AttributeVector> rho, std::vector<Scalar> row_scale,
                    StructureOrigin origin)
        : matrix_(std::move(matrix)), rho_(std::move(rho)), scale_(std::move(row_scale)), origin_(std::move(origin)) {
        if (rho_.size() != matrix_.rows() || scale_.size() != matrix_.rows())
            throw ValidationError("access structure: labeling does not cover every row");
        std::set<AttributeVector> seen;
        for (const auto& v : rho_) {
            if (v.depth() != rho_.front().depth()) throw ValidationError("access structure: mixed label depths");
            if (!seen.insert(v).second) throw ValidationError("access structure: row labeling is not injective");
        }
        for (const auto& s : scale_)
            if (!s.is_unit()) throw ValidationError("access structure: row scale is not a unit");
    }

    std::size_t rows() const noexcept { return matrix_.rows(); }
    std::size_t cols() const noexcept { return matrix_.cols(); }
    std::size_t depth() const { return rho_.front().depth(); }
    const MatrixZN& matrix() const noexcept { return matrix_; }
    const RingPtr& ring() const noexcept { return matrix_.ring(); }
    const AttributeVector& rho(std::size_t row) const { return rho_.at(row); }
    const std::vector<AttributeVector>& labels() const noexcept { return rho_; }
    const Scalar& row_scale(std::size_t row) const { return scale_.at(row); }
    const StructureOrigin& origin() const noexcept { return origin_; }
    bool is_delegated() const noexcept { return std::holds_alternative<DelegatedOrigin>(origin_); }

    std::optional<std::size_t> row_of(const AttributeVector& v) const {
        for (std::size_t i = 0; i < rho_.size(); ++i)
            if (rho_[i] == v) return i;
        return std::nullopt;
    }

    // A_i / row_scale(i).
    std::vector<Scalar> base_row(std::size_t row) const {
        auto r = matrix_.row(row);
        const Scalar inv = scale_.at(row).inverse();
        for (auto& x : r) x *= inv;
        return r;
    }

    void encode(ByteWriter& w) const {
        w.u32(static_cast<std::uint32_t>(rows()));
        w.u32(static_cast<std::uint32_t>(cols()));
        for (std::size_t i = 0; i < rows(); ++i)
            for (std::size_t j = 0; j < cols(); ++j) w.integer(matrix_.at(i, j).value());
        for (const auto& s : scale_) w.integer(s.value());
        for (const auto& v : rho_) encode_vector(w, v);
        if (const auto* c = std::get_if<CompiledOrigin>(&origin_)) {
            w.u8(0x01);
            w.text(c->policy);
        } else {
            w.u8(0x02);
            w.raw(std::get<DelegatedOrigin>(origin_).parent);
        }
    }

    static AccessStructure decode(ByteReader& r, const RingPtr& ring) {
        constexpr std::size_t kMaxDim = 1u << 16;
        const std::size_t l = r.count(kMaxDim);
        const std::size_t n = r.count(kMaxDim);
        if (l == 0 || n == 0) throw FormatError("access structure: empty matrix");
        MatrixZN m(ring, l, n);
        for (std::size_t i = 0; i < l; ++i)
            for (std::size_t j = 0; j < n; ++j) m.at(i, j) = reduced(r.integer(), ring);
        std::vector<Scalar> scale;
        for (std::size_t i = 0; i < l; ++i) scale.push_back(reduced(r.integer(), ring));
        std::vector<AttributeVector> rho;
        for (std::size_t i = 0; i < l; ++i) rho.push_back(decode_vector(r));
        StructureOrigin origin;
        switch (r.u8()) {
            case 0x01:
                origin = CompiledOrigin{r.text()};
                break;
            case 0x02: {
                DelegatedOrigin d;
                auto raw = r.raw(d.parent.size());
                std::copy(raw.begin(), raw.end(), d.parent.begin());
                origin = d;
                break;
            }
            default:
                throw FormatError("access structure: unknown origin tag");
        }
        try {
            return AccessStructure(std::move(m), std::move(rho), std::move(scale), std::move(origin));
        } catch (const FormatError&) {
            throw;
        } catch (const ValidationError& e) {
            throw FormatError(e.what());
        }
    }

    Digest fingerprint() const {
        ByteWriter w;
        encode(w);
        return Sha256().update("aprabe/lsss").update(w.bytes()).finish();
    }

    friend bool operator==(const AccessStructure& a, const AccessStructure& b) {
        return a.matrix_ == b.matrix_ && a.rho_ == b.rho_ && a.scale_ == b.scale_ && a.origin_ == b.origin_;
    }

private:
    static Scalar reduced(const Int& v, const RingPtr& ring) {
        if (v >= ring->modulus()) throw FormatError("access structure: entry not reduced mod N");
        return {ring, v};
    }

    MatrixZN matrix_;
    std::vector<AttributeVector> rho_;
    std::vector<Scalar> scale_;
    StructureOrigin origin_;
};

namespace lsss_detail {

using Label = std::vector<long>;

inline void label_tree(const PolicyFormula& f, Label label, std::size_t& counter, std::vector<Label>& out) {
    switch (f.kind()) {
        case PolicyFormula::Kind::Leaf:
            out.push_back(std::move(label));
            return;
        case PolicyFormula::Kind::Or: {
            label_tree(f.left(), label, counter, out);
            label_tree(f.right(), std::move(label), counter, out);
            return;
        }
        case PolicyFormula::Kind::And: {
            label.resize(counter, 0);
            Label left = label;
            left.push_back(1);
            Label right(counter, 0);
            right.push_back(-1);
            ++counter;
            label_tree(f.left(), std::move(left), counter, out);
            label_tree(f.right(), std::move(right), counter, out);
            return;
        }
    }
}

}  // namespace lsss_detail

// Lewko-Waters conversion: the root gets (1) and a counter c = 1; OR hands
// its label to both children; AND pads its label v to length c and gives
// v||1 to the left child and (0,...,0)||-1 to the right, then increments c.
// Leaf labels padded to length c are the rows, in left-to-right order.
inline AccessStructure compile(const PolicyFormula& formula, const RingPtr& ring) {
    formula.validate();
    std::size_t counter = 1;
    std::vector<lsss_detail::Label> labels;
    lsss_detail::label_tree(formula, {1}, counter, labels);
    for (auto& l : labels) l.resize(counter, 0);
    auto leaves = formula.leaves();
    std::vector<Scalar> scale(leaves.size(), Scalar::one(ring));
    return AccessStructure(MatrixZN::from_rows(ring, labels), std::move(leaves), std::move(scale),
                           CompiledOrigin{formula.to_string()});
}

using Reconstruction = std::map<std::size_t, Scalar>;  // row -> omega_i

// Coefficients over the rows labeled by S with sum omega_i A_i = (1,0,...,0),
// or nullopt when S is not authorized.
inline std::optional<Reconstruction> try_reconstruction(const AttributeSet& set, const AccessStructure& structure) {
    if (set.depth() != structure.depth())
        throw DepthMismatch("attribute set has depth " + std::to_string(set.depth()) + ", policy has depth " +
                            std::to_string(structure.depth()));
    std::vector<std::size_t> matched;
    std::vector<std::vector<Scalar>> base;
    for (std::size_t i = 0; i < structure.rows(); ++i) {
        if (!set.contains(structure.rho(i))) continue;
        matched.push_back(i);
        base.push_back(structure.base_row(i));
    }
    auto omega = solve_target(base, unit_target(structure.ring(), structure.cols()));
    if (!omega) return std::nullopt;
    Reconstruction out;
    for (std::size_t j = 0; j < matched.size(); ++j)
        out.emplace(matched[j], (*omega)[j] * structure.row_scale(matched[j]).inverse());
    return out;
}

inline bool satisfies(const AttributeSet& set, const AccessStructure& structure) {
    return try_reconstruction(set, structure).has_value();
}

inline Reconstruction reconstruction(const AttributeSet& set, const AccessStructure& structure) {
    auto r = try_reconstruction(set, structure);
    if (!r) throw NotAuthorized("attribute set does not satisfy the access structure");
    return std::move(*r);
}

// One child row per assignment: parent row (0-based) extended by a level-(k+1)
// name or the empty attribute.
struct ChildSpec {
    struct Assignment {
        std::size_t parent_row = 0;
        std::string suffix;
    };
    std::vector<Assignment> assignments;
};

struct DelegationPlan {
    struct Child {
        std::size_t parent_row = 0;
        AttributeVector vector;
    };
    std::vector<Child> children;
};

// Every parent row must be extended at least once and the resulting child
// vectors must be distinct; prefixes hold by construction.
inline DelegationPlan check_delegation(const AccessStructure& parent, const ChildSpec& spec,
                                       const AttributeMatrix& matrix) {
    const std::size_t k = parent.depth();
    if (k + 1 > matrix.levels())
        throw DelegationError("cannot delegate below depth " + std::to_string(matrix.levels()));
    if (spec.assignments.empty()) throw DelegationError("delegation needs at least one assignment");
    std::vector<bool> covered(parent.rows(), false);
    std::set<AttributeVector> seen;
    DelegationPlan plan;
    for (const auto& a : spec.assignments) {
        if (a.parent_row >= parent.rows())
            throw DelegationError("parent row " + std::to_string(a.parent_row + 1) + " does not exist");
        AttributeEntry suffix{a.suffix, 0};
        if (is_empty_attribute(a.suffix)) {
            suffix.column = matrix.empty_column(k + 1).value_or(0);
        } else {
            auto cell = matrix.find(a.suffix);
            if (!cell) throw DelegationError("unknown attribute '" + a.suffix + "'");
            if (cell->level != k + 1)
                throw DelegationError("suffix '" + a.suffix + "' is not a level-" + std::to_string(k + 1) +
                                      " attribute");
            suffix.column = cell->column;
        }
        AttributeVector child = parent.rho(a.parent_row).extended(std::move(suffix));
        if (!seen.insert(child).second) throw DelegationError("duplicate child vector " + child.to_string());
        covered[a.parent_row] = true;
        plan.children.push_back({a.parent_row, std::move(child)});
    }
    for (std::size_t i = 0; i < covered.size(); ++i)
        if (!covered[i])
            throw DelegationError("parent row " + std::to_string(i + 1) + " (" + parent.rho(i).to_string() +
                                  ") has no child");
    return plan;
}

// Child row i = gamma_i * parent row i'. The cumulative scale is recorded so
// elimination still runs on the formula-compiled base rows.
inline AccessStructure derive_child(const AccessStructure& parent, const DelegationPlan& plan,
                                    const std::vector<Scalar>& gammas) {
    if (gammas.size() != plan.children.size()) throw ValidationError("one gamma per child row is required");
    MatrixZN m(parent.ring(), plan.children.size(), parent.cols());
    std::vector<AttributeVector> rho;
    std::vector<Scalar> scale;
    for (std::size_t i = 0; i < plan.children.size(); ++i) {
        const auto& child = plan.children[i];
        if (!gammas[i].is_unit()) throw ValidationError("delegation factor gamma must be a unit of Z_N");
        for (std::size_t j = 0; j < parent.cols(); ++j) m.at(i, j) = gammas[i] * parent.matrix().at(child.parent_row, j);
        rho.push_back(child.vector);
        scale.push_back(gammas[i] * parent.row_scale(child.parent_row));
    }
    return AccessStructure(std::move(m), std::move(rho), std::move(scale), DelegatedOrigin{parent.fingerprint()});
}

}  // namespace aprabe
