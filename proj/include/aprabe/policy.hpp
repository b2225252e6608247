#pragma once

// Monotone AND/OR policies over attribute vectors and their text syntax:
//
//   policy := or
//   or     := and { "OR" and }
//   and    := atom { "AND" atom }
//   atom   := vector | "(" policy ")"
//   vector := "[" name { "," name } "]"
//
// Literals shorter than the deepest literal are padded with the empty
// attribute so every leaf has the same depth.

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "aprabe/attrspace.hpp"

namespace aprabe {

class PolicyFormula {
public:
    enum class Kind { Leaf, And, Or };

    static PolicyFormula leaf(AttributeVector v) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Leaf;
        n->vector = std::move(v);
        return PolicyFormula(std::move(n));
    }
    static PolicyFormula both(PolicyFormula left, PolicyFormula right) {
        return branch(Kind::And, std::move(left), std::move(right));
    }
    static PolicyFormula either(PolicyFormula left, PolicyFormula right) {
        return branch(Kind::Or, std::move(left), std::move(right));
    }

    Kind kind() const noexcept { return node_->kind; }
    const AttributeVector& vector() const { return node_->vector; }
    PolicyFormula left() const { return PolicyFormula(node_->left); }
    PolicyFormula right() const { return PolicyFormula(node_->right); }

    // Leaves in left-to-right order; this is the row order after compilation.
    std::vector<AttributeVector> leaves() const {
        std::vector<AttributeVector> out;
        collect(*node_, out);
        return out;
    }

    std::size_t depth() const { return leaves().front().depth(); }

    // Uniform leaf depth and pairwise-distinct leaves.
    void validate() const {
        const auto all = leaves();
        std::set<AttributeVector> seen;
        for (const auto& v : all) {
            if (v.depth() != all.front().depth()) throw ValidationError("policy leaves have different depths");
            if (!seen.insert(v).second) throw ValidationError("duplicate leaf vector " + v.to_string() + " in policy");
        }
    }

    // Fully parenthesized; parses back to the same formula.
    std::string to_string() const { return render(*node_); }

private:
    struct Node {
        Kind kind = Kind::Leaf;
        AttributeVector vector;
        std::shared_ptr<const Node> left;
        std::shared_ptr<const Node> right;
    };

    explicit PolicyFormula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    static PolicyFormula branch(Kind kind, PolicyFormula left, PolicyFormula right) {
        auto n = std::make_shared<Node>();
        n->kind = kind;
        n->left = std::move(left.node_);
        n->right = std::move(right.node_);
        return PolicyFormula(std::move(n));
    }

    static void collect(const Node& n, std::vector<AttributeVector>& out) {
        if (n.kind == Kind::Leaf) {
            out.push_back(n.vector);
            return;
        }
        collect(*n.left, out);
        collect(*n.right, out);
    }

    static std::string render(const Node& n) {
        if (n.kind == Kind::Leaf) return n.vector.to_string();
        return "(" + render(*n.left) + (n.kind == Kind::And ? " AND " : " OR ") + render(*n.right) + ")";
    }

    std::shared_ptr<const Node> node_;
};

namespace policy_detail {

struct RawNode {
    PolicyFormula::Kind kind = PolicyFormula::Kind::Leaf;
    std::vector<std::string> names;
    std::size_t position = 0;
    std::unique_ptr<RawNode> left;
    std::unique_ptr<RawNode> right;
};

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    std::unique_ptr<RawNode> parse_policy() {
        auto root = parse_or();
        skip_space();
        if (pos_ != text_.size()) throw ParseError("unexpected input", pos_);
        return root;
    }

    // "[a,b];[c,d]" with optional whitespace around separators.
    std::vector<std::pair<std::vector<std::string>, std::size_t>> parse_vector_list() {
        std::vector<std::pair<std::vector<std::string>, std::size_t>> out;
        for (;;) {
            skip_space();
            const std::size_t at = pos_;
            if (!consume('[')) throw ParseError("expected '['", pos_);
            out.emplace_back(parse_names(), at);
            skip_space();
            if (pos_ == text_.size()) break;
            if (!consume(';')) throw ParseError("expected ';' between vectors", pos_);
        }
        return out;
    }

private:
    std::unique_ptr<RawNode> parse_or() {
        auto left = parse_and();
        while (keyword("OR")) left = join(PolicyFormula::Kind::Or, std::move(left), parse_and());
        return left;
    }

    std::unique_ptr<RawNode> parse_and() {
        auto left = parse_atom();
        while (keyword("AND")) left = join(PolicyFormula::Kind::And, std::move(left), parse_atom());
        return left;
    }

    std::unique_ptr<RawNode> parse_atom() {
        skip_space();
        const std::size_t at = pos_;
        if (consume('(')) {
            auto inner = parse_or();
            skip_space();
            if (!consume(')')) throw ParseError("expected ')'", pos_);
            return inner;
        }
        if (consume('[')) {
            auto leaf = std::make_unique<RawNode>();
            leaf->names = parse_names();
            leaf->position = at;
            return leaf;
        }
        throw ParseError(pos_ == text_.size() ? "unexpected end of policy" : "expected '[' or '('", pos_);
    }

    // After '[': names up to the closing ']'.
    std::vector<std::string> parse_names() {
        std::vector<std::string> names;
        for (;;) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']') ++pos_;
            if (pos_ == text_.size()) throw ParseError("unterminated attribute vector", start);
            std::string_view name = text_.substr(start, pos_ - start);
            while (!name.empty() && is_space(name.front())) name.remove_prefix(1);
            while (!name.empty() && is_space(name.back())) name.remove_suffix(1);
            if (name.empty()) throw ParseError("empty attribute name", start);
            names.emplace_back(name);
            if (text_[pos_++] == ']') return names;
        }
    }

    static std::unique_ptr<RawNode> join(PolicyFormula::Kind kind, std::unique_ptr<RawNode> l,
                                         std::unique_ptr<RawNode> r) {
        auto n = std::make_unique<RawNode>();
        n->kind = kind;
        n->left = std::move(l);
        n->right = std::move(r);
        return n;
    }

    bool keyword(std::string_view word) {
        skip_space();
        if (text_.substr(pos_, word.size()) != word) return false;
        const std::size_t end = pos_ + word.size();
        if (end < text_.size() && !is_space(text_[end]) && text_[end] != '[' && text_[end] != '(') return false;
        pos_ = end;
        return true;
    }

    bool consume(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
    void skip_space() {
        while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

inline std::size_t max_depth(const RawNode& n) {
    if (n.kind == PolicyFormula::Kind::Leaf) return n.names.size();
    return std::max(max_depth(*n.left), max_depth(*n.right));
}

inline AttributeVector resolve(const AttributeMatrix& matrix, std::vector<std::string> names, std::size_t depth) {
    names.resize(depth, std::string(kEmptyAttribute));
    return make_vector(matrix, names);
}

inline PolicyFormula build(const RawNode& n, const AttributeMatrix& matrix, std::size_t depth) {
    switch (n.kind) {
        case PolicyFormula::Kind::Leaf:
            return PolicyFormula::leaf(resolve(matrix, n.names, depth));
        case PolicyFormula::Kind::And:
            return PolicyFormula::both(build(*n.left, matrix, depth), build(*n.right, matrix, depth));
        case PolicyFormula::Kind::Or:
            return PolicyFormula::either(build(*n.left, matrix, depth), build(*n.right, matrix, depth));
    }
    throw Error("unreachable policy node kind");
}

}  // namespace policy_detail

inline PolicyFormula parse_policy(std::string_view text, const AttributeMatrix& matrix) {
    auto raw = policy_detail::Parser(text).parse_policy();
    auto formula = policy_detail::build(*raw, matrix, policy_detail::max_depth(*raw));
    formula.validate();
    return formula;
}

// Semicolon-separated vector literals: "[HospA,Cardio];[Prof,∅]".
inline AttributeSet parse_attribute_set(std::string_view text, const AttributeMatrix& matrix) {
    std::vector<AttributeVector> vectors;
    for (auto& [names, at] : policy_detail::Parser(text).parse_vector_list()) vectors.push_back(make_vector(matrix, names));
    return AttributeSet(std::move(vectors));
}

}  // namespace aprabe
