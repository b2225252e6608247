#pragma once

// The hierarchical attribute universe: an L x D matrix of names, attribute
// vectors picking one name per level, and the hash encoding of names into
// exponents.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aprabe/algebra.hpp"
#include "aprabe/crypto.hpp"
#include "aprabe/error.hpp"
#include "aprabe/wire.hpp"
#include "json.hpp"

namespace aprabe {

// Reserved empty attribute, U+2205.
inline constexpr std::string_view kEmptyAttribute = "∅";

inline bool is_empty_attribute(std::string_view name) { return name == kEmptyAttribute; }

// 1-based matrix coordinates.
struct CellRef {
    std::size_t level = 0;
    std::size_t column = 0;
    friend bool operator==(const CellRef&, const CellRef&) = default;
};

inline void validate_attribute_name(std::string_view name) {
    if (name.empty()) throw ValidationError("attribute names must be non-empty");
    if (name.find_first_of("],") != std::string_view::npos)
        throw ValidationError("attribute name '" + std::string(name) + "' contains a reserved character");
    if (name.front() == ' ' || name.back() == ' ')
        throw ValidationError("attribute name '" + std::string(name) + "' has leading or trailing space");
}

class AttributeMatrix {
public:
    static AttributeMatrix from_levels(std::vector<std::vector<std::string>> levels) {
        if (levels.empty() || levels.front().empty()) throw ValidationError("attribute matrix must not be empty");
        AttributeMatrix m;
        m.columns_ = levels.front().size();
        for (std::size_t i = 0; i < levels.size(); ++i) {
            if (levels[i].size() != m.columns_)
                throw ValidationError("attribute matrix row " + std::to_string(i + 1) + " has " +
                                      std::to_string(levels[i].size()) + " entries, expected " +
                                      std::to_string(m.columns_));
            for (std::size_t j = 0; j < levels[i].size(); ++j) {
                const auto& name = levels[i][j];
                validate_attribute_name(name);
                if (is_empty_attribute(name)) continue;
                if (!m.index_.emplace(name, CellRef{i + 1, j + 1}).second)
                    throw ValidationError("duplicate attribute name '" + name + "'");
            }
        }
        if (levels.size() > 255) throw ValidationError("at most 255 levels are supported");
        m.levels_ = std::move(levels);
        return m;
    }

    // {"levels": [["a", "b"], ["c", "∅"]]}
    static AttributeMatrix from_json(std::string_view text) {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("matrix JSON: ") + e.what(), e.byte);
        }
        if (!doc.is_object() || !doc.contains("levels") || !doc["levels"].is_array())
            throw ParseError("matrix JSON: expected an object with a \"levels\" array");
        std::vector<std::vector<std::string>> levels;
        for (const auto& row : doc["levels"]) {
            if (!row.is_array()) throw ParseError("matrix JSON: every level must be an array");
            auto& out = levels.emplace_back();
            for (const auto& cell : row) {
                if (!cell.is_string()) throw ParseError("matrix JSON: attribute names must be strings");
                out.push_back(cell.get<std::string>());
            }
        }
        return from_levels(std::move(levels));
    }

    std::size_t levels() const noexcept { return levels_.size(); }
    std::size_t columns() const noexcept { return columns_; }

    const std::string& name(std::size_t level, std::size_t column) const {
        return levels_.at(level - 1).at(column - 1);
    }
    const std::vector<std::vector<std::string>>& grid() const noexcept { return levels_; }

    // Position of a non-empty name.
    std::optional<CellRef> find(std::string_view name) const {
        auto it = index_.find(std::string(name));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    // First empty cell of a level, or nullopt when the level has none.
    std::optional<std::size_t> empty_column(std::size_t level) const {
        const auto& row = levels_.at(level - 1);
        for (std::size_t j = 0; j < row.size(); ++j)
            if (is_empty_attribute(row[j])) return j + 1;
        return std::nullopt;
    }

    std::string to_json() const { return nlohmann::json{{"levels", levels_}}.dump(); }

    // SHA-256 of the canonical JSON; binds keys and ciphertexts to a universe.
    Digest fingerprint() const { return sha256(to_json()); }

    friend bool operator==(const AttributeMatrix& a, const AttributeMatrix& b) { return a.levels_ == b.levels_; }

private:
    AttributeMatrix() = default;

    std::vector<std::vector<std::string>> levels_;
    std::size_t columns_ = 0;
    std::map<std::string, CellRef> index_;
};

struct AttributeEntry {
    std::string name;
    std::size_t column = 0;  // 1-based; 0 for an empty entry on a level without an empty cell
};

// (u_1, ..., u_k): one name per level, levels 1..k.
class AttributeVector {
public:
    AttributeVector() = default;
    explicit AttributeVector(std::vector<AttributeEntry> entries) : entries_(std::move(entries)) {}

    std::size_t depth() const noexcept { return entries_.size(); }
    const AttributeEntry& at(std::size_t level) const { return entries_.at(level - 1); }
    const std::vector<AttributeEntry>& entries() const noexcept { return entries_; }
    // Column x of the level-1 entry; selects v_x in the public key.
    std::size_t first_column() const { return entries_.at(0).column; }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& e : entries_) out.push_back(e.name);
        return out;
    }

    AttributeVector extended(AttributeEntry suffix) const {
        auto e = entries_;
        e.push_back(std::move(suffix));
        return AttributeVector(std::move(e));
    }

    std::string to_string() const {
        std::string s = "[";
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (i) s += ',';
            s += entries_[i].name;
        }
        return s + "]";
    }

    // Names determine positions, so comparing names is exact coordinate equality.
    friend bool operator==(const AttributeVector& a, const AttributeVector& b) { return a.names() == b.names(); }
    friend auto operator<=>(const AttributeVector& a, const AttributeVector& b) { return a.names() <=> b.names(); }

private:
    std::vector<AttributeEntry> entries_;
};

// names[i] must sit in matrix level i+1; the empty token is accepted at
// every level below the first.
inline AttributeVector make_vector(const AttributeMatrix& matrix, const std::vector<std::string>& names) {
    if (names.empty() || names.size() > matrix.levels())
        throw ValidationError("attribute vector depth must be between 1 and " + std::to_string(matrix.levels()));
    std::vector<AttributeEntry> entries;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const std::size_t level = i + 1;
        const auto& name = names[i];
        if (is_empty_attribute(name)) {
            if (level == 1) throw ValidationError("the empty attribute cannot occupy level 1");
            entries.push_back({name, matrix.empty_column(level).value_or(0)});
            continue;
        }
        auto cell = matrix.find(name);
        if (!cell) throw ValidationError("unknown attribute '" + name + "'");
        if (cell->level != level)
            throw ValidationError("attribute '" + name + "' belongs to level " + std::to_string(cell->level) +
                                  ", used at level " + std::to_string(level));
        entries.push_back({name, cell->column});
    }
    return AttributeVector(std::move(entries));
}

// Strict: the shorter vector must be a proper prefix.
inline bool is_prefix(const AttributeVector& shorter, const AttributeVector& longer) {
    if (shorter.depth() >= longer.depth()) return false;
    for (std::size_t level = 1; level <= shorter.depth(); ++level)
        if (shorter.at(level).name != longer.at(level).name) return false;
    return true;
}

// SHA-256(level || 0x1F || name) mod N, level as one byte; the empty token
// hashes the single byte 0x00 in place of the name.
inline Scalar encode_attr(std::string_view name, std::size_t level, const RingPtr& ring) {
    if (level == 0 || level > 255) throw ValidationError("attribute level out of range");
    Sha256 h;
    h.update(static_cast<std::uint8_t>(level)).update(std::uint8_t{0x1f});
    if (is_empty_attribute(name))
        h.update(std::uint8_t{0x00});
    else
        h.update(name);
    const Digest d = h.finish();
    return {ring, int_from_bytes(d)};
}

// depth, then (column, name) per level.
inline void encode_vector(ByteWriter& w, const AttributeVector& v) {
    w.u32(static_cast<std::uint32_t>(v.depth()));
    for (const auto& e : v.entries()) {
        w.u32(static_cast<std::uint32_t>(e.column));
        w.text(e.name);
    }
}

inline AttributeVector decode_vector(ByteReader& r) {
    const std::size_t k = r.count(255);
    if (k == 0) throw FormatError("attribute vector: zero depth");
    std::vector<AttributeEntry> entries;
    for (std::size_t level = 0; level < k; ++level) {
        const std::size_t column = r.u32();
        entries.push_back({r.text(), column});
    }
    return AttributeVector(std::move(entries));
}

// A non-empty set of distinct vectors of one depth.
class AttributeSet {
public:
    explicit AttributeSet(std::vector<AttributeVector> vectors) : vectors_(std::move(vectors)) {
        if (vectors_.empty()) throw ValidationError("attribute set must not be empty");
        const std::size_t k = vectors_.front().depth();
        for (std::size_t i = 0; i < vectors_.size(); ++i) {
            if (vectors_[i].depth() != k) throw ValidationError("attribute set mixes vector depths");
            for (std::size_t j = 0; j < i; ++j)
                if (vectors_[i] == vectors_[j])
                    throw ValidationError("duplicate vector " + vectors_[i].to_string() + " in attribute set");
        }
    }

    std::size_t depth() const { return vectors_.front().depth(); }
    std::size_t size() const noexcept { return vectors_.size(); }
    const std::vector<AttributeVector>& vectors() const noexcept { return vectors_; }
    const AttributeVector& operator[](std::size_t i) const { return vectors_.at(i); }

    std::optional<std::size_t> index_of(const AttributeVector& v) const {
        for (std::size_t i = 0; i < vectors_.size(); ++i)
            if (vectors_[i] == v) return i;
        return std::nullopt;
    }
    bool contains(const AttributeVector& v) const { return index_of(v).has_value(); }

    std::string to_string() const {
        std::string s;
        for (std::size_t i = 0; i < vectors_.size(); ++i) {
            if (i) s += ';';
            s += vectors_[i].to_string();
        }
        return s;
    }

    friend bool operator==(const AttributeSet& a, const AttributeSet& b) { return a.vectors_ == b.vectors_; }

private:
    std::vector<AttributeVector> vectors_;
};

}  // namespace aprabe
