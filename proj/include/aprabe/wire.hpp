#pragma once

// Big-endian length-prefixed primitives shared by every binary encoding.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "aprabe/algebra.hpp"
#include "aprabe/crypto.hpp"
#include "aprabe/error.hpp"

namespace aprabe {

class ByteWriter {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
    }
    void raw(std::span<const std::uint8_t> data) { out_.insert(out_.end(), data.begin(), data.end()); }
    void blob(std::span<const std::uint8_t> data) {
        u32(checked_size(data.size()));
        raw(data);
    }
    void text(std::string_view s) { blob({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()}); }
    // Minimal big-endian magnitude, length-prefixed; zero has length 0.
    void integer(const Int& v) { blob(int_to_bytes(v)); }

    const Bytes& bytes() const& noexcept { return out_; }
    Bytes bytes() && noexcept { return std::move(out_); }

private:
    static std::uint32_t checked_size(std::size_t n) {
        if (n > 0xffffffffu) throw Error("field too large to encode");
        return static_cast<std::uint32_t>(n);
    }
    Bytes out_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t u8() { return take(1)[0]; }
    std::uint32_t u32() {
        auto b = take(4);
        return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
    }
    std::span<const std::uint8_t> raw(std::size_t n) { return take(n); }
    std::span<const std::uint8_t> blob() { return take(u32()); }
    std::string text() {
        auto b = blob();
        return {reinterpret_cast<const char*>(b.data()), b.size()};
    }
    Int integer() {
        auto b = blob();
        if (!b.empty() && b[0] == 0) throw FormatError("non-canonical integer encoding (leading zero)");
        return int_from_bytes(b);
    }
    // Bounded count, guarding allocations driven by untrusted lengths.
    std::size_t count(std::size_t max) {
        const auto n = u32();
        if (n > max) throw FormatError("element count " + std::to_string(n) + " exceeds limit");
        return n;
    }

    std::size_t remaining() const noexcept { return data_.size() - pos_; }
    void expect_end() const {
        if (remaining() != 0) throw FormatError("trailing bytes after encoding");
    }

private:
    std::span<const std::uint8_t> take(std::size_t n) {
        if (n > remaining()) throw TruncatedError("unexpected end of data");
        auto s = data_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

}  // namespace aprabe
