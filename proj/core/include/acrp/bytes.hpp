#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "acrp/error.hpp"

namespace acrp {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

inline ByteView as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline Bytes to_bytes(std::string_view s) {
    auto v = as_bytes(s);
    return {v.begin(), v.end()};
}

inline std::string to_string(ByteView b) {
    return {reinterpret_cast<const char*>(b.data()), b.size()};
}

std::string to_hex(ByteView b);
Bytes from_hex(std::string_view hex);
Digest digest_from_hex(std::string_view hex);

std::string to_base64(ByteView b);
Bytes from_base64(std::string_view text);

/// Little-endian, length-prefixed writer used by every wire format in the project.
class ByteWriter {
public:
    ByteWriter& u8(std::uint8_t v) {
        out_.push_back(v);
        return *this;
    }
    ByteWriter& u16(std::uint16_t v) { return le(v, 2); }
    ByteWriter& u32(std::uint32_t v) { return le(v, 4); }
    ByteWriter& u64(std::uint64_t v) { return le(v, 8); }
    ByteWriter& i32(std::int32_t v) { return le(static_cast<std::uint32_t>(v), 4); }

    ByteWriter& raw(ByteView b) {
        out_.insert(out_.end(), b.begin(), b.end());
        return *this;
    }
    ByteWriter& raw(std::string_view s) { return raw(as_bytes(s)); }

    /// u32 length followed by the bytes.
    ByteWriter& blob(ByteView b);
    ByteWriter& blob(std::string_view s) { return blob(as_bytes(s)); }

    const Bytes& bytes() const& { return out_; }
    Bytes take() && { return std::move(out_); }
    std::size_t size() const { return out_.size(); }

private:
    ByteWriter& le(std::uint64_t v, int width) {
        for (int i = 0; i < width; ++i)
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        return *this;
    }

    Bytes out_;
};

/// Bounds-checked reader; every failure throws Error(Malformed).
class ByteReader {
public:
    explicit ByteReader(ByteView in) : in_(in) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
    std::uint64_t u64() { return le(8); }
    std::int32_t i32() { return static_cast<std::int32_t>(static_cast<std::uint32_t>(le(4))); }

    ByteView raw(std::size_t n);
    ByteView blob(std::size_t max_len = SIZE_MAX);
    std::string str(std::size_t max_len = SIZE_MAX) { return to_string(blob(max_len)); }

    template <std::size_t N>
    std::array<std::uint8_t, N> fixed() {
        std::array<std::uint8_t, N> out{};
        auto v = raw(N);
        std::copy(v.begin(), v.end(), out.begin());
        return out;
    }

    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return in_.size() - pos_; }
    bool done() const { return pos_ == in_.size(); }
    void expect_end() const;

private:
    std::uint64_t le(int width);

    ByteView in_;
    std::size_t pos_ = 0;
};

} // namespace acrp
