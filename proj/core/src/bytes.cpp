#include "acrp/bytes.hpp"

#include <sodium.h>

namespace acrp {

std::string to_hex(ByteView b) {
    std::string out(b.size() * 2 + 1, '\0');
    sodium_bin2hex(out.data(), out.size(), b.data(), b.size());
    out.pop_back();
    return out;
}

Bytes from_hex(std::string_view hex) {
    Bytes out(hex.size() / 2);
    std::size_t len = 0;
    const char* end = nullptr;
    if (hex.size() % 2 != 0 ||
        sodium_hex2bin(out.data(), out.size(), hex.data(), hex.size(), nullptr, &len, &end) != 0 ||
        end != hex.data() + hex.size())
        throw Error(Errc::Malformed, "invalid hex string");
    out.resize(len);
    return out;
}

Digest digest_from_hex(std::string_view hex) {
    auto raw = from_hex(hex);
    if (raw.size() != 32)
        throw Error(Errc::Malformed, "digest must be 32 bytes");
    Digest d{};
    std::copy(raw.begin(), raw.end(), d.begin());
    return d;
}

std::string to_base64(ByteView b) {
    constexpr int variant = sodium_base64_VARIANT_ORIGINAL;
    std::string out(sodium_base64_ENCODED_LEN(b.size(), variant), '\0');
    sodium_bin2base64(out.data(), out.size(), b.data(), b.size(), variant);
    out.resize(out.size() - 1);
    return out;
}

Bytes from_base64(std::string_view text) {
    Bytes out(text.size() / 4 * 3 + 3);
    std::size_t len = 0;
    const char* end = nullptr;
    if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(), nullptr, &len, &end,
                          sodium_base64_VARIANT_ORIGINAL) != 0 ||
        end != text.data() + text.size())
        throw Error(Errc::Malformed, "invalid base64");
    out.resize(len);
    return out;
}

ByteWriter& ByteWriter::blob(ByteView b) {
    if (b.size() > UINT32_MAX)
        throw Error(Errc::TooLarge, "blob exceeds u32 length prefix");
    u32(static_cast<std::uint32_t>(b.size()));
    return raw(b);
}

ByteView ByteReader::raw(std::size_t n) {
    if (n > remaining())
        throw Error(Errc::Malformed, "truncated input");
    auto out = in_.subspan(pos_, n);
    pos_ += n;
    return out;
}

ByteView ByteReader::blob(std::size_t max_len) {
    std::size_t n = u32();
    if (n > max_len)
        throw Error(Errc::Malformed, "length prefix exceeds limit");
    return raw(n);
}

void ByteReader::expect_end() const {
    if (!done())
        throw Error(Errc::Malformed, "trailing bytes");
}

std::uint64_t ByteReader::le(int width) {
    auto v = raw(static_cast<std::size_t>(width));
    std::uint64_t out = 0;
    for (int i = 0; i < width; ++i)
        out |= static_cast<std::uint64_t>(v[static_cast<std::size_t>(i)]) << (8 * i);
    return out;
}

} // namespace acrp
