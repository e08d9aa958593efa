#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>

#include "acrp/bytes.hpp"

namespace acrp {

Digest sha256(ByteView data);

/// Incremental SHA-256; `add` overloads keep the preimage layouts in one place.
class Hasher {
public:
    Hasher();

    Hasher& add(ByteView data);
    Hasher& add(std::string_view s) { return add(as_bytes(s)); }
    Hasher& add_u8(std::uint8_t v) { return add(ByteView(&v, 1)); }
    Hasher& add_u32(std::uint32_t v);
    Hasher& add_u64(std::uint64_t v);

    Digest finish();

private:
    alignas(64) std::array<std::uint8_t, 128> state_{};
};

struct PublicKey {
    std::array<std::uint8_t, 32> bytes{};

    auto operator<=>(const PublicKey&) const = default;
    std::string hex() const { return to_hex(bytes); }
    static PublicKey from_hex(std::string_view hex);
};

struct Signature {
    std::array<std::uint8_t, 64> bytes{};

    auto operator<=>(const Signature&) const = default;
};

/// Ed25519 secret key. Holds the 32-byte seed; the expanded key is rebuilt on demand.
class SigningKey {
public:
    explicit SigningKey(const std::array<std::uint8_t, 32>& seed);

    const PublicKey& public_key() const { return pk_; }
    const std::array<std::uint8_t, 32>& seed() const { return seed_; }

    Signature sign(ByteView message) const;

private:
    std::array<std::uint8_t, 32> seed_{};
    PublicKey pk_;
};

struct KeyPair {
    SigningKey signing_key;
    PublicKey public_key;
};

/// Fresh keypair from the system RNG, or a reproducible one when a seed is given (tests, devnets).
KeyPair keygen(std::optional<ByteView> rng_seed = std::nullopt);

bool verify_signature(const PublicKey& pk, ByteView message, const Signature& sig);

Bytes random_bytes(std::size_t n);

} // namespace acrp
