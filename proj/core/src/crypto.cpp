#include "acrp/crypto.hpp"

#include <cstring>
#include <sodium.h>

namespace acrp {
namespace {

void ensure_sodium() {
    static const bool ready = [] { return sodium_init() >= 0; }();
    if (!ready)
        throw std::runtime_error("libsodium initialisation failed");
}

crypto_hash_sha256_state* as_state(std::array<std::uint8_t, 128>& raw) {
    static_assert(sizeof(crypto_hash_sha256_state) <= 128);
    return reinterpret_cast<crypto_hash_sha256_state*>(raw.data());
}

} // namespace

Digest sha256(ByteView data) {
    ensure_sodium();
    Digest out{};
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

Hasher::Hasher() {
    ensure_sodium();
    crypto_hash_sha256_init(as_state(state_));
}

Hasher& Hasher::add(ByteView data) {
    crypto_hash_sha256_update(as_state(state_), data.data(), data.size());
    return *this;
}

Hasher& Hasher::add_u32(std::uint32_t v) {
    std::array<std::uint8_t, 4> le{};
    for (int i = 0; i < 4; ++i)
        le[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v >> (8 * i));
    return add(le);
}

Hasher& Hasher::add_u64(std::uint64_t v) {
    std::array<std::uint8_t, 8> le{};
    for (int i = 0; i < 8; ++i)
        le[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v >> (8 * i));
    return add(le);
}

Digest Hasher::finish() {
    Digest out{};
    crypto_hash_sha256_final(as_state(state_), out.data());
    return out;
}

PublicKey PublicKey::from_hex(std::string_view hex) {
    auto raw = acrp::from_hex(hex);
    if (raw.size() != 32)
        throw Error(Errc::Malformed, "public key must be 32 bytes");
    PublicKey pk;
    std::copy(raw.begin(), raw.end(), pk.bytes.begin());
    return pk;
}

SigningKey::SigningKey(const std::array<std::uint8_t, 32>& seed) : seed_(seed) {
    ensure_sodium();
    std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES> sk{};
    crypto_sign_seed_keypair(pk_.bytes.data(), sk.data(), seed_.data());
    sodium_memzero(sk.data(), sk.size());
}

Signature SigningKey::sign(ByteView message) const {
    std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES> sk{};
    std::array<std::uint8_t, 32> pk{};
    crypto_sign_seed_keypair(pk.data(), sk.data(), seed_.data());
    Signature sig;
    crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(), sk.data());
    sodium_memzero(sk.data(), sk.size());
    return sig;
}

KeyPair keygen(std::optional<ByteView> rng_seed) {
    ensure_sodium();
    std::array<std::uint8_t, 32> seed{};
    if (rng_seed) {
        seed = Hasher().add("acrp-keygen").add(*rng_seed).finish();
    } else {
        randombytes_buf(seed.data(), seed.size());
    }
    SigningKey sk(seed);
    sodium_memzero(seed.data(), seed.size());
    auto pk = sk.public_key();
    return {std::move(sk), pk};
}

bool verify_signature(const PublicKey& pk, ByteView message, const Signature& sig) {
    ensure_sodium();
    return crypto_sign_verify_detached(sig.bytes.data(), message.data(), message.size(),
                                       pk.bytes.data()) == 0;
}

Bytes random_bytes(std::size_t n) {
    ensure_sodium();
    Bytes out(n);
    randombytes_buf(out.data(), n);
    return out;
}

} // namespace acrp
