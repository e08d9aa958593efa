#pragma once

// Redactable signatures over chunked messages.
//
// A per-message root seed expands through a binary seed tree into one nonce
// per leaf. Each chunk is committed as a salted, position-bound leaf hash, the
// leaves form a Merkle tree, and a single Ed25519 signature covers the root.
// Redacting a chunk replaces it with its leaf commitment and withdraws every
// seed that could derive its nonce; the remaining seeds travel as a cover of
// disjoint subtrees.

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string_view>
#include <variant>
#include <vector>

#include "acrp/bytes.hpp"
#include "acrp/crypto.hpp"

namespace acrp::rss {

inline constexpr std::size_t kMaxChunkSize = 1u << 20;
inline constexpr std::size_t kMaxChunks = 4096;
inline constexpr std::size_t kSeedSize = 16;

using Seed = std::array<std::uint8_t, kSeedSize>;

enum class FieldTag : std::uint8_t { Location = 0, Picture = 1, Description = 2 };

std::string_view to_string(FieldTag tag);

struct ChunkedMessage {
    FieldTag field_tag = FieldTag::Description;
    std::vector<Bytes> chunks;
    Digest context{};

    bool operator==(const ChunkedMessage&) const = default;
};

struct RedactableSignature {
    Signature root_signature;
    std::uint32_t n = 0;
    std::uint8_t depth = 0;
    Seed root_seed{};
    PublicKey signer_pk;

    bool operator==(const RedactableSignature&) const = default;
};

struct Present {
    Bytes chunk;
    bool operator==(const Present&) const = default;
};

struct Redacted {
    Digest commitment{};
    bool operator==(const Redacted&) const = default;
};

using Slot = std::variant<Present, Redacted>;

struct CoverEntry {
    std::uint32_t position = 0; // heap index: root 1, children 2p and 2p+1
    Seed seed{};
    bool operator==(const CoverEntry&) const = default;
};

struct RedactedMessage {
    FieldTag field_tag = FieldTag::Description;
    std::vector<Slot> slots;
    std::vector<CoverEntry> seed_cover;
    Signature root_signature;
    std::uint32_t n = 0;
    PublicKey signer_pk;
    Digest context{};

    bool operator==(const RedactedMessage&) const = default;

    std::set<std::uint32_t> redacted_indices() const;
};

/// ceil(log2(max(n, 2)))
std::uint8_t tree_depth(std::size_t n);

/// Throws EmptyMessage / TooManyChunks / ChunkTooLarge.
void validate(const ChunkedMessage& msg);

RedactableSignature sign_redactable(const SigningKey& sk, const ChunkedMessage& msg,
                                    std::optional<Seed> root_seed = std::nullopt);

bool verify_full(const PublicKey& pk, const ChunkedMessage& msg, const RedactableSignature& sig);

RedactedMessage redact(const ChunkedMessage& msg, const RedactableSignature& sig,
                       const std::set<std::uint32_t>& to_redact);
RedactedMessage redact(const RedactedMessage& msg, const std::set<std::uint32_t>& to_redact);

bool verify_redacted(const RedactedMessage& msg);

/// Merkle root implied by a redacted message, or nullopt when its shape is inconsistent.
std::optional<Digest> recompute_root(const RedactedMessage& msg);

/// Leaf commitments h_0..h_{n-1} of the unredacted message.
std::vector<Digest> leaf_commitments(const ChunkedMessage& msg, const RedactableSignature& sig);

Digest merkle_root(const ChunkedMessage& msg, const RedactableSignature& sig);

/// Preimage digest the root signature covers.
Digest signed_binding(const Digest& root, std::uint32_t n, FieldTag tag, const Digest& context);

/// Serialized size of the cryptographic fields of `msg` (everything except Present slots).
std::size_t overhead_bytes(const RedactedMessage& msg);

/// Exact worst case of overhead_bytes over every k-subset of redacted chunks.
std::size_t signature_overhead(std::size_t n, std::size_t k);

/// Number of cover entries in the worst case over every k-subset.
std::size_t max_cover_entries(std::size_t n, std::size_t k);

// Wire formats. RedactedMessage: field_tag:u8, n:u32, slots, cover, root_signature, signer_pk.
Bytes encode(const RedactedMessage& msg);
RedactedMessage decode_redacted(ByteView bytes, const Digest& context);
Bytes encode(const RedactableSignature& sig);
RedactableSignature decode_signature(ByteView bytes);
void encode_to(ByteWriter& w, const RedactedMessage& msg);
RedactedMessage decode_from(ByteReader& r, const Digest& context);

} // namespace acrp::rss
