#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "acrp/transaction.hpp"

namespace acrp::ledger {

inline constexpr std::size_t kMaxBlockTxs = 1000;

struct BlockHeader {
    std::uint64_t height = 0;
    Digest prev_hash{};
    PublicKey producer;
    std::uint64_t timestamp = 0;
    Digest tx_root{};

    bool operator==(const BlockHeader&) const = default;
};

struct Block {
    BlockHeader header;
    std::vector<Transaction> txs;
    Digest hash{};
    Signature producer_signature;

    bool operator==(const Block&) const = default;

    /// Fills tx_root, hash and the producer signature.
    static Block seal(std::uint64_t height, const Digest& prev_hash, std::uint64_t timestamp,
                      std::vector<Transaction> txs, const SigningKey& producer);
};

/// RFC 6962 tree hash over transaction refs; the empty tree hashes to SHA-256("").
Digest tx_merkle_root(std::span<const Digest> leaves);
Digest tx_merkle_root(const std::vector<Transaction>& txs);

/// H(height | prev_hash | producer | timestamp | tx_root)
Digest header_hash(const BlockHeader& h);

Bytes encode(const Block& b);
Block decode_block(ByteView bytes);

} // namespace acrp::ledger
