#include "acrp/block.hpp"

namespace acrp::ledger {
namespace {

Digest leaf_hash(const Digest& d) { return Hasher().add_u8(0x00).add(d).finish(); }

Digest node_hash(const Digest& l, const Digest& r) { return Hasher().add_u8(0x01).add(l).add(r).finish(); }

Digest subtree(std::span<const Digest> leaves) {
    if (leaves.size() == 1)
        return leaf_hash(leaves.front());
    std::size_t split = 1;
    while (split * 2 < leaves.size())
        split *= 2;
    return node_hash(subtree(leaves.first(split)), subtree(leaves.subspan(split)));
}

} // namespace

Digest tx_merkle_root(std::span<const Digest> leaves) {
    if (leaves.empty())
        return sha256({});
    return subtree(leaves);
}

Digest tx_merkle_root(const std::vector<Transaction>& txs) {
    std::vector<Digest> refs;
    refs.reserve(txs.size());
    for (const auto& tx : txs)
        refs.push_back(tx.ref());
    return tx_merkle_root(refs);
}

Digest header_hash(const BlockHeader& h) {
    return Hasher()
        .add_u64(h.height)
        .add(h.prev_hash)
        .add(h.producer.bytes)
        .add_u64(h.timestamp)
        .add(h.tx_root)
        .finish();
}

Block Block::seal(std::uint64_t height, const Digest& prev_hash, std::uint64_t timestamp,
                  std::vector<Transaction> txs, const SigningKey& producer) {
    Block b;
    b.header = {height, prev_hash, producer.public_key(), timestamp, tx_merkle_root(txs)};
    b.txs = std::move(txs);
    b.hash = header_hash(b.header);
    b.producer_signature = producer.sign(b.hash);
    return b;
}

Bytes encode(const Block& b) {
    ByteWriter w;
    w.u64(b.header.height).raw(b.header.prev_hash).raw(b.header.producer.bytes).u64(b.header.timestamp);
    w.raw(b.header.tx_root);
    w.u32(static_cast<std::uint32_t>(b.txs.size()));
    for (const auto& tx : b.txs)
        w.blob(encode(tx));
    w.raw(b.hash).raw(b.producer_signature.bytes);
    return std::move(w).take();
}

Block decode_block(ByteView bytes) {
    ByteReader r(bytes);
    Block b;
    b.header.height = r.u64();
    b.header.prev_hash = r.fixed<32>();
    b.header.producer.bytes = r.fixed<32>();
    b.header.timestamp = r.u64();
    b.header.tx_root = r.fixed<32>();
    auto count = r.u32();
    if (count > kMaxBlockTxs)
        throw Error(Errc::Malformed, "too many transactions in block");
    b.txs.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i)
        b.txs.push_back(decode_transaction(r.blob()));
    b.hash = r.fixed<32>();
    b.producer_signature.bytes = r.fixed<64>();
    r.expect_end();
    return b;
}

} // namespace acrp::ledger
