#pragma once

// Consortium node simulation: mempool, round-robin block production, block
// acceptance, and an in-process network of members that gossips every
// submission and block to every node.

#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <vector>

#include "acrp/ledger_state.hpp"

namespace acrp::ledger {

class Mempool {
public:
    /// FIFO; resubmitting a queued transaction is a no-op. Returns the tx ref.
    Digest submit(Transaction tx);
    std::vector<std::pair<Digest, Transaction>> snapshot() const;
    void remove(const std::set<Digest>& refs);
    bool contains(const Digest& ref) const;
    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::deque<std::pair<Digest, Transaction>> queue_;
    std::set<Digest> refs_;
};

struct RejectionLogEntry {
    Digest tx_ref{};
    TxKind kind = TxKind::Announce;
    RejectCode code = RejectCode::Malformed;
    std::string detail;
    std::uint64_t height = 0;
};

struct TxLocation {
    std::uint64_t height = 0;
    std::size_t index = 0;
};

class Node {
public:
    explicit Node(Genesis genesis, std::optional<SigningKey> member_key = std::nullopt,
                  std::optional<std::filesystem::path> data_dir = std::nullopt);

    Digest submit(Transaction tx) { return mempool_.submit(std::move(tx)); }

    /// Would `tx` apply on top of the current head? Advisory only; ordering is fixed at production.
    std::optional<Rejection> precheck(const Transaction& tx) const;

    /// Builds, applies and returns the next block from the mempool. Throws NotOurTurn.
    Block produce_block();
    std::optional<std::string> accept_block(const Block& block);
    /// Forget transactions another producer already rejected, keeping its log entries.
    void drop_rejected(const std::vector<RejectionLogEntry>& entries);

    bool is_our_turn() const;
    std::shared_ptr<const LedgerState> state() const;
    const Genesis& genesis() const { return genesis_; }
    std::uint64_t height() const;
    std::optional<Block> block_at(std::uint64_t height) const;
    std::vector<Block> blocks() const;
    std::optional<TxLocation> find_tx(const Digest& ref) const;
    std::optional<Transaction> transaction(const Digest& ref) const;
    bool pending(const Digest& ref) const { return mempool_.contains(ref); }
    std::size_t mempool_size() const { return mempool_.size(); }

    std::vector<RejectionLogEntry> rejection_log() const;
    std::size_t applied_count() const;

private:
    void commit_block(const Block& block, std::shared_ptr<const LedgerState> next);

    Genesis genesis_;
    std::optional<SigningKey> member_key_;
    std::optional<std::filesystem::path> data_dir_;
    Mempool mempool_;

    mutable std::shared_mutex mu_;
    std::shared_ptr<const LedgerState> state_;
    std::vector<Block> chain_;
    std::map<Digest, TxLocation> tx_index_;
    std::vector<RejectionLogEntry> rejections_;
    std::size_t applied_ = 0;
};

/// In-process consortium: one Node per member, each holding that member's key.
class Network {
public:
    /// With `data_dir`, member i persists its chain under <data_dir>/node-<i> and resumes from it.
    Network(const Genesis& genesis, const std::vector<SigningKey>& member_keys,
            const std::optional<std::filesystem::path>& data_dir = std::nullopt);

    Digest submit(const Transaction& tx);
    /// The member whose turn it is produces; every other node validates and applies.
    Block step();
    void run(std::size_t blocks);

    Node& node(std::size_t i) { return *nodes_.at(i); }
    const Node& node(std::size_t i) const { return *nodes_.at(i); }
    std::size_t size() const { return nodes_.size(); }
    std::uint64_t height() const { return nodes_.front()->height(); }

private:
    std::vector<std::unique_ptr<Node>> nodes_;
};

// Chain directory layout: <dir>/genesis.json and <dir>/blocks/<height, 12 digits>.blk
void write_block_file(const std::filesystem::path& dir, const Block& block);
std::vector<Bytes> read_chain_dir(const std::filesystem::path& dir);
void write_genesis_file(const std::filesystem::path& dir, const Genesis& genesis);

} // namespace acrp::ledger
