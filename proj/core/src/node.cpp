#include "acrp/node.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace acrp::ledger {
namespace fs = std::filesystem;

Digest Mempool::submit(Transaction tx) {
    auto ref = tx.ref();
    std::lock_guard lock(mu_);
    if (refs_.insert(ref).second)
        queue_.emplace_back(ref, std::move(tx));
    return ref;
}

std::vector<std::pair<Digest, Transaction>> Mempool::snapshot() const {
    std::lock_guard lock(mu_);
    return {queue_.begin(), queue_.end()};
}

void Mempool::remove(const std::set<Digest>& refs) {
    std::lock_guard lock(mu_);
    std::erase_if(queue_, [&](const auto& e) { return refs.contains(e.first); });
    for (const auto& r : refs)
        refs_.erase(r);
}

bool Mempool::contains(const Digest& ref) const {
    std::lock_guard lock(mu_);
    return refs_.contains(ref);
}

std::size_t Mempool::size() const {
    std::lock_guard lock(mu_);
    return queue_.size();
}

Node::Node(Genesis genesis, std::optional<SigningKey> member_key, std::optional<fs::path> data_dir)
    : genesis_(std::move(genesis)),
      member_key_(std::move(member_key)),
      data_dir_(std::move(data_dir)),
      state_(std::make_shared<const LedgerState>(genesis_)) {
    if (!data_dir_)
        return;
    write_genesis_file(*data_dir_, genesis_);
    // Resume from blocks already on disk.
    auto existing = read_chain_dir(*data_dir_);
    auto state = std::make_shared<LedgerState>(genesis_);
    for (std::size_t i = 0; i < existing.size(); ++i) {
        auto block = decode_block(existing[i]);
        if (auto err = apply_block(*state, block))
            throw Error(Errc::IntegrityError, "stored block " + std::to_string(i) + ": " + *err);
        for (std::size_t t = 0; t < block.txs.size(); ++t)
            tx_index_[block.txs[t].ref()] = {block.header.height, t};
        applied_ += block.txs.size();
        chain_.push_back(std::move(block));
    }
    state_ = std::move(state);
}

std::shared_ptr<const LedgerState> Node::state() const {
    std::shared_lock lock(mu_);
    return state_;
}

std::uint64_t Node::height() const { return state()->height(); }

bool Node::is_our_turn() const {
    return member_key_ && state()->producer_for(height()) == member_key_->public_key();
}

std::optional<Rejection> Node::precheck(const Transaction& tx) const {
    auto s = state();
    LedgerState scratch = *s;
    scratch.begin_block(s->height());
    return scratch.apply(tx, s->height(), tx.ref());
}

Block Node::produce_block() {
    auto base = state();
    auto height = base->height();
    if (!member_key_ || base->producer_for(height) != member_key_->public_key())
        throw Error(Errc::NotOurTurn, "height " + std::to_string(height));

    auto next = std::make_shared<LedgerState>(*base);
    next->begin_block(height);
    std::vector<Transaction> included;
    std::set<Digest> done;
    std::vector<RejectionLogEntry> rejected;
    for (auto& [ref, tx] : mempool_.snapshot()) {
        if (included.size() == kMaxBlockTxs)
            break;
        if (auto r = next->apply(tx, height, ref)) {
            rejected.push_back({ref, tx.kind, r->code, r->detail, height});
        } else {
            included.push_back(std::move(tx));
        }
        done.insert(ref);
    }
    auto block = Block::seal(height, base->head_hash(), genesis_.timestamp_at(height), std::move(included),
                             *member_key_);
    next->end_block(block.hash);
    {
        std::unique_lock lock(mu_);
        rejections_.insert(rejections_.end(), rejected.begin(), rejected.end());
    }
    commit_block(block, std::move(next));
    mempool_.remove(done);
    return block;
}

std::optional<std::string> Node::accept_block(const Block& block) {
    auto next = std::make_shared<LedgerState>(*state());
    if (auto err = apply_block(*next, block))
        return err;
    commit_block(block, std::move(next));
    std::set<Digest> refs;
    for (const auto& tx : block.txs)
        refs.insert(tx.ref());
    mempool_.remove(refs);
    return std::nullopt;
}

void Node::commit_block(const Block& block, std::shared_ptr<const LedgerState> next) {
    if (data_dir_)
        write_block_file(*data_dir_, block);
    std::unique_lock lock(mu_);
    for (std::size_t t = 0; t < block.txs.size(); ++t)
        tx_index_[block.txs[t].ref()] = {block.header.height, t};
    applied_ += block.txs.size();
    chain_.push_back(block);
    state_ = std::move(next);
}

void Node::drop_rejected(const std::vector<RejectionLogEntry>& entries) {
    std::set<Digest> refs;
    for (const auto& e : entries)
        refs.insert(e.tx_ref);
    mempool_.remove(refs);
    std::unique_lock lock(mu_);
    rejections_.insert(rejections_.end(), entries.begin(), entries.end());
}

std::optional<Block> Node::block_at(std::uint64_t height) const {
    std::shared_lock lock(mu_);
    if (height >= chain_.size())
        return std::nullopt;
    return chain_[height];
}

std::vector<Block> Node::blocks() const {
    std::shared_lock lock(mu_);
    return chain_;
}

std::optional<TxLocation> Node::find_tx(const Digest& ref) const {
    std::shared_lock lock(mu_);
    auto it = tx_index_.find(ref);
    if (it == tx_index_.end())
        return std::nullopt;
    return it->second;
}

std::optional<Transaction> Node::transaction(const Digest& ref) const {
    std::shared_lock lock(mu_);
    auto it = tx_index_.find(ref);
    if (it == tx_index_.end())
        return std::nullopt;
    return chain_.at(it->second.height).txs.at(it->second.index);
}

std::vector<RejectionLogEntry> Node::rejection_log() const {
    std::shared_lock lock(mu_);
    return rejections_;
}

std::size_t Node::applied_count() const {
    std::shared_lock lock(mu_);
    return applied_;
}

Network::Network(const Genesis& genesis, const std::vector<SigningKey>& member_keys,
                 const std::optional<fs::path>& data_dir) {
    for (std::size_t i = 0; i < genesis.members.size(); ++i) {
        const auto& member = genesis.members[i];
        auto it = std::find_if(member_keys.begin(), member_keys.end(),
                               [&](const SigningKey& k) { return k.public_key() == member; });
        if (it == member_keys.end())
            throw Error(Errc::Malformed, "missing signing key for member " + member.hex());
        std::optional<fs::path> dir;
        if (data_dir)
            dir = *data_dir / ("node-" + std::to_string(i));
        nodes_.push_back(std::make_unique<Node>(genesis, *it, dir));
    }
}

Digest Network::submit(const Transaction& tx) {
    Digest ref{};
    for (auto& n : nodes_)
        ref = n->submit(tx);
    return ref;
}

Block Network::step() {
    auto h = height();
    auto& producer = *nodes_.at(h % nodes_.size());
    auto block = producer.produce_block();
    std::vector<RejectionLogEntry> dropped;
    for (const auto& r : producer.rejection_log())
        if (r.height == h)
            dropped.push_back(r);
    for (auto& n : nodes_) {
        if (n.get() == &producer)
            continue;
        if (auto err = n->accept_block(block))
            throw Error(Errc::IntegrityError, "node rejected block " + std::to_string(h) + ": " + *err);
        n->drop_rejected(dropped);
    }
    return block;
}

void Network::run(std::size_t blocks) {
    for (std::size_t i = 0; i < blocks; ++i)
        step();
}

void write_block_file(const fs::path& dir, const Block& block) {
    fs::create_directories(dir / "blocks");
    std::ostringstream name;
    name << std::setw(12) << std::setfill('0') << block.header.height << ".blk";
    auto final_path = dir / "blocks" / name.str();
    auto tmp = final_path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        auto bytes = encode(block);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out)
            throw Error(Errc::Io, "cannot write " + tmp.string());
    }
    fs::rename(tmp, final_path);
}

std::vector<Bytes> read_chain_dir(const fs::path& dir) {
    std::vector<fs::path> files;
    if (fs::exists(dir / "blocks")) {
        for (const auto& e : fs::directory_iterator(dir / "blocks"))
            if (e.path().extension() == ".blk")
                files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<Bytes> out;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        out.emplace_back(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    return out;
}

void write_genesis_file(const fs::path& dir, const Genesis& genesis) {
    fs::create_directories(dir);
    auto path = dir / "genesis.json";
    if (fs::exists(path)) {
        if (Genesis::load(path.string()) != genesis)
            throw Error(Errc::IntegrityError, "data directory belongs to a different genesis");
        return;
    }
    std::ofstream out(path);
    out << genesis.to_json() << "\n";
}

} // namespace acrp::ledger
