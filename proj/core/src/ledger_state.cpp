#include "acrp/ledger_state.hpp"

#include <algorithm>
#include <array>

namespace acrp::ledger {
namespace {

constexpr std::array<std::string_view, 8> kPhaseNames{
    "Announced", "Committed", "Audited", "Published", "Acknowledged", "InProgress", "Resolved", "Deleted"};

constexpr std::array<std::string_view, 11> kRejectNames{
    "WrongPhase",      "WrongRole", "HashMismatch", "BadSignature",   "UnknownReport", "AuditorMismatch",
    "InvalidRedaction", "Malformed", "DuplicateVote", "BadMergeTarget", "AlreadyExists"};

Rejection reject(RejectCode code, std::string detail) { return {code, std::move(detail)}; }

Phase phase_for(HandlingStatus s) {
    switch (s) {
    case HandlingStatus::Acknowledged: return Phase::Acknowledged;
    case HandlingStatus::InProgress: return Phase::InProgress;
    case HandlingStatus::Resolved: return Phase::Resolved;
    }
    return Phase::Acknowledged;
}

void push_trace(ReportRecord& rec, std::uint64_t height, Event event, const Digest& ref) {
    rec.trace.push_back({height, event, ref, rec.phase});
}

// Signatures are deterministic, so a byte-identical resubmission has the same ref.
bool replayed(const ReportRecord& rec, const Digest& ref) {
    return std::any_of(rec.trace.begin(), rec.trace.end(), [&](const TraceEntry& t) { return t.tx_ref == ref; });
}

void write_commitment(ByteWriter& w, const SignatureCommitment& c) {
    w.u8(static_cast<std::uint8_t>(c.field_tag)).u32(c.n).raw(c.root).raw(c.root_signature.bytes).raw(c.signer_pk.bytes);
}

} // namespace

std::string_view to_string(Phase p) { return kPhaseNames.at(static_cast<std::size_t>(p)); }

Phase parse_phase(std::string_view s) {
    for (std::size_t i = 0; i < kPhaseNames.size(); ++i)
        if (kPhaseNames[i] == s)
            return static_cast<Phase>(i);
    throw Error(Errc::Malformed, "unknown phase '" + std::string(s) + "'");
}

std::string_view to_string(RejectCode c) { return kRejectNames.at(static_cast<std::size_t>(c)); }

std::string_view to_string(Event e) {
    switch (e) {
    case Event::MergedInto: return "MergedInto";
    case Event::ForcedPublish: return "ForcedPublish";
    default: return to_string(static_cast<TxKind>(e));
    }
}

LedgerState::LedgerState(const Genesis& genesis)
    : chain_id_(genesis.chain_id),
      audit_timeout_(genesis.audit_timeout),
      genesis_hash_(genesis.hash()),
      members_(genesis.members) {
    for (const auto& a : genesis.auditors)
        auditors_.auditors.push_back({a, 0});
    authorities_.entries = genesis.authorities;
}

const ReportRecord* LedgerState::find(const ReportId& id) const {
    auto it = reports_.find(id);
    return it == reports_.end() ? nullptr : &it->second;
}

bool LedgerState::is_member(const PublicKey& pk) const {
    return std::find(members_.begin(), members_.end(), pk) != members_.end();
}

AuditorSelection LedgerState::expected_auditor(const ReportId& id) const {
    const auto* rec = find(id);
    if (!rec)
        throw Error(Errc::UnknownReport, id.hex());
    auto beacon_height = rec->announce_height + 1;
    if (beacon_height >= block_hashes_.size())
        throw Error(Errc::WrongPhase, "beacon block not yet produced");
    auto active = auditors_.active_at(rec->announce_height);
    return select_auditor(id, block_hashes_[beacon_height], active);
}

std::optional<PublicKey> LedgerState::responsible_authority(const ReportRecord& rec) const {
    try {
        return route(rec.type, rec.location, authorities_).authority;
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::optional<Rejection> LedgerState::check_authority(const ReportRecord& rec, const PublicKey& sender) const {
    if (auto responsible = responsible_authority(rec)) {
        if (sender != *responsible)
            return reject(RejectCode::WrongRole, "sender is not the responsible authority");
        return std::nullopt;
    }
    if (!authorities_.contains_key(sender))
        return reject(RejectCode::WrongRole, "manual routing requires a registered authority");
    return std::nullopt;
}

void LedgerState::begin_block(std::uint64_t height) {
    for (auto& [id, rec] : reports_) {
        if (rec.phase == Phase::Committed && height - *rec.commit_height > audit_timeout_)
            force_publish(id, height);
    }
}

void LedgerState::end_block(const Digest& block_hash) { block_hashes_.push_back(block_hash); }

void LedgerState::force_publish(const ReportId& id, std::uint64_t height) {
    auto it = reports_.find(id);
    if (it == reports_.end())
        throw Error(Errc::UnknownReport, id.hex());
    auto& rec = it->second;
    if (rec.phase != Phase::Committed)
        throw Error(Errc::WrongPhase, "report is not awaiting audit");
    if (height <= *rec.commit_height || height - *rec.commit_height <= audit_timeout_)
        throw Error(Errc::TimeoutNotReached, "audit window still open");
    rec.phase = Phase::Published;
    rec.forced_publish = true;
    push_trace(rec, height, Event::ForcedPublish, Digest{});
}

std::optional<Rejection> LedgerState::apply(const Transaction& tx, std::uint64_t height, const Digest& tx_ref) {
    if (!tx.verify(chain_id_))
        return reject(RejectCode::BadSignature, "transaction signature invalid");
    if (carries_report_id(tx.kind) != tx.report_id.has_value())
        return reject(RejectCode::Malformed, "report id presence does not match kind");
    try {
        switch (tx.kind) {
        case TxKind::Announce: return apply_announce(tx, height, tx_ref);
        case TxKind::Commit: return apply_commit(tx, height, tx_ref);
        case TxKind::AuditDecision: return apply_audit(tx, height, tx_ref);
        case TxKind::Publish: return reject(RejectCode::WrongRole, "Publish is emitted by the ledger itself");
        case TxKind::StatusUpdate: return apply_status(tx, height, tx_ref);
        case TxKind::DeletionLog: return apply_deletion(tx, height, tx_ref);
        case TxKind::Vote: return apply_vote(tx, height, tx_ref);
        case TxKind::Comment: return apply_comment(tx, height, tx_ref);
        case TxKind::Merge: return apply_merge(tx, height, tx_ref);
        case TxKind::DisputeEvidence: return apply_dispute(tx, height, tx_ref);
        case TxKind::RegisterAuditor: return apply_register_auditor(tx, height);
        case TxKind::RegisterAuthority: return apply_register_authority(tx);
        }
    } catch (const Error& e) {
        return reject(RejectCode::Malformed, e.what());
    }
    return reject(RejectCode::Malformed, "unknown kind");
}

std::optional<Rejection> LedgerState::apply_announce(const Transaction& tx, std::uint64_t height, const Digest& ref) {
    auto p = decode_announce(tx.payload);
    if (p.report_hash != tx.report_id->digest)
        return reject(RejectCode::HashMismatch, "announced hash differs from report id");
    if (reports_.contains(*tx.report_id))
        return reject(RejectCode::WrongPhase, "report already announced");
    ReportRecord rec;
    rec.announcer = tx.sender;
    rec.announce_height = height;
    push_trace(rec, height, Event::Announce, ref);
    reports_.emplace(*tx.report_id, std::move(rec));
    return std::nullopt;
}

std::optional<Rejection> LedgerState::apply_commit(const Transaction& tx, std::uint64_t height, const Digest& ref) {
    auto it = reports_.find(*tx.report_id);
    if (it == reports_.end())
        return reject(RejectCode::UnknownReport, "commit without announce");
    auto& rec = it->second;
    if (tx.sender != rec.announcer)
        return reject(RejectCode::WrongRole, "only the announcing key may commit");
    if (rec.phase != Phase::Announced)
        return reject(RejectCode::WrongPhase, std::string("report is ") + std::string(to_string(rec.phase)));
    if (height < rec.announce_height + 2)
        return reject(RejectCode::WrongPhase, "auditor beacon block not yet produced");

    auto p = decode_commit(tx.payload);
    for (std::size_t i = 0; i < p.commitments.size(); ++i) {
        const auto& c = p.commitments[i];
        if (field_slot(c.field_tag) != i)
            return reject(RejectCode::Malformed, "commitments must be ordered L, P, D");
        if (c.signer_pk != tx.sender)
            return reject(RejectCode::WrongRole, "field signatures must come from the committing key");
        if (!c.verify(*tx.report_id))
            return reject(RejectCode::HashMismatch, "field signature does not bind the announced hash");
    }
    AuditorSelection expected;
    try {
        expected = expected_auditor(*tx.report_id);
    } catch (const Error& e) {
        return reject(RejectCode::AuditorMismatch, e.what());
    }
    if (p.auditor_index != expected.index)
        return reject(RejectCode::AuditorMismatch, "auditor index differs from chain selection");

    rec.phase = Phase::Committed;
    rec.commit_height = height;
    rec.type = p.type;
    rec.auditor_index = expected.index;
    rec.auditor = expected.key;
    rec.commitments = p.commitments;
    rec.storage_key = p.storage_key;
    push_trace(rec, height, Event::Commit, ref);
    return std::nullopt;
}

std::optional<Rejection> LedgerState::apply_audit(const Transaction& tx, std::uint64_t height, const Digest& ref) {
    auto it = reports_.find(*tx.report_id);
    if (it == reports_.end())
        return reject(RejectCode::UnknownReport, "audit of unknown report");
    auto& rec = it->second;
    if (rec.phase != Phase::Committed)
        return reject(RejectCode::WrongPhase, std::string("report is ") + std::string(to_string(rec.phase)));
    if (tx.sender != rec.auditor)
        return reject(RejectCode::AuditorMismatch, "sender is not the selected auditor");

    auto p = decode_audit(tx.payload, *tx.report_id);
    if (p.verdict == AuditVerdict::Publish) {
        const auto& fields = *p.fields;
        for (std::size_t i = 0; i < fields.size(); ++i)
            if (!rec.commitments[i].admits(fields[i]))
                return reject(RejectCode::InvalidRedaction,
                              std::string(to_string(static_cast<rss::FieldTag>(i))) + " does not verify against commitment");
        if (!std::holds_alternative<rss::Present>(fields[field_slot(rss::FieldTag::Picture)].slots.front()))
            return reject(RejectCode::InvalidRedaction, "picture scheme header must stay present");

        std::optional<GeoPoint> location;
        const auto& loc = fields[field_slot(rss::FieldTag::Location)].slots.front();
        if (const auto* present = std::get_if<rss::Present>(&loc)) {
            try {
                auto [lat, lon] = chunking::decode_location_chunk(present->chunk);
                if (GeoPoint{lat, lon}.valid())
                    location = GeoPoint{lat, lon};
            } catch (const Error&) {
                // a malformed signed location leaves the report unlocated
            }
        }

        rec.audit_tx = ref;
        rec.phase = Phase::Audited;
        push_trace(rec, height, Event::AuditDecision, ref);
        for (std::size_t i = 0; i < fields.size(); ++i)
            rec.redacted[i] = fields[i].redacted_indices();
        rec.location = location;
        rec.phase = Phase::Published;
        push_trace(rec, height, Event::Publish, Digest{});
    } else {
        rec.audit_tx = ref;
        rec.rejected = true;
        rec.phase = Phase::Audited;
        push_trace(rec, height, Event::AuditDecision, ref);
    }
    return std::nullopt;
}

std::optional<Rejection> LedgerState::apply_status(const Transaction& tx, std::uint64_t height, const Digest& ref) {
    auto it = reports_.find(*tx.report_id);
    if (it == reports_.end())
        return reject(RejectCode::UnknownReport, "status update for unknown report");
    auto& rec = it->second;
    auto p = decode_status(tx.payload);
    auto next = phase_for(p.status);
    if (!is_live_public(rec.phase) || next <= rec.phase)
        return reject(RejectCode::WrongPhase, std::string(to_string(rec.phase)) + " -> " + std::string(to_string(next)));
    if (auto r = check_authority(rec, tx.sender))
        return r;
    rec.phase = next;
    push_trace(rec, height, Event::StatusUpdate, ref);
    return std::nullopt;
}

std::optional<Rejection> LedgerState::apply_deletion(const Transaction& tx, std::uint64_t height, const Digest& ref) {
    auto it = reports_.find(*tx.report_id);
    if (it == reports_.end())
        return reject(RejectCode::UnknownReport, "deletion of unknown report");
    auto& rec = it->second;
    auto p = decode_deletion(tx.payload);
    bool deletable = is_live_public(rec.phase) || (rec.phase == Phase::Audited && rec.rejected);
    if (!deletable)
        return reject(RejectCode::WrongPhase, std::string("cannot delete a report that is ") +
                                                  std::string(to_string(rec.phase)));
    if (auto r = check_authority(rec, tx.sender))
        return r;
    rec.phase = Phase::Deleted;
    rec.deletion_reason = p.reason;
    push_trace(rec, height, Event::DeletionLog, ref);
    return std::nullopt;
}

std::optional<Rejection> LedgerState::apply_vote(const Transaction& tx, std::uint64_t height, const Digest& ref) {
    if (!tx.payload.empty())
        return reject(RejectCode::Malformed, "vote payload must be empty");
    auto it = reports_.find(*tx.report_id);
    if (it == reports_.end())
        return reject(RejectCode::UnknownReport, "vote for unknown report");
    // Votes for merged reports count towards the merge target.
    for (std::size_t hops = 0; it->second.merged_into && hops < reports_.size(); ++hops)
        it = reports_.find(*it->second.merged_into);
    auto& rec = it->second;
    if (!is_live_public(rec.phase))
        return reject(RejectCode::WrongPhase, "votes need a published, open report");
    if (rec.voters.contains(tx.sender))
        return reject(RejectCode::DuplicateVote, "key already voted on this report");
    rec.voters.insert(tx.sender);
    ++rec.votes;
    push_trace(rec, height, Event::Vote, ref);
    return std::nullopt;
}

std::optional<Rejection> LedgerState::apply_comment(const Transaction& tx, std::uint64_t height, const Digest& ref) {
    auto p = decode_comment(tx.payload);
    auto it = reports_.find(*tx.report_id);
    if (it == reports_.end())
        return reject(RejectCode::UnknownReport, "comment on unknown report");
    auto& rec = it->second;
    if (!is_live_public(rec.phase) && rec.phase != Phase::Resolved)
        return reject(RejectCode::WrongPhase, "comments need a published report");
    if (replayed(rec, ref))
        return reject(RejectCode::AlreadyExists, "comment already recorded");
    rec.comments.push_back(p.comment_digest);
    push_trace(rec, height, Event::Comment, ref);
    return std::nullopt;
}

std::optional<Rejection> LedgerState::apply_merge(const Transaction& tx, std::uint64_t height, const Digest& ref) {
    auto p = decode_merge(tx.payload);
    auto src = reports_.find(*tx.report_id);
    auto dst = reports_.find(p.target);
    if (src == reports_.end() || dst == reports_.end())
        return reject(RejectCode::UnknownReport, "merge references unknown report");
    if (src == dst)
        return reject(RejectCode::BadMergeTarget, "cannot merge a report into itself");
    if (!is_live_public(dst->second.phase))
        return reject(RejectCode::BadMergeTarget, "merge target must be published and open");
    if (!is_live_public(src->second.phase))
        return reject(RejectCode::WrongPhase, "merged report must be published and open");
    if (auto r = check_authority(src->second, tx.sender))
        return r;

    auto& source = src->second;
    auto& target = dst->second;
    target.merged_votes += source.score();
    source.phase = Phase::Deleted;
    source.deletion_reason = DeletionReason::Duplicate;
    source.merged_into = p.target;
    push_trace(source, height, Event::MergedInto, ref);
    push_trace(target, height, Event::Merge, ref);
    return std::nullopt;
}

std::optional<Rejection> LedgerState::apply_dispute(const Transaction& tx, std::uint64_t height, const Digest& ref) {
    auto p = decode_dispute(tx.payload);
    (void)p;
    auto it = reports_.find(*tx.report_id);
    if (it == reports_.end())
        return reject(RejectCode::UnknownReport, "dispute for unknown report");
    auto& rec = it->second;
    if (tx.sender != rec.announcer)
        return reject(RejectCode::WrongRole, "only the reporting citizen may file dispute evidence");
    if (rec.phase < Phase::Audited)
        return reject(RejectCode::WrongPhase, "nothing to dispute before the audit");
    if (replayed(rec, ref))
        return reject(RejectCode::AlreadyExists, "dispute evidence already recorded");
    rec.disputed = true;
    push_trace(rec, height, Event::DisputeEvidence, ref);
    return std::nullopt;
}

std::optional<Rejection> LedgerState::apply_register_auditor(const Transaction& tx, std::uint64_t height) {
    if (!is_member(tx.sender))
        return reject(RejectCode::WrongRole, "only consortium members register auditors");
    auto p = decode_register_auditor(tx.payload);
    for (const auto& a : auditors_.auditors)
        if (a.key == p.auditor)
            return reject(RejectCode::AlreadyExists, "auditor already registered");
    auditors_.auditors.push_back({p.auditor, height});
    return std::nullopt;
}

std::optional<Rejection> LedgerState::apply_register_authority(const Transaction& tx) {
    if (!is_member(tx.sender))
        return reject(RejectCode::WrongRole, "only consortium members register authorities");
    auto p = decode_register_authority(tx.payload);
    if (std::find(authorities_.entries.begin(), authorities_.entries.end(), p.entry) != authorities_.entries.end())
        return reject(RejectCode::AlreadyExists, "authority entry already registered");
    authorities_.entries.push_back(std::move(p.entry));
    return std::nullopt;
}

Bytes LedgerState::serialize() const {
    ByteWriter w;
    w.blob(chain_id_).u64(audit_timeout_).raw(genesis_hash_);
    w.u64(block_hashes_.size());
    for (const auto& h : block_hashes_)
        w.raw(h);
    w.u32(static_cast<std::uint32_t>(members_.size()));
    for (const auto& m : members_)
        w.raw(m.bytes);
    w.u32(static_cast<std::uint32_t>(auditors_.auditors.size()));
    for (const auto& a : auditors_.auditors)
        w.raw(a.key.bytes).u64(a.activation_height);
    w.u32(static_cast<std::uint32_t>(authorities_.entries.size()));
    for (const auto& e : authorities_.entries)
        encode_authority(w, e);
    w.u32(static_cast<std::uint32_t>(reports_.size()));
    for (const auto& [id, rec] : reports_) {
        w.raw(id.digest).u8(static_cast<std::uint8_t>(rec.phase)).raw(rec.announcer.bytes).u64(rec.announce_height);
        w.u8(rec.commit_height ? 1 : 0).u64(rec.commit_height.value_or(0));
        w.u8(static_cast<std::uint8_t>(rec.type)).u32(rec.auditor_index).raw(rec.auditor.bytes);
        for (const auto& c : rec.commitments)
            write_commitment(w, c);
        w.raw(rec.storage_key);
        w.u8(rec.audit_tx ? 1 : 0).raw(rec.audit_tx.value_or(Digest{}));
        w.u8(rec.rejected).u8(rec.forced_publish);
        for (const auto& set : rec.redacted) {
            w.u32(static_cast<std::uint32_t>(set.size()));
            for (auto i : set)
                w.u32(i);
        }
        w.u8(rec.location ? 1 : 0).i32(rec.location ? rec.location->lat : 0).i32(rec.location ? rec.location->lon : 0);
        w.u64(rec.votes).u64(rec.merged_votes).u32(static_cast<std::uint32_t>(rec.voters.size()));
        for (const auto& v : rec.voters)
            w.raw(v.bytes);
        w.u8(rec.merged_into ? 1 : 0).raw(rec.merged_into.value_or(ReportId{}).digest);
        w.u32(static_cast<std::uint32_t>(rec.comments.size()));
        for (const auto& c : rec.comments)
            w.raw(c);
        w.u8(rec.disputed).u8(rec.deletion_reason ? static_cast<std::uint8_t>(*rec.deletion_reason) : 0xFF);
        w.u32(static_cast<std::uint32_t>(rec.trace.size()));
        for (const auto& t : rec.trace)
            w.u64(t.height).u8(static_cast<std::uint8_t>(t.event)).raw(t.tx_ref).u8(static_cast<std::uint8_t>(t.phase));
    }
    return std::move(w).take();
}

ApplyOutcome apply_tx(const LedgerState& state, const Transaction& tx, std::uint64_t height) {
    LedgerState next = state;
    if (auto r = next.apply(tx, height, tx.ref()))
        return {std::nullopt, std::move(r)};
    return {std::move(next), std::nullopt};
}

std::optional<std::string> check_block_header(const LedgerState& state, const Block& block) {
    const auto& h = block.header;
    if (h.height != state.height())
        return "expected height " + std::to_string(state.height()) + ", got " + std::to_string(h.height);
    if (h.prev_hash != state.head_hash())
        return "prev_hash does not link to the previous block";
    if (h.producer != state.producer_for(h.height))
        return "producer is not the member whose turn it is";
    if (block.txs.size() > kMaxBlockTxs)
        return "too many transactions";
    if (tx_merkle_root(block.txs) != h.tx_root)
        return "transaction merkle root mismatch";
    if (header_hash(h) != block.hash)
        return "block hash mismatch";
    if (!verify_signature(h.producer, block.hash, block.producer_signature))
        return "producer signature invalid";
    return std::nullopt;
}

std::optional<std::string> apply_block(LedgerState& state, const Block& block) {
    if (auto err = check_block_header(state, block))
        return err;
    state.begin_block(block.header.height);
    for (std::size_t i = 0; i < block.txs.size(); ++i) {
        const auto& tx = block.txs[i];
        if (auto r = state.apply(tx, block.header.height, tx.ref()))
            return "transaction " + std::to_string(i) + " (" + std::string(to_string(tx.kind)) +
                   ") rejected: " + std::string(to_string(r->code)) + " " + r->detail;
    }
    state.end_block(block.hash);
    return std::nullopt;
}

ChainVerdict validate_chain(const Genesis& genesis, const std::vector<Block>& blocks) {
    LedgerState state(genesis);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (auto err = apply_block(state, blocks[i]))
            return {std::nullopt, i, *err};
    }
    return {std::move(state), std::nullopt, {}};
}

ChainVerdict validate_chain(const Genesis& genesis, const std::vector<Bytes>& encoded_blocks) {
    LedgerState state(genesis);
    for (std::size_t i = 0; i < encoded_blocks.size(); ++i) {
        std::optional<std::string> err;
        try {
            err = apply_block(state, decode_block(encoded_blocks[i]));
        } catch (const Error& e) {
            err = std::string("undecodable block: ") + e.what();
        }
        if (err)
            return {std::nullopt, i, *err};
    }
    return {std::move(state), std::nullopt, {}};
}

std::optional<std::size_t> choose_fork(const Genesis& genesis, const std::vector<std::vector<Block>>& candidates) {
    std::optional<std::size_t> best;
    std::size_t best_len = 0;
    Digest best_head{};
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        auto verdict = validate_chain(genesis, candidates[i]);
        if (!verdict.valid())
            continue;
        auto len = candidates[i].size();
        auto head = verdict.state->head_hash();
        if (!best || len > best_len || (len == best_len && head < best_head)) {
            best = i;
            best_len = len;
            best_head = head;
        }
    }
    return best;
}

} // namespace acrp::ledger
