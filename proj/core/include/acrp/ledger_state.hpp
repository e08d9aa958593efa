#pragma once

// Report lifecycle state machine. LedgerState is a pure fold of apply() over
// the blocks of a chain; nothing in it depends on wall-clock time or on the
// order in which transactions reached a node.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "acrp/block.hpp"
#include "acrp/genesis.hpp"

namespace acrp::ledger {

enum class Phase : std::uint8_t {
    Announced = 0,
    Committed = 1,
    Audited = 2,
    Published = 3,
    Acknowledged = 4,
    InProgress = 5,
    Resolved = 6,
    Deleted = 7,
};

std::string_view to_string(Phase p);
Phase parse_phase(std::string_view s);

constexpr bool is_terminal(Phase p) { return p == Phase::Resolved || p == Phase::Deleted; }
/// Published and not yet terminal.
constexpr bool is_live_public(Phase p) {
    return p == Phase::Published || p == Phase::Acknowledged || p == Phase::InProgress;
}

enum class RejectCode : std::uint8_t {
    WrongPhase,
    WrongRole,
    HashMismatch,
    BadSignature,
    UnknownReport,
    AuditorMismatch,
    InvalidRedaction,
    Malformed,
    DuplicateVote,
    BadMergeTarget,
    AlreadyExists,
};

std::string_view to_string(RejectCode c);

struct Rejection {
    RejectCode code;
    std::string detail;
};

/// Lifecycle events recorded per report; tx kinds plus the automatic ones.
enum class Event : std::uint8_t {
    Announce = 0,
    Commit = 1,
    AuditDecision = 2,
    Publish = 3,
    StatusUpdate = 4,
    DeletionLog = 5,
    Vote = 6,
    Comment = 7,
    Merge = 8,
    DisputeEvidence = 9,
    MergedInto = 20,
    ForcedPublish = 21,
};

std::string_view to_string(Event e);

struct TraceEntry {
    std::uint64_t height = 0;
    Event event = Event::Announce;
    Digest tx_ref{};  // zero for automatic events
    Phase phase = Phase::Announced;

    bool operator==(const TraceEntry&) const = default;
};

struct ReportRecord {
    Phase phase = Phase::Announced;
    PublicKey announcer;
    std::uint64_t announce_height = 0;

    std::optional<std::uint64_t> commit_height;
    ReportType type = ReportType::Other;
    std::uint32_t auditor_index = 0;
    PublicKey auditor;
    FieldCommitments commitments;
    Digest storage_key{};

    std::optional<Digest> audit_tx;
    bool rejected = false;
    bool forced_publish = false;
    std::array<std::set<std::uint32_t>, 3> redacted;  // chunk indices per field
    std::optional<GeoPoint> location;                 // only when published unredacted

    std::uint64_t votes = 0;
    std::uint64_t merged_votes = 0;
    std::set<PublicKey> voters;
    std::optional<ReportId> merged_into;
    std::vector<Digest> comments;
    bool disputed = false;
    std::optional<DeletionReason> deletion_reason;
    std::vector<TraceEntry> trace;

    bool operator==(const ReportRecord&) const = default;

    std::uint64_t score() const { return votes + merged_votes; }
};

class LedgerState {
public:
    LedgerState() = default;
    explicit LedgerState(const Genesis& genesis);

    // Block-level driving. begin_block sweeps expired audits, end_block records the hash.
    void begin_block(std::uint64_t height);
    std::optional<Rejection> apply(const Transaction& tx, std::uint64_t height, const Digest& tx_ref);
    void end_block(const Digest& block_hash);

    /// Committed report whose audit window (audit_timeout blocks) has elapsed at `height` becomes
    /// Published without redaction. Throws UnknownReport / WrongPhase / TimeoutNotReached.
    void force_publish(const ReportId& id, std::uint64_t height);

    /// Recompute the auditor for a report from chain data alone.
    AuditorSelection expected_auditor(const ReportId& id) const;

    /// Authority responsible for a report; nullopt means manual routing (any directory key).
    std::optional<PublicKey> responsible_authority(const ReportRecord& rec) const;

    const std::string& chain_id() const { return chain_id_; }
    std::uint64_t audit_timeout() const { return audit_timeout_; }
    /// Number of applied blocks; the next block's height.
    std::uint64_t height() const { return block_hashes_.size(); }
    const Digest& head_hash() const { return block_hashes_.empty() ? genesis_hash_ : block_hashes_.back(); }
    const std::vector<Digest>& block_hashes() const { return block_hashes_; }
    const std::vector<PublicKey>& members() const { return members_; }
    const AuditorRegistry& auditors() const { return auditors_; }
    const AuthorityDirectory& authorities() const { return authorities_; }
    const std::map<ReportId, ReportRecord>& reports() const { return reports_; }
    const ReportRecord* find(const ReportId& id) const;
    const PublicKey& producer_for(std::uint64_t height) const { return members_.at(height % members_.size()); }

    /// Deterministic byte image for replay comparisons.
    Bytes serialize() const;

    bool operator==(const LedgerState&) const = default;

private:
    std::optional<Rejection> apply_announce(const Transaction& tx, std::uint64_t height, const Digest& ref);
    std::optional<Rejection> apply_commit(const Transaction& tx, std::uint64_t height, const Digest& ref);
    std::optional<Rejection> apply_audit(const Transaction& tx, std::uint64_t height, const Digest& ref);
    std::optional<Rejection> apply_status(const Transaction& tx, std::uint64_t height, const Digest& ref);
    std::optional<Rejection> apply_deletion(const Transaction& tx, std::uint64_t height, const Digest& ref);
    std::optional<Rejection> apply_vote(const Transaction& tx, std::uint64_t height, const Digest& ref);
    std::optional<Rejection> apply_comment(const Transaction& tx, std::uint64_t height, const Digest& ref);
    std::optional<Rejection> apply_merge(const Transaction& tx, std::uint64_t height, const Digest& ref);
    std::optional<Rejection> apply_dispute(const Transaction& tx, std::uint64_t height, const Digest& ref);
    std::optional<Rejection> apply_register_auditor(const Transaction& tx, std::uint64_t height);
    std::optional<Rejection> apply_register_authority(const Transaction& tx);

    std::optional<Rejection> check_authority(const ReportRecord& rec, const PublicKey& sender) const;
    bool is_member(const PublicKey& pk) const;

    std::string chain_id_;
    std::uint64_t audit_timeout_ = 20;
    Digest genesis_hash_{};
    std::vector<Digest> block_hashes_;
    std::vector<PublicKey> members_;
    AuditorRegistry auditors_;
    AuthorityDirectory authorities_;
    std::map<ReportId, ReportRecord> reports_;
};

/// Functional form: the successor state, or the rejection. Copies the state.
struct ApplyOutcome {
    std::optional<LedgerState> state;
    std::optional<Rejection> rejection;
};
ApplyOutcome apply_tx(const LedgerState& state, const Transaction& tx, std::uint64_t height);

/// Structural checks independent of transaction semantics: height, parent, producer turn,
/// tx root, block hash, producer signature, tx signatures.
std::optional<std::string> check_block_header(const LedgerState& state, const Block& block);

/// check_block_header, then apply every tx. Rejects the whole block on the first failure.
std::optional<std::string> apply_block(LedgerState& state, const Block& block);

struct ChainVerdict {
    std::optional<LedgerState> state;          // set when every block is valid
    std::optional<std::uint64_t> invalid_height;
    std::string reason;

    bool valid() const { return state.has_value(); }
};

ChainVerdict validate_chain(const Genesis& genesis, const std::vector<Block>& blocks);
/// Same, from raw block encodings (decoding failures count as invalid blocks).
ChainVerdict validate_chain(const Genesis& genesis, const std::vector<Bytes>& encoded_blocks);

/// Longest valid chain; ties broken by the lowest head hash. Returns the index into `candidates`.
std::optional<std::size_t> choose_fork(const Genesis& genesis, const std::vector<std::vector<Block>>& candidates);

} // namespace acrp::ledger
