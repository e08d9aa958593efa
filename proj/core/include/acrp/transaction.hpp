#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "acrp/bundle.hpp"
#include "acrp/crypto.hpp"
#include "acrp/report.hpp"

namespace acrp::ledger {

enum class TxKind : std::uint8_t {
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
    RegisterAuditor = 10,
    RegisterAuthority = 11,
};

inline constexpr std::uint8_t kTxKindCount = 12;

std::string_view to_string(TxKind kind);

/// Kinds that act on a report carry its id; registrations do not.
constexpr bool carries_report_id(TxKind kind) {
    return kind != TxKind::RegisterAuditor && kind != TxKind::RegisterAuthority;
}

struct Transaction {
    TxKind kind = TxKind::Announce;
    std::optional<ReportId> report_id;
    Bytes payload;
    PublicKey sender;
    Signature signature;

    bool operator==(const Transaction&) const = default;

    static Transaction make(TxKind kind, std::optional<ReportId> report_id, Bytes payload, const SigningKey& sk,
                            std::string_view chain_id);

    bool verify(std::string_view chain_id) const;
    /// Digest of the encoded transaction; the handle clients poll with.
    Digest ref() const;
};

/// kind:u8 | has_id:u8 | [id] | payload (u32-prefixed) | chain_id (u32-prefixed)
Bytes signing_preimage(TxKind kind, const std::optional<ReportId>& id, ByteView payload, std::string_view chain_id);

Bytes encode(const Transaction& tx);
Transaction decode_transaction(ByteView bytes);
void encode_to(ByteWriter& w, const Transaction& tx);

// Payloads ------------------------------------------------------------------

enum class HandlingStatus : std::uint8_t { Acknowledged = 0, InProgress = 1, Resolved = 2 };
enum class DeletionReason : std::uint8_t { NotActionable = 0, IllicitContent = 1, Duplicate = 2 };
enum class AuditVerdict : std::uint8_t { Publish = 0, Reject = 1 };
enum class RejectReason : std::uint8_t { LowQuality = 0, Forged = 1, IllicitContent = 2, Spam = 3 };
enum class DisputeVerdict : std::uint8_t { Consistent = 0, AlteredContent = 1, HashMismatch = 2 };

std::string_view to_string(HandlingStatus s);
std::string_view to_string(DeletionReason r);
std::string_view to_string(RejectReason r);
std::string_view to_string(DisputeVerdict v);
HandlingStatus parse_status(std::string_view s);
DeletionReason parse_deletion_reason(std::string_view s);
RejectReason parse_reject_reason(std::string_view s);

struct AnnouncePayload {
    Digest report_hash{};
};

struct CommitPayload {
    ReportType type = ReportType::Other;
    std::uint32_t auditor_index = 0;
    FieldCommitments commitments;
    Digest storage_key{};
};

struct AuditDecisionPayload {
    AuditVerdict verdict = AuditVerdict::Publish;
    std::optional<RedactedFields> fields;  // present iff verdict == Publish
    RejectReason reject_reason = RejectReason::LowQuality;
    std::string note;
};

struct StatusPayload {
    HandlingStatus status = HandlingStatus::Acknowledged;
    std::string note;
};

struct DeletionPayload {
    DeletionReason reason = DeletionReason::NotActionable;
    std::string note;
};

struct CommentPayload {
    Digest comment_digest{};
};

struct MergePayload {
    ReportId target;
};

struct DisputePayload {
    Digest original_key{};
    DisputeVerdict verdict = DisputeVerdict::Consistent;
};

struct RegisterAuditorPayload {
    PublicKey auditor;
};

struct RegisterAuthorityPayload {
    AuthorityEntry entry;
};

Bytes encode_payload(const AnnouncePayload& p);
Bytes encode_payload(const CommitPayload& p);
Bytes encode_payload(const AuditDecisionPayload& p);
Bytes encode_payload(const StatusPayload& p);
Bytes encode_payload(const DeletionPayload& p);
Bytes encode_payload(const CommentPayload& p);
Bytes encode_payload(const MergePayload& p);
Bytes encode_payload(const DisputePayload& p);
Bytes encode_payload(const RegisterAuditorPayload& p);
Bytes encode_payload(const RegisterAuthorityPayload& p);

AnnouncePayload decode_announce(ByteView b);
CommitPayload decode_commit(ByteView b);
AuditDecisionPayload decode_audit(ByteView b, const ReportId& context);
StatusPayload decode_status(ByteView b);
DeletionPayload decode_deletion(ByteView b);
CommentPayload decode_comment(ByteView b);
MergePayload decode_merge(ByteView b);
DisputePayload decode_dispute(ByteView b);
RegisterAuditorPayload decode_register_auditor(ByteView b);
RegisterAuthorityPayload decode_register_authority(ByteView b);

void encode_authority(ByteWriter& w, const AuthorityEntry& e);
AuthorityEntry decode_authority(ByteReader& r);

} // namespace acrp::ledger
