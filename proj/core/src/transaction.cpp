#include "acrp/transaction.hpp"

#include <array>

namespace acrp::ledger {
namespace {

constexpr std::size_t kMaxPayload = 32u << 20;
constexpr std::size_t kMaxNote = 4096;
constexpr std::uint8_t kAnyType = 0xFF;

constexpr std::array<std::string_view, kTxKindCount> kKindNames{
    "Announce", "Commit",  "AuditDecision", "Publish",         "StatusUpdate",    "DeletionLog",
    "Vote",     "Comment", "Merge",         "DisputeEvidence", "RegisterAuditor", "RegisterAuthority"};

constexpr std::array<std::string_view, 3> kStatusNames{"Acknowledged", "InProgress", "Resolved"};
constexpr std::array<std::string_view, 3> kDeletionNames{"NotActionable", "IllicitContent", "Duplicate"};
constexpr std::array<std::string_view, 4> kRejectNames{"LowQuality", "Forged", "IllicitContent", "Spam"};
constexpr std::array<std::string_view, 3> kVerdictNames{"Consistent", "AlteredContent", "HashMismatch"};

template <typename E, std::size_t N>
E parse_enum(const std::array<std::string_view, N>& names, std::string_view s, const char* what) {
    for (std::size_t i = 0; i < N; ++i)
        if (names[i] == s)
            return static_cast<E>(i);
    throw Error(Errc::Malformed, std::string("unknown ") + what + " '" + std::string(s) + "'");
}

template <typename E, std::size_t N>
E checked_enum(std::uint8_t v, const std::array<std::string_view, N>&) {
    if (v >= N)
        throw Error(Errc::Malformed, "enum value out of range");
    return static_cast<E>(v);
}

template <typename Fn>
auto decode_whole(ByteView b, Fn&& fn) {
    ByteReader r(b);
    auto out = fn(r);
    r.expect_end();
    return out;
}

void encode_commitment(ByteWriter& w, const SignatureCommitment& c) {
    w.u8(static_cast<std::uint8_t>(c.field_tag)).u32(c.n).raw(c.root).raw(c.root_signature.bytes).raw(c.signer_pk.bytes);
}

SignatureCommitment decode_commitment(ByteReader& r) {
    SignatureCommitment c;
    auto tag = r.u8();
    if (tag > 2)
        throw Error(Errc::Malformed, "unknown field tag");
    c.field_tag = static_cast<rss::FieldTag>(tag);
    c.n = r.u32();
    c.root = r.fixed<32>();
    c.root_signature.bytes = r.fixed<64>();
    c.signer_pk.bytes = r.fixed<32>();
    return c;
}

void write_point(ByteWriter& w, const GeoPoint& p) { w.i32(p.lat).i32(p.lon); }

GeoPoint read_point(ByteReader& r) {
    GeoPoint p;
    p.lat = r.i32();
    p.lon = r.i32();
    return p;
}

} // namespace

std::string_view to_string(TxKind kind) {
    auto i = static_cast<std::size_t>(kind);
    return i < kKindNames.size() ? kKindNames[i] : "Invalid";
}

std::string_view to_string(HandlingStatus s) { return kStatusNames.at(static_cast<std::size_t>(s)); }
std::string_view to_string(DeletionReason r) { return kDeletionNames.at(static_cast<std::size_t>(r)); }
std::string_view to_string(RejectReason r) { return kRejectNames.at(static_cast<std::size_t>(r)); }
std::string_view to_string(DisputeVerdict v) { return kVerdictNames.at(static_cast<std::size_t>(v)); }

HandlingStatus parse_status(std::string_view s) { return parse_enum<HandlingStatus>(kStatusNames, s, "status"); }
DeletionReason parse_deletion_reason(std::string_view s) {
    return parse_enum<DeletionReason>(kDeletionNames, s, "deletion reason");
}
RejectReason parse_reject_reason(std::string_view s) {
    return parse_enum<RejectReason>(kRejectNames, s, "reject reason");
}

Bytes signing_preimage(TxKind kind, const std::optional<ReportId>& id, ByteView payload, std::string_view chain_id) {
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(kind));
    if (id) {
        w.u8(1).raw(id->digest);
    } else {
        w.u8(0);
    }
    w.blob(payload).blob(chain_id);
    return std::move(w).take();
}

Transaction Transaction::make(TxKind kind, std::optional<ReportId> report_id, Bytes payload, const SigningKey& sk,
                              std::string_view chain_id) {
    Transaction tx{kind, report_id, std::move(payload), sk.public_key(), {}};
    tx.signature = sk.sign(signing_preimage(kind, tx.report_id, tx.payload, chain_id));
    return tx;
}

bool Transaction::verify(std::string_view chain_id) const {
    return verify_signature(sender, signing_preimage(kind, report_id, payload, chain_id), signature);
}

Digest Transaction::ref() const { return sha256(encode(*this)); }

void encode_to(ByteWriter& w, const Transaction& tx) {
    w.u8(static_cast<std::uint8_t>(tx.kind));
    if (tx.report_id) {
        w.u8(1).raw(tx.report_id->digest);
    } else {
        w.u8(0);
    }
    w.blob(tx.payload).raw(tx.sender.bytes).raw(tx.signature.bytes);
}

Bytes encode(const Transaction& tx) {
    ByteWriter w;
    encode_to(w, tx);
    return std::move(w).take();
}

Transaction decode_transaction(ByteView bytes) {
    ByteReader r(bytes);
    Transaction tx;
    auto kind = r.u8();
    if (kind >= kTxKindCount)
        throw Error(Errc::Malformed, "unknown transaction kind");
    tx.kind = static_cast<TxKind>(kind);
    auto has_id = r.u8();
    if (has_id > 1)
        throw Error(Errc::Malformed, "bad report id flag");
    if (has_id == 1)
        tx.report_id = ReportId{r.fixed<32>()};
    auto payload = r.blob(kMaxPayload);
    tx.payload.assign(payload.begin(), payload.end());
    tx.sender.bytes = r.fixed<32>();
    tx.signature.bytes = r.fixed<64>();
    r.expect_end();
    return tx;
}

Bytes encode_payload(const AnnouncePayload& p) { return {p.report_hash.begin(), p.report_hash.end()}; }

Bytes encode_payload(const CommitPayload& p) {
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(p.type)).u32(p.auditor_index);
    for (const auto& c : p.commitments)
        encode_commitment(w, c);
    w.raw(p.storage_key);
    return std::move(w).take();
}

Bytes encode_payload(const AuditDecisionPayload& p) {
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(p.verdict));
    if (p.verdict == AuditVerdict::Publish) {
        if (!p.fields)
            throw Error(Errc::Malformed, "publish decision needs redacted fields");
        for (const auto& f : *p.fields)
            rss::encode_to(w, f);
    } else {
        w.u8(static_cast<std::uint8_t>(p.reject_reason));
    }
    w.blob(p.note);
    return std::move(w).take();
}

Bytes encode_payload(const StatusPayload& p) {
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(p.status)).blob(p.note);
    return std::move(w).take();
}

Bytes encode_payload(const DeletionPayload& p) {
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(p.reason)).blob(p.note);
    return std::move(w).take();
}

Bytes encode_payload(const CommentPayload& p) { return {p.comment_digest.begin(), p.comment_digest.end()}; }

Bytes encode_payload(const MergePayload& p) { return {p.target.digest.begin(), p.target.digest.end()}; }

Bytes encode_payload(const DisputePayload& p) {
    ByteWriter w;
    w.raw(p.original_key).u8(static_cast<std::uint8_t>(p.verdict));
    return std::move(w).take();
}

Bytes encode_payload(const RegisterAuditorPayload& p) { return {p.auditor.bytes.begin(), p.auditor.bytes.end()}; }

Bytes encode_payload(const RegisterAuthorityPayload& p) {
    ByteWriter w;
    encode_authority(w, p.entry);
    return std::move(w).take();
}

void encode_authority(ByteWriter& w, const AuthorityEntry& e) {
    w.blob(e.name);
    w.u8(e.type ? static_cast<std::uint8_t>(*e.type) : kAnyType);
    if (!e.region) {
        w.u8(0);
    } else if (const auto* box = std::get_if<BoundingBox>(&*e.region)) {
        w.u8(1);
        write_point(w, box->min);
        write_point(w, box->max);
    } else {
        const auto& poly = std::get<Polygon>(*e.region);
        w.u8(2).u32(static_cast<std::uint32_t>(poly.vertices.size()));
        for (const auto& v : poly.vertices)
            write_point(w, v);
    }
    w.raw(e.authority.bytes);
}

AuthorityEntry decode_authority(ByteReader& r) {
    AuthorityEntry e;
    e.name = r.str(256);
    auto type = r.u8();
    if (type != kAnyType) {
        if (type >= kReportTypeCount)
            throw Error(Errc::Malformed, "unknown report type");
        e.type = static_cast<ReportType>(type);
    }
    auto region = r.u8();
    if (region == 1) {
        BoundingBox box;
        box.min = read_point(r);
        box.max = read_point(r);
        e.region = box;
    } else if (region == 2) {
        Polygon poly;
        auto n = r.u32();
        if (n > 4096)
            throw Error(Errc::Malformed, "polygon too large");
        for (std::uint32_t i = 0; i < n; ++i)
            poly.vertices.push_back(read_point(r));
        e.region = poly;
    } else if (region != 0) {
        throw Error(Errc::Malformed, "unknown region kind");
    }
    e.authority.bytes = r.fixed<32>();
    return e;
}

AnnouncePayload decode_announce(ByteView b) {
    return decode_whole(b, [](ByteReader& r) { return AnnouncePayload{r.fixed<32>()}; });
}

CommitPayload decode_commit(ByteView b) {
    return decode_whole(b, [](ByteReader& r) {
        CommitPayload p;
        auto type = r.u8();
        if (type >= kReportTypeCount)
            throw Error(Errc::Malformed, "unknown report type");
        p.type = static_cast<ReportType>(type);
        p.auditor_index = r.u32();
        for (auto& c : p.commitments)
            c = decode_commitment(r);
        p.storage_key = r.fixed<32>();
        return p;
    });
}

AuditDecisionPayload decode_audit(ByteView b, const ReportId& context) {
    return decode_whole(b, [&](ByteReader& r) {
        AuditDecisionPayload p;
        auto verdict = r.u8();
        if (verdict == static_cast<std::uint8_t>(AuditVerdict::Publish)) {
            p.verdict = AuditVerdict::Publish;
            RedactedFields fields;
            for (auto& f : fields)
                f = rss::decode_from(r, context.digest);
            p.fields = std::move(fields);
        } else if (verdict == static_cast<std::uint8_t>(AuditVerdict::Reject)) {
            p.verdict = AuditVerdict::Reject;
            p.reject_reason = checked_enum<RejectReason>(r.u8(), kRejectNames);
        } else {
            throw Error(Errc::Malformed, "unknown audit verdict");
        }
        p.note = r.str(kMaxNote);
        return p;
    });
}

StatusPayload decode_status(ByteView b) {
    return decode_whole(b, [](ByteReader& r) {
        StatusPayload p;
        p.status = checked_enum<HandlingStatus>(r.u8(), kStatusNames);
        p.note = r.str(kMaxNote);
        return p;
    });
}

DeletionPayload decode_deletion(ByteView b) {
    return decode_whole(b, [](ByteReader& r) {
        DeletionPayload p;
        p.reason = checked_enum<DeletionReason>(r.u8(), kDeletionNames);
        p.note = r.str(kMaxNote);
        return p;
    });
}

CommentPayload decode_comment(ByteView b) {
    return decode_whole(b, [](ByteReader& r) { return CommentPayload{r.fixed<32>()}; });
}

MergePayload decode_merge(ByteView b) {
    return decode_whole(b, [](ByteReader& r) { return MergePayload{ReportId{r.fixed<32>()}}; });
}

DisputePayload decode_dispute(ByteView b) {
    return decode_whole(b, [](ByteReader& r) {
        DisputePayload p;
        p.original_key = r.fixed<32>();
        p.verdict = checked_enum<DisputeVerdict>(r.u8(), kVerdictNames);
        return p;
    });
}

RegisterAuditorPayload decode_register_auditor(ByteView b) {
    return decode_whole(b, [](ByteReader& r) { return RegisterAuditorPayload{PublicKey{r.fixed<32>()}}; });
}

RegisterAuthorityPayload decode_register_authority(ByteView b) {
    return decode_whole(b, [](ByteReader& r) { return RegisterAuthorityPayload{decode_authority(r)}; });
}

} // namespace acrp::ledger
