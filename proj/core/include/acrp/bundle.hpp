#pragma once

// A citizen's signed report: the report tuple plus one redactable signature per
// disclosed field (location, picture, description), all bound to the report id.

#include <array>
#include <optional>
#include <set>

#include "acrp/report.hpp"
#include "acrp/rss.hpp"

namespace acrp {

using FieldMessages = std::array<rss::ChunkedMessage, 3>;
using FieldSignatures = std::array<rss::RedactableSignature, 3>;
using RedactedFields = std::array<rss::RedactedMessage, 3>;

constexpr std::size_t field_slot(rss::FieldTag tag) { return static_cast<std::size_t>(tag); }

FieldMessages field_messages(const Report& r, chunking::TextGranularity granularity);

struct ReportBundle {
    Report report;
    chunking::TextGranularity granularity = chunking::TextGranularity::Words;
    FieldSignatures signatures;

    bool operator==(const ReportBundle&) const = default;

    ReportId id() const { return report_id(report); }
};

/// `seed` makes the per-field root seeds reproducible; omit it outside tests.
ReportBundle sign_report(const SigningKey& sk, Report report, chunking::TextGranularity granularity,
                         std::optional<Bytes> seed = std::nullopt);

bool verify_bundle(const ReportBundle& bundle);

Bytes encode_bundle(const ReportBundle& bundle);
ReportBundle decode_bundle(ByteView bytes);

/// On-chain form of a field signature; the root seed stays off-chain.
struct SignatureCommitment {
    rss::FieldTag field_tag = rss::FieldTag::Location;
    std::uint32_t n = 0;
    Digest root{};
    Signature root_signature;
    PublicKey signer_pk;

    bool operator==(const SignatureCommitment&) const = default;

    /// Root signature valid for this report id.
    bool verify(const ReportId& id) const;
    /// `msg` verifies and is a redaction of exactly this commitment.
    bool admits(const rss::RedactedMessage& msg) const;
};

using FieldCommitments = std::array<SignatureCommitment, 3>;

FieldCommitments commitments(const ReportBundle& bundle);

/// Redaction sets per field. Picture indices count cells/regions; the scheme header is never redactable.
struct RedactionRequest {
    bool location = false;
    std::set<std::uint32_t> picture_cells;
    std::set<std::uint32_t> description_chunks;

    bool empty() const { return !location && picture_cells.empty() && description_chunks.empty(); }
};

RedactedFields redact_bundle(const ReportBundle& bundle, const RedactionRequest& request);

} // namespace acrp
