#pragma once

// JSON renderings shared by the HTTP server and the CLI. Digests and keys are
// lowercase hex, binary blobs base64, coordinates integer microdegrees.

#include <optional>

#include <json.hpp>

#include "acrp/community.hpp"
#include "acrp/ledger_state.hpp"

namespace acrp::gateway {

using json = nlohmann::json;

json tx_json(const ledger::Transaction& tx);
json block_json(const ledger::Block& block);
json commitment_json(const SignatureCommitment& c);
json scheme_json(const chunking::ChunkingScheme& scheme);

/// Slots, redacted indices and the verifiable wire encoding of one field, plus a decoded
/// convenience value (location point, description text with redactions marked, picture geometry).
json field_json(const rss::RedactedMessage& msg);

json record_summary(const ReportId& id, const ledger::ReportRecord& rec);
/// Summary plus commitments, trace, comments and, once public, the published fields.
json report_view(const ReportId& id, const ledger::ReportRecord& rec, const std::optional<RedactedFields>& fields);

json duplicate_json(const community::DuplicateCandidate& c);

/// Placeholder substituted for redacted description chunks in `field_json(...)["text"]`.
inline constexpr std::string_view kRedactedText = "███";

} // namespace acrp::gateway
