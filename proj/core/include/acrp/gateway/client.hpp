#pragma once

// Client side of the HTTP API plus the multi-step flows the CLI drives. All signing and the
// auditor-selection recomputation happen here; nothing the gateway says about integrity is
// taken on trust.

#include <chrono>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "acrp/gateway/json_views.hpp"

namespace httplib {
class Client;
}

namespace acrp::gateway {

class ApiError : public std::runtime_error {
public:
    ApiError(int status, std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), status_(status), code_(std::move(code)) {}

    /// HTTP status, or 0 when the node could not be reached.
    int status() const { return status_; }
    const std::string& code() const { return code_; }

private:
    int status_;
    std::string code_;
};

struct TxStatus {
    std::string status;  // pending | included | rejected
    std::optional<std::uint64_t> height;
    std::string error;
    std::string message;
};

class GatewayClient {
public:
    /// `base_url` like "http://127.0.0.1:8080".
    explicit GatewayClient(const std::string& base_url, std::chrono::seconds timeout = std::chrono::seconds(10));
    ~GatewayClient();

    json get(const std::string& path);
    json post(const std::string& path, const json& body);

    /// POSTs {"tx": base64} and returns the tx ref.
    Digest submit(const std::string& path, const ledger::Transaction& tx, json extra = json::object());

    Digest put_blob(ByteView value);
    /// Signed read when `reader` is given (needed for report originals).
    Bytes get_blob(const Digest& key, const SigningKey* reader = nullptr, std::string_view chain_id = {});

    json head() { return get("/v1/chain/head"); }
    json consortium() { return get("/v1/consortium"); }
    json block(std::uint64_t height) { return get("/v1/chain/blocks/" + std::to_string(height)); }
    json report(const ReportId& id) { return get("/v1/reports/" + id.hex()); }

    TxStatus tx_status(const Digest& ref);
    /// Polls until included; throws ApiError with the ledger code when rejected, or on timeout.
    std::uint64_t wait_for_tx(const Digest& ref, std::chrono::milliseconds timeout,
                              std::chrono::milliseconds poll = std::chrono::milliseconds(200));
    /// Polls until the chain has at least `height` blocks.
    void wait_for_height(std::uint64_t height, std::chrono::milliseconds timeout,
                         std::chrono::milliseconds poll = std::chrono::milliseconds(200));

private:
    std::unique_ptr<httplib::Client> http_;
};

/// Recomputes the auditor of a report from blocks and registrations served by the node.
AuditorSelection recompute_auditor(GatewayClient& client, const ReportId& id, std::uint64_t announce_height);

struct FileOutcome {
    ReportId id;
    Digest announce_tx{};
    Digest commit_tx{};
    Digest storage_key{};
    AuditorSelection auditor;
    std::uint64_t announce_height = 0;
};

/// Announce, wait for inclusion and the beacon block, select the auditor, commit, upload.
FileOutcome file_report(GatewayClient& client, const SigningKey& citizen, const ReportBundle& bundle,
                        std::chrono::milliseconds timeout);

struct AuditChoice {
    std::optional<RedactionRequest> publish;  // nullopt: reject
    ledger::RejectReason reject_reason = ledger::RejectReason::LowQuality;
    std::string note;
};

/// Fetches the original through a signed read, checks it against the on-chain commitments,
/// redacts and submits the decision. Returns the tx ref.
Digest audit_report(GatewayClient& client, const SigningKey& auditor, const ReportId& id, const AuditChoice& choice);

struct DisputeOutcome {
    ledger::DisputeVerdict verdict = ledger::DisputeVerdict::Consistent;
    json response;
};

/// Posts the citizen's original to the dispute endpoint with a signed evidence transaction.
DisputeOutcome dispute_report(GatewayClient& client, const SigningKey& citizen, const ReportId& id,
                              ByteView original_bundle);

} // namespace acrp::gateway
