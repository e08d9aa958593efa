#include "acrp/gateway/client.hpp"

#include <httplib.h>

#include <thread>

#include "acrp/dispute.hpp"
#include "acrp/gateway/api.hpp"

namespace acrp::gateway {

using ledger::Transaction;
using ledger::TxKind;
using Clock = std::chrono::steady_clock;

namespace {

json handle(const httplib::Result& result) {
    if (!result)
        throw ApiError(0, "Unreachable", httplib::to_string(result.error()));
    auto body = json::parse(result->body, nullptr, false);
    if (result->status >= 400) {
        if (!body.is_discarded() && body.contains("error"))
            throw ApiError(result->status, body.value("error", "Error"), body.value("message", ""));
        throw ApiError(result->status, "Error", result->body);
    }
    if (body.is_discarded())
        throw ApiError(result->status, "Malformed", "response is not JSON");
    return body;
}

Digest digest_field(const json& j, const char* name) { return digest_from_hex(j.at(name).get<std::string>()); }

} // namespace

GatewayClient::GatewayClient(const std::string& base_url, std::chrono::seconds timeout)
    : http_(std::make_unique<httplib::Client>(base_url)) {
    http_->set_connection_timeout(timeout);
    http_->set_read_timeout(timeout);
    http_->set_write_timeout(timeout);
}

GatewayClient::~GatewayClient() = default;

json GatewayClient::get(const std::string& path) { return handle(http_->Get(path)); }

json GatewayClient::post(const std::string& path, const json& body) {
    return handle(http_->Post(path, body.dump(), "application/json"));
}

Digest GatewayClient::submit(const std::string& path, const Transaction& tx, json extra) {
    extra["tx"] = to_base64(ledger::encode(tx));
    auto out = post(path, extra);
    auto ref = digest_field(out, "tx_ref");
    if (ref != tx.ref())
        throw ApiError(502, "Malformed", "gateway returned a foreign tx ref");
    return ref;
}

Digest GatewayClient::put_blob(ByteView value) {
    auto key = digest_field(post("/v1/storage", {{"bytes", to_base64(value)}}), "key");
    if (key != sha256(value))
        throw ApiError(502, "IntegrityError", "storage key is not the content digest");
    return key;
}

Bytes GatewayClient::get_blob(const Digest& key, const SigningKey* reader, std::string_view chain_id) {
    httplib::Headers headers;
    if (reader) {
        auto sig = reader->sign(storage_read_message(key, chain_id));
        headers.emplace(kKeyHeader, reader->public_key().hex());
        headers.emplace(kSignatureHeader, to_hex(sig.bytes));
    }
    auto out = handle(http_->Get("/v1/storage/" + to_hex(key), headers));
    auto bytes = from_base64(out.at("bytes").get<std::string>());
    if (sha256(bytes) != key)
        throw ApiError(502, "IntegrityError", "object does not hash to its key");
    return bytes;
}

TxStatus GatewayClient::tx_status(const Digest& ref) {
    auto j = get("/v1/tx/" + to_hex(ref));
    TxStatus s;
    s.status = j.value("status", "");
    if (j.contains("height"))
        s.height = j["height"].get<std::uint64_t>();
    s.error = j.value("error", "");
    s.message = j.value("message", "");
    return s;
}

std::uint64_t GatewayClient::wait_for_tx(const Digest& ref, std::chrono::milliseconds timeout,
                                         std::chrono::milliseconds poll) {
    auto deadline = Clock::now() + timeout;
    for (;;) {
        auto s = tx_status(ref);
        if (s.status == "included")
            return *s.height;
        if (s.status == "rejected")
            throw ApiError(409, s.error, s.message);
        if (Clock::now() >= deadline)
            throw ApiError(0, "Timeout", "transaction " + to_hex(ref) + " not included");
        std::this_thread::sleep_for(poll);
    }
}

void GatewayClient::wait_for_height(std::uint64_t height, std::chrono::milliseconds timeout,
                                    std::chrono::milliseconds poll) {
    auto deadline = Clock::now() + timeout;
    while (head().at("height").get<std::uint64_t>() < height) {
        if (Clock::now() >= deadline)
            throw ApiError(0, "Timeout", "chain did not reach height " + std::to_string(height));
        std::this_thread::sleep_for(poll);
    }
}

AuditorSelection recompute_auditor(GatewayClient& client, const ReportId& id, std::uint64_t announce_height) {
    AuditorRegistry registry;
    auto consortium = client.consortium();
    for (const auto& a : consortium.at("auditors"))
        registry.auditors.push_back({PublicKey::from_hex(a.at("key").get<std::string>()),
                                     a.at("activation_height").get<std::uint64_t>()});
    auto beacon = digest_field(client.block(announce_height + 1), "hash");
    auto active = registry.active_at(announce_height);
    return select_auditor(id, beacon, active);
}

FileOutcome file_report(GatewayClient& client, const SigningKey& citizen, const ReportBundle& bundle,
                        std::chrono::milliseconds timeout) {
    auto chain_id = client.head().at("chain_id").get<std::string>();
    FileOutcome out;
    out.id = bundle.id();

    auto announce = Transaction::make(TxKind::Announce, out.id, ledger::encode_payload(ledger::AnnouncePayload{out.id.digest}),
                                      citizen, chain_id);
    try {
        out.announce_tx = client.submit("/v1/reports/announce", announce);
        out.announce_height = client.wait_for_tx(out.announce_tx, timeout);
    } catch (const ApiError& e) {
        // Resume an interrupted filing of the same report by the same key.
        if (e.code() != "WrongPhase")
            throw;
        auto view = client.report(out.id);
        if (view.at("announcer") != citizen.public_key().hex() || view.at("phase") != "Announced")
            throw;
        out.announce_tx = digest_field(view.at("trace").at(0), "tx_ref");
        out.announce_height = view.at("announce_height").get<std::uint64_t>();
    }
    client.wait_for_height(out.announce_height + 2, timeout);

    out.auditor = recompute_auditor(client, out.id, out.announce_height);
    auto blob = encode_bundle(bundle);
    ledger::CommitPayload commit{bundle.report.type, out.auditor.index, commitments(bundle), sha256(blob)};
    auto tx = Transaction::make(TxKind::Commit, out.id, ledger::encode_payload(commit), citizen, chain_id);
    out.commit_tx = client.submit("/v1/reports/" + out.id.hex() + "/commit", tx);
    out.storage_key = client.put_blob(blob);
    client.wait_for_tx(out.commit_tx, timeout);
    return out;
}

namespace {

FieldCommitments chain_commitments(const json& view) {
    FieldCommitments out;
    const auto& cs = view.at("commitments");
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& c = cs.at(i);
        out[i].field_tag = static_cast<rss::FieldTag>(i);
        out[i].n = c.at("n").get<std::uint32_t>();
        out[i].root = digest_field(c, "root");
        auto sig = from_hex(c.at("root_signature").get<std::string>());
        if (sig.size() != out[i].root_signature.bytes.size())
            throw ApiError(502, "Malformed", "root signature length");
        std::copy(sig.begin(), sig.end(), out[i].root_signature.bytes.begin());
        out[i].signer_pk = PublicKey::from_hex(c.at("signer").get<std::string>());
    }
    return out;
}

RedactedFields published(const json& view, const ReportId& id) {
    if (view.at("fields").is_null())
        throw ApiError(409, "WrongPhase", "report has no published artifacts");
    RedactedFields out;
    static constexpr const char* kNames[] = {"Location", "Picture", "Description"};
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = rss::decode_redacted(from_base64(view["fields"].at(kNames[i]).at("encoded").get<std::string>()), id.digest);
    return out;
}

} // namespace

Digest audit_report(GatewayClient& client, const SigningKey& auditor, const ReportId& id, const AuditChoice& choice) {
    auto chain_id = client.head().at("chain_id").get<std::string>();
    auto view = client.report(id);
    if (view.at("phase") != "Committed")
        throw ApiError(409, "WrongPhase", "report is " + view.at("phase").get<std::string>());

    ledger::AuditDecisionPayload decision;
    decision.note = choice.note;
    if (choice.publish) {
        auto blob = client.get_blob(digest_field(view, "storage_key"), &auditor, chain_id);
        auto bundle = decode_bundle(blob);
        if (bundle.id() != id || !verify_bundle(bundle) || commitments(bundle) != chain_commitments(view))
            throw ApiError(409, "HashMismatch", "stored original does not match the on-chain commitments");
        decision.verdict = ledger::AuditVerdict::Publish;
        decision.fields = redact_bundle(bundle, *choice.publish);
    } else {
        decision.verdict = ledger::AuditVerdict::Reject;
        decision.reject_reason = choice.reject_reason;
    }
    auto tx = Transaction::make(TxKind::AuditDecision, id, ledger::encode_payload(decision), auditor, chain_id);
    return client.submit("/v1/reports/" + id.hex() + "/audit", tx);
}

DisputeOutcome dispute_report(GatewayClient& client, const SigningKey& citizen, const ReportId& id,
                              ByteView original_bundle) {
    auto chain_id = client.head().at("chain_id").get<std::string>();
    auto view = client.report(id);
    // Same check the gateway runs, done locally so the signed evidence states our own verdict.
    ledger::DisputeResult local;
    try {
        local = ledger::verify_dispute(decode_bundle(original_bundle), id, chain_commitments(view), published(view, id));
    } catch (const Error& e) {
        if (e.code() != Errc::Malformed)
            throw;
        local.verdict = ledger::DisputeVerdict::HashMismatch;
    }
    ledger::DisputePayload payload{sha256(original_bundle), local.verdict};
    auto tx = Transaction::make(TxKind::DisputeEvidence, id, ledger::encode_payload(payload), citizen, chain_id);
    json body{{"original", to_base64(original_bundle)}, {"tx", to_base64(ledger::encode(tx))}};
    DisputeOutcome out;
    out.response = client.post("/v1/reports/" + id.hex() + "/dispute", body);
    out.verdict = local.verdict;
    if (out.response.value("verdict", "") != ledger::to_string(local.verdict))
        throw ApiError(502, "Malformed", "gateway verdict disagrees with the local check");
    return out;
}

} // namespace acrp::gateway
