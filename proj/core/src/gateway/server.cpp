#include "acrp/gateway/server.hpp"

#include <httplib.h>

#include <algorithm>
#include <iostream>

#include "acrp/dispute.hpp"
#include "acrp/gateway/api.hpp"
#include "acrp/gateway/png_codec.hpp"

namespace acrp::gateway {

using ledger::RejectCode;
using ledger::Transaction;
using ledger::TxKind;

Bytes storage_read_message(const Digest& key, std::string_view chain_id) {
    return ByteWriter{}.raw("acrp-storage-get").raw(key).blob(chain_id).bytes();
}

int http_status(RejectCode code) {
    switch (code) {
    case RejectCode::Malformed: return 400;
    case RejectCode::BadSignature: return 401;
    case RejectCode::WrongRole:
    case RejectCode::AuditorMismatch: return 403;
    case RejectCode::UnknownReport: return 404;
    case RejectCode::WrongPhase:
    case RejectCode::HashMismatch:
    case RejectCode::InvalidRedaction:
    case RejectCode::DuplicateVote:
    case RejectCode::BadMergeTarget:
    case RejectCode::AlreadyExists: return 409;
    }
    return 400;
}

std::string error_code(RejectCode code) { return std::string(ledger::to_string(code)); }

namespace {

/// Thrown inside handlers; turned into {error, message} by the exception handler.
struct HttpError {
    int status;
    std::string code;
    std::string message;
};

[[noreturn]] void fail(int status, std::string code, std::string message) {
    throw HttpError{status, std::move(code), std::move(message)};
}

void reply(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
    reply(res, {{"error", code}, {"message", message}}, status);
}

json parse_body(const httplib::Request& req) {
    auto body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object())
        fail(400, "Malformed", "request body must be a JSON object");
    return body;
}

Bytes base64_field(const json& body, const char* name) {
    if (!body.contains(name) || !body[name].is_string())
        fail(400, "Malformed", std::string("missing base64 field '") + name + "'");
    try {
        return from_base64(body[name].get<std::string>());
    } catch (const Error& e) {
        fail(400, "Malformed", std::string(name) + ": " + e.what());
    }
}

ReportId path_id(const httplib::Request& req) { return ReportId::from_hex(req.matches[1].str()); }

const ledger::ReportRecord& require_report(const ledger::LedgerState& state, const ReportId& id) {
    const auto* rec = state.find(id);
    if (!rec)
        fail(404, "UnknownReport", "no report " + id.hex());
    return *rec;
}

std::optional<ledger::Phase> phase_param(const httplib::Request& req) {
    if (!req.has_param("phase"))
        return std::nullopt;
    try {
        return ledger::parse_phase(req.get_param_value("phase"));
    } catch (const Error& e) {
        fail(400, "Malformed", e.what());
    }
}

std::optional<BoundingBox> bbox_param(const httplib::Request& req) {
    if (!req.has_param("bbox"))
        return std::nullopt;
    std::vector<std::int32_t> v;
    std::string text = req.get_param_value("bbox");
    std::size_t pos = 0;
    try {
        while (pos <= text.size()) {
            auto comma = text.find(',', pos);
            v.push_back(std::stoi(text.substr(pos, comma - pos)));
            if (comma == std::string::npos)
                break;
            pos = comma + 1;
        }
    } catch (const std::exception&) {
        fail(400, "Malformed", "bbox must be min_lat,min_lon,max_lat,max_lon in microdegrees");
    }
    if (v.size() != 4)
        fail(400, "Malformed", "bbox must have four coordinates");
    return BoundingBox{{v[0], v[1]}, {v[2], v[3]}};
}

std::size_t size_param(const httplib::Request& req, const char* name, std::size_t fallback) {
    if (!req.has_param(name))
        return fallback;
    auto text = req.get_param_value(name);
    if (text.empty() || text.size() > 9 || !std::all_of(text.begin(), text.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
        fail(400, "Malformed", std::string(name) + " must be a non-negative integer");
    return std::stoul(text);
}

json consortium_json(const ledger::Genesis& genesis, const ledger::LedgerState& state) {
    json members = json::array();
    for (const auto& m : state.members())
        members.push_back(m.hex());
    json auditors = json::array();
    for (const auto& a : state.auditors().auditors)
        auditors.push_back({{"key", a.key.hex()}, {"activation_height", a.activation_height}});
    json authorities = json::array();
    for (const auto& e : state.authorities().entries) {
        json a{{"name", e.name}, {"key", e.authority.hex()}};
        a["type"] = e.type ? json(to_string(*e.type)) : json(nullptr);
        if (!e.region) {
            a["region"] = nullptr;
        } else if (const auto* box = std::get_if<BoundingBox>(&*e.region)) {
            a["region"] = {{"bbox", {box->min.lat, box->min.lon, box->max.lat, box->max.lon}}};
        } else {
            json pts = json::array();
            for (const auto& p : std::get<Polygon>(*e.region).vertices)
                pts.push_back({p.lat, p.lon});
            a["region"] = {{"polygon", std::move(pts)}};
        }
        authorities.push_back(std::move(a));
    }
    return {{"chain_id", state.chain_id()},
            {"genesis_hash", to_hex(genesis.hash())},
            {"audit_timeout", state.audit_timeout()},
            {"block_interval", genesis.block_interval},
            {"members", std::move(members)},
            {"auditors", std::move(auditors)},
            {"authorities", std::move(authorities)}};
}

} // namespace

GatewayServer::GatewayServer(ledger::Network& network, storage::BlobStore& store, ServerOptions options)
    : network_(network), store_(store), options_(std::move(options)), http_(std::make_unique<httplib::Server>()) {
    routes();
}

GatewayServer::~GatewayServer() { stop(); }

int GatewayServer::start() {
    port_ = options_.port == 0 ? http_->bind_to_any_port(options_.host) : options_.port;
    if (options_.port != 0 && !http_->bind_to_port(options_.host, options_.port))
        port_ = -1;
    if (port_ < 0)
        throw Error(Errc::Io, "cannot bind " + options_.host + ":" + std::to_string(options_.port));
    listener_ = std::thread([this] { http_->listen_after_bind(); });
    http_->wait_until_ready();
    if (options_.block_interval)
        producer_ = std::thread([this] { produce_loop(); });
    return port_;
}

void GatewayServer::stop() {
    {
        std::lock_guard lock(mu_);
        if (stopping_.exchange(true))
            return;
    }
    cv_.notify_all();
    http_->stop();
    if (listener_.joinable())
        listener_.join();
    if (producer_.joinable())
        producer_.join();
}

void GatewayServer::wait() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [this] { return stopping_.load(); });
}

void GatewayServer::produce_loop() {
    std::unique_lock lock(mu_);
    while (!cv_.wait_for(lock, *options_.block_interval, [this] { return stopping_.load(); })) {
        lock.unlock();
        try {
            auto block = network_.step();
            std::clog << "block " << block.header.height << " txs=" << block.txs.size() << " hash=" << to_hex(block.hash)
                      << '\n';
        } catch (const std::exception& e) {
            std::clog << "block production failed: " << e.what() << '\n';
        }
        lock.lock();
    }
}

std::optional<RedactedFields> GatewayServer::published_fields(const ReportId& id,
                                                              const ledger::ReportRecord& rec) const {
    using ledger::Phase;
    if (rec.phase < Phase::Published || rec.phase == Phase::Deleted)
        return std::nullopt;
    if (rec.audit_tx) {
        auto tx = network_.node(0).transaction(*rec.audit_tx);
        if (!tx)
            return std::nullopt;
        auto decision = ledger::decode_audit(tx->payload, id);
        return decision.fields;
    }
    // Forced publication: the original as uploaded is the public artifact.
    auto blob = store_.get(rec.storage_key);
    if (!blob)
        return std::nullopt;
    auto bundle = decode_bundle(*blob);
    if (bundle.id() != id || commitments(bundle) != rec.commitments)
        return std::nullopt;
    return redact_bundle(bundle, {});
}

void GatewayServer::routes() {
    auto& s = *http_;
    s.set_payload_max_length(std::size_t{64} << 20);
    s.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", std::string("Content-Type, ") + kKeyHeader + ", " +
                                                                kSignatureHeader}});
    s.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
            std::rethrow_exception(ep);
        } catch (const HttpError& e) {
            reply_error(res, e.status, e.code, e.message);
        } catch (const Error& e) {
            int status = 400;
            switch (e.code()) {
            case Errc::UnknownReport: status = 404; break;
            case Errc::TooLarge: status = 413; break;
            case Errc::WrongPhase: status = 409; break;
            case Errc::IntegrityError:
            case Errc::Io: status = 500; break;
            default: break;
            }
            reply_error(res, status, std::string(to_string(e.code())), e.what());
        } catch (const std::exception& e) {
            reply_error(res, 500, "Internal", e.what());
        }
    });
    s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty())
            reply_error(res, res.status, res.status == 404 ? "NotFound" : "Error", httplib::status_message(res.status));
    });

    // One mutating endpoint per transaction kind. The gateway checks the route/tx agreement and
    // the signature, prechecks against the head state and queues; it never signs anything itself.
    auto submit = [this](const httplib::Request& req, httplib::Response& res, TxKind kind, bool id_in_path) {
        auto body = parse_body(req);
        Transaction tx;
        try {
            tx = ledger::decode_transaction(base64_field(body, "tx"));
        } catch (const Error& e) {
            fail(400, "Malformed", e.what());
        }
        if (tx.kind != kind)
            fail(400, "Malformed", "endpoint expects a " + std::string(ledger::to_string(kind)) + " transaction");
        if (id_in_path && (!tx.report_id || *tx.report_id != path_id(req)))
            fail(400, "Malformed", "transaction report id differs from the URL");
        const auto& node = network_.node(0);
        if (!tx.verify(node.genesis().chain_id))
            fail(401, error_code(RejectCode::BadSignature), "transaction signature invalid");
        if (auto r = node.precheck(tx))
            fail(http_status(r->code), error_code(r->code), r->detail);
        auto ref = network_.submit(tx);
        reply(res, {{"tx_ref", to_hex(ref)}, {"status", "pending"}}, 202);
        return tx;
    };

    const std::string id_re = "([0-9a-f]{64})";

    s.Post("/v1/reports/announce", [this, submit](const httplib::Request& req, httplib::Response& res) {
        submit(req, res, TxKind::Announce, false);
    });
    s.Post("/v1/reports/" + id_re + "/commit", [this, submit](const httplib::Request& req, httplib::Response& res) {
        submit(req, res, TxKind::Commit, true);
    });
    s.Post("/v1/reports/" + id_re + "/audit", [this, submit](const httplib::Request& req, httplib::Response& res) {
        submit(req, res, TxKind::AuditDecision, true);
    });
    s.Post("/v1/reports/" + id_re + "/status", [this, submit](const httplib::Request& req, httplib::Response& res) {
        submit(req, res, TxKind::StatusUpdate, true);
    });
    s.Post("/v1/reports/" + id_re + "/delete", [this, submit](const httplib::Request& req, httplib::Response& res) {
        submit(req, res, TxKind::DeletionLog, true);
    });
    s.Post("/v1/reports/" + id_re + "/vote", [this, submit](const httplib::Request& req, httplib::Response& res) {
        submit(req, res, TxKind::Vote, true);
    });
    s.Post("/v1/reports/" + id_re + "/merge", [this, submit](const httplib::Request& req, httplib::Response& res) {
        submit(req, res, TxKind::Merge, true);
    });
    s.Post("/v1/reports/" + id_re + "/comment", [this, submit](const httplib::Request& req, httplib::Response& res) {
        // The comment text lives in storage; the transaction carries its digest.
        auto body = parse_body(req);
        std::optional<Bytes> text;
        if (body.contains("text") && body["text"].is_string())
            text = to_bytes(body["text"].get<std::string>());
        if (text) {
            auto tx = ledger::decode_transaction(base64_field(body, "tx"));
            if (tx.kind == TxKind::Comment && ledger::decode_comment(tx.payload).comment_digest != sha256(*text))
                fail(400, "Malformed", "comment text does not match the signed digest");
        }
        submit(req, res, TxKind::Comment, true);
        if (text)
            store_.put(*text);
    });
    s.Post("/v1/consortium/auditors", [this, submit](const httplib::Request& req, httplib::Response& res) {
        submit(req, res, TxKind::RegisterAuditor, false);
    });
    s.Post("/v1/consortium/authorities", [this, submit](const httplib::Request& req, httplib::Response& res) {
        submit(req, res, TxKind::RegisterAuthority, false);
    });

    s.Post("/v1/reports/" + id_re + "/dispute", [this, submit](const httplib::Request& req, httplib::Response& res) {
        auto id = path_id(req);
        auto body = parse_body(req);
        auto state = network_.node(0).state();
        const auto& rec = require_report(*state, id);
        if (rec.phase < ledger::Phase::Audited || !rec.commit_height)
            fail(409, "WrongPhase", "nothing to dispute before the audit");
        auto fields = published_fields(id, rec);
        if (!fields)
            fail(409, "WrongPhase", "report has no published artifacts");
        Bytes original_bytes = base64_field(body, "original");
        ledger::DisputeResult result;
        try {
            result = ledger::verify_dispute(decode_bundle(original_bytes), id, rec.commitments, *fields);
        } catch (const Error& e) {
            result.verdict = ledger::DisputeVerdict::HashMismatch;
            result.detail = std::string("original does not decode: ") + e.what();
        }
        json out{{"verdict", ledger::to_string(result.verdict)},
                 {"detail", result.detail},
                 {"diff",
                  {{"Location", result.diff[0]}, {"Picture", result.diff[1]}, {"Description", result.diff[2]}}}};
        if (body.contains("tx")) {
            auto tx = ledger::decode_transaction(base64_field(body, "tx"));
            if (tx.kind == TxKind::DisputeEvidence) {
                auto p = ledger::decode_dispute(tx.payload);
                if (p.verdict != result.verdict || p.original_key != sha256(original_bytes))
                    fail(400, "Malformed", "evidence transaction disagrees with the computed verdict");
            }
            httplib::Response inner;
            submit(req, inner, TxKind::DisputeEvidence, true);
            out["tx_ref"] = json::parse(inner.body)["tx_ref"];
            store_.put(original_bytes);
        }
        reply(res, out);
    });

    s.Get("/v1/reports", [this](const httplib::Request& req, httplib::Response& res) {
        auto state = network_.node(0).state();
        auto phase = phase_param(req);
        std::optional<ReportType> type;
        if (req.has_param("type")) {
            try {
                type = parse_report_type(req.get_param_value("type"));
            } catch (const Error& e) {
                fail(400, "Malformed", e.what());
            }
        }
        auto bbox = bbox_param(req);
        std::optional<PublicKey> auditor;
        if (req.has_param("auditor"))
            auditor = PublicKey::from_hex(req.get_param_value("auditor"));
        auto page = size_param(req, "page", 0);
        auto page_size = std::clamp<std::size_t>(size_param(req, "page_size", options_.page_size), 1, 500);

        std::vector<json> items;
        for (const auto& [id, rec] : state->reports()) {
            if (phase && rec.phase != *phase)
                continue;
            if (type && (!rec.commit_height || rec.type != *type))
                continue;
            if (bbox && (!rec.location || !bbox->contains(*rec.location)))
                continue;
            if (auditor && (!rec.commit_height || rec.auditor != *auditor))
                continue;
            items.push_back(record_summary(id, rec));
        }
        json page_items = json::array();
        for (std::size_t i = page * page_size; i < items.size() && i < (page + 1) * page_size; ++i)
            page_items.push_back(std::move(items[i]));
        reply(res, {{"items", std::move(page_items)},
                    {"page", page},
                    {"page_size", page_size},
                    {"total", items.size()},
                    {"height", state->height()}});
    });

    s.Get("/v1/reports/" + id_re, [this](const httplib::Request& req, httplib::Response& res) {
        auto id = path_id(req);
        auto state = network_.node(0).state();
        const auto& rec = require_report(*state, id);
        reply(res, report_view(id, rec, published_fields(id, rec)));
    });

    s.Get("/v1/reports/" + id_re + "/picture.png", [this](const httplib::Request& req, httplib::Response& res) {
        auto id = path_id(req);
        auto state = network_.node(0).state();
        const auto& rec = require_report(*state, id);
        auto fields = published_fields(id, rec);
        if (!fields)
            fail(404, "NotPublic", "report has no public picture");
        const auto& picture = (*fields)[field_slot(rss::FieldTag::Picture)];
        auto size = chunking::infer_picture_size(picture);
        if (!size)
            fail(409, "FullyRedacted", "no surviving chunk fixes the picture geometry");
        auto scheme = chunking::decode_scheme_header(std::get<rss::Present>(picture.slots.front()).chunk);
        auto img = chunking::render_redacted_image(size->first, size->second, scheme, picture);
        auto png = encode_png(img);
        res.set_content(reinterpret_cast<const char*>(png.data()), png.size(), "image/png");
    });

    s.Get("/v1/reports/" + id_re + "/duplicates", [this](const httplib::Request& req, httplib::Response& res) {
        auto state = network_.node(0).state();
        double threshold = community::kDefaultDuplicateThresholdM;
        if (req.has_param("threshold")) {
            try {
                threshold = std::stod(req.get_param_value("threshold"));
            } catch (const std::exception&) {
                fail(400, "Malformed", "threshold must be a number of meters");
            }
        }
        json out = json::array();
        for (const auto& c : community::find_duplicates(*state, path_id(req), threshold))
            out.push_back(duplicate_json(c));
        reply(res, {{"candidates", std::move(out)}, {"threshold_m", threshold}});
    });

    s.Get("/v1/ranking", [this](const httplib::Request&, httplib::Response& res) {
        auto state = network_.node(0).state();
        json out = json::array();
        for (const auto& p : community::priority_ranking(*state))
            out.push_back({{"report_id", p.report_id.hex()}, {"score", p.score}});
        reply(res, {{"ranking", std::move(out)}});
    });

    s.Post("/v1/storage", [this](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        auto key = store_.put(base64_field(body, "bytes"));
        reply(res, {{"key", to_hex(key)}}, 201);
    });

    s.Get("/v1/storage/([0-9a-f]{64})", [this](const httplib::Request& req, httplib::Response& res) {
        auto key = digest_from_hex(req.matches[1].str());
        auto blob = store_.get(key);
        if (!blob)
            fail(404, "NotFound", "no object " + to_hex(key));
        // Citizen originals are readable by their signer and the assigned auditor only,
        // and by everyone once the report was published without an audit.
        std::optional<ReportBundle> bundle;
        try {
            bundle = decode_bundle(*blob);
        } catch (const Error&) {
        }
        if (bundle) {
            auto state = network_.node(0).state();
            const auto* rec = state->find(bundle->id());
            bool public_original = rec && rec->forced_publish && rec->phase != ledger::Phase::Deleted;
            if (!public_original) {
                if (!req.has_header(kKeyHeader) || !req.has_header(kSignatureHeader))
                    fail(401, "BadSignature", "original report blobs require a signed request");
                PublicKey who;
                Signature sig;
                try {
                    who = PublicKey::from_hex(req.get_header_value(kKeyHeader));
                    auto raw = from_hex(req.get_header_value(kSignatureHeader));
                    if (raw.size() != sig.bytes.size())
                        throw Error(Errc::Malformed, "signature length");
                    std::copy(raw.begin(), raw.end(), sig.bytes.begin());
                } catch (const Error& e) {
                    fail(400, "Malformed", e.what());
                }
                if (!verify_signature(who, storage_read_message(key, state->chain_id()), sig))
                    fail(401, "BadSignature", "storage read signature invalid");
                bool allowed = who == bundle->signatures[0].signer_pk ||
                               (rec && rec->commit_height && who == rec->auditor);
                if (!allowed)
                    fail(403, "WrongRole", "only the reporting citizen or the assigned auditor may read originals");
            }
        }
        reply(res, {{"key", to_hex(key)}, {"bytes", to_base64(*blob)}});
    });

    s.Get("/v1/chain/head", [this](const httplib::Request&, httplib::Response& res) {
        auto state = network_.node(0).state();
        reply(res, {{"chain_id", state->chain_id()},
                    {"height", state->height()},
                    {"head_hash", to_hex(state->head_hash())},
                    {"audit_timeout", state->audit_timeout()}});
    });

    s.Get(R"(/v1/chain/blocks/(\d{1,19}))", [this](const httplib::Request& req, httplib::Response& res) {
        auto block = network_.node(0).block_at(std::stoull(req.matches[1].str()));
        if (!block)
            fail(404, "NotFound", "no block at height " + req.matches[1].str());
        reply(res, block_json(*block));
    });

    s.Get("/v1/tx/([0-9a-f]{64})", [this](const httplib::Request& req, httplib::Response& res) {
        auto ref = digest_from_hex(req.matches[1].str());
        const auto& node = network_.node(0);
        if (auto loc = node.find_tx(ref)) {
            reply(res, {{"status", "included"}, {"height", loc->height}, {"index", loc->index}});
            return;
        }
        if (node.pending(ref)) {
            reply(res, {{"status", "pending"}});
            return;
        }
        for (const auto& r : node.rejection_log()) {
            if (r.tx_ref == ref) {
                reply(res, {{"status", "rejected"},
                            {"height", r.height},
                            {"error", ledger::to_string(r.code)},
                            {"message", r.detail}});
                return;
            }
        }
        fail(404, "NotFound", "unknown transaction");
    });

    s.Get("/v1/consortium", [this](const httplib::Request&, httplib::Response& res) {
        const auto& node = network_.node(0);
        reply(res, consortium_json(node.genesis(), *node.state()));
    });
}

} // namespace acrp::gateway
