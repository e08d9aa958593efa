#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "acrp/gateway/client.hpp"
#include "acrp/gateway/png_codec.hpp"
#include "commands.hpp"
#include "keyfile.hpp"

namespace acrp::cli {

using gateway::GatewayClient;
using gateway::json;
using ledger::Transaction;
using ledger::TxKind;

namespace {

Bytes read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::Io, "cannot read " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::set<std::uint32_t> parse_indices(const std::string& list) {
    std::set<std::uint32_t> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        try {
            out.insert(static_cast<std::uint32_t>(std::stoul(item)));
        } catch (const std::exception&) {
            throw Error(Errc::Malformed, "bad index '" + item + "'");
        }
    }
    return out;
}

chunking::ChunkingScheme parse_scheme(const FileArgs& a) {
    if (!a.regions.empty()) {
        std::string text = a.regions;
        if (std::filesystem::exists(text))
            text = to_string(read_file(text));
        auto j = json::parse(text, nullptr, false);
        if (j.is_discarded() || !j.is_array())
            throw Error(Errc::Malformed, "--regions expects a JSON array of [x, y, w, h]");
        std::vector<chunking::Rect> regions;
        for (const auto& r : j)
            regions.push_back({r.at(0).get<std::uint32_t>(), r.at(1).get<std::uint32_t>(), r.at(2).get<std::uint32_t>(),
                               r.at(3).get<std::uint32_t>()});
        return chunking::ChunkingScheme::objects(std::move(regions));
    }
    auto x = a.grid.find('x');
    if (x == std::string::npos)
        throw Error(Errc::Malformed, "--grid expects ROWSxCOLS, e.g. 4x4");
    auto rows = std::stoul(a.grid.substr(0, x));
    auto cols = std::stoul(a.grid.substr(x + 1));
    if (rows == 0 || cols == 0 || rows > 0xFFFF || cols > 0xFFFF)
        throw Error(Errc::GridTooFine, "grid dimensions out of range");
    return chunking::ChunkingScheme::grid(static_cast<std::uint16_t>(rows), static_cast<std::uint16_t>(cols));
}

Transaction make_tx(GatewayClient& client, const SigningKey& key, TxKind kind, std::optional<ReportId> id,
                    Bytes payload) {
    auto chain_id = client.head().at("chain_id").get<std::string>();
    return Transaction::make(kind, id, std::move(payload), key, chain_id);
}

/// Submit, wait for inclusion and print where it landed.
int submit_and_wait(const Common& c, GatewayClient& client, const std::string& path, const Transaction& tx) {
    auto ref = client.submit(path, tx);
    auto height = client.wait_for_tx(ref, std::chrono::seconds(c.timeout_s));
    std::cout << json{{"tx_ref", to_hex(ref)}, {"height", height}}.dump() << "\n";
    return 0;
}

} // namespace

int cmd_citizen_file(const Common& c, const FileArgs& a) {
    auto key = load_key(c.key_file);
    Report report;
    report.type = parse_report_type(a.type);
    report.location = GeoPoint::from_degrees(a.lat, a.lon);
    report.picture = gateway::decode_png(read_file(a.photo));
    report.scheme = parse_scheme(a);
    report.description = a.desc;
    auto granularity = a.granularity == "sentences" ? chunking::TextGranularity::Sentences
                                                    : chunking::TextGranularity::Words;
    auto bundle = sign_report(key, std::move(report), granularity);

    // Keep the original before anything touches the network: it is the dispute evidence.
    auto save = a.save.empty() ? bundle.id().hex() + ".acrp" : a.save;
    {
        auto bytes = encode_bundle(bundle);
        std::ofstream out(save, std::ios::binary);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }

    GatewayClient client(c.node);
    auto out = gateway::file_report(client, key, bundle, std::chrono::seconds(c.timeout_s));
    std::cout << json{{"report_id", out.id.hex()},
                      {"announce_tx", to_hex(out.announce_tx)},
                      {"announce_height", out.announce_height},
                      {"commit_tx", to_hex(out.commit_tx)},
                      {"storage_key", to_hex(out.storage_key)},
                      {"auditor_index", out.auditor.index},
                      {"auditor", out.auditor.key.hex()},
                      {"original", save}}
                     .dump(2)
              << "\n";
    return 0;
}

int cmd_citizen_dispute(const Common& c, const std::string& report, const std::string& original) {
    auto key = load_key(c.key_file);
    GatewayClient client(c.node);
    auto out = gateway::dispute_report(client, key, ReportId::from_hex(report), read_file(original));
    std::cout << out.response.dump(2) << "\n";
    if (out.response.contains("tx_ref"))
        client.wait_for_tx(digest_from_hex(out.response["tx_ref"].get<std::string>()), std::chrono::seconds(c.timeout_s));
    return out.verdict == ledger::DisputeVerdict::Consistent ? 0 : 3;
}

int cmd_citizen_vote(const Common& c, const std::string& report) {
    auto key = load_key(c.key_file);
    GatewayClient client(c.node);
    auto id = ReportId::from_hex(report);
    return submit_and_wait(c, client, "/v1/reports/" + id.hex() + "/vote", make_tx(client, key, TxKind::Vote, id, {}));
}

int cmd_citizen_comment(const Common& c, const std::string& report, const std::string& text) {
    auto key = load_key(c.key_file);
    GatewayClient client(c.node);
    auto id = ReportId::from_hex(report);
    auto tx = make_tx(client, key, TxKind::Comment, id,
                      ledger::encode_payload(ledger::CommentPayload{sha256(as_bytes(text))}));
    auto ref = client.submit("/v1/reports/" + id.hex() + "/comment", tx, {{"text", text}});
    std::cout << json{{"tx_ref", to_hex(ref)}, {"height", client.wait_for_tx(ref, std::chrono::seconds(c.timeout_s))}}.dump()
              << "\n";
    return 0;
}

int cmd_auditor_pending(const Common& c) {
    auto key = load_key(c.key_file);
    GatewayClient client(c.node);
    auto head = client.head();
    auto height = head.at("height").get<std::uint64_t>();
    auto timeout = head.at("audit_timeout").get<std::uint64_t>();
    std::size_t shown = 0;
    for (std::size_t page = 0;; ++page) {
        auto list = client.get("/v1/reports?phase=Committed&page=" + std::to_string(page));
        for (const auto& item : list.at("items")) {
            auto id = ReportId::from_hex(item.at("id").get<std::string>());
            // The listing's auditor field is advisory; the assignment is recomputed from blocks.
            auto sel = gateway::recompute_auditor(client, id, item.at("announce_height").get<std::uint64_t>());
            if (sel.key != key.public_key())
                continue;
            auto commit_height = item.at("commit_height").get<std::uint64_t>();
            auto deadline = commit_height + timeout + 1;
            std::cout << id.hex() << "  " << item.at("type").get<std::string>() << "  committed@" << commit_height
                      << "  blocks-left " << (deadline > height ? deadline - height : 0) << "\n";
            ++shown;
        }
        if ((page + 1) * list.at("page_size").get<std::size_t>() >= list.at("total").get<std::size_t>())
            break;
    }
    if (shown == 0)
        std::cout << "no pending reports for " << key.public_key().hex() << "\n";
    return 0;
}

int cmd_auditor_decide(const Common& c, const DecideArgs& a) {
    auto key = load_key(c.key_file);
    GatewayClient client(c.node);
    auto id = ReportId::from_hex(a.report);
    gateway::AuditChoice choice;
    choice.note = a.note;
    if (!a.reject.empty()) {
        choice.reject_reason = ledger::parse_reject_reason(a.reject);
    } else {
        RedactionRequest req;
        req.location = a.redact_location;
        req.picture_cells = parse_indices(a.redact_photo);
        req.description_chunks = parse_indices(a.redact_desc);
        choice.publish = req;
    }
    auto ref = gateway::audit_report(client, key, id, choice);
    auto height = client.wait_for_tx(ref, std::chrono::seconds(c.timeout_s));
    std::cout << json{{"tx_ref", to_hex(ref)}, {"height", height}}.dump() << "\n";
    return 0;
}

int cmd_authority_update(const Common& c, const std::string& report, const std::string& status, const std::string& note) {
    auto key = load_key(c.key_file);
    GatewayClient client(c.node);
    auto id = ReportId::from_hex(report);
    ledger::StatusPayload p{ledger::parse_status(status), note};
    return submit_and_wait(c, client, "/v1/reports/" + id.hex() + "/status",
                           make_tx(client, key, TxKind::StatusUpdate, id, ledger::encode_payload(p)));
}

int cmd_authority_delete(const Common& c, const std::string& report, const std::string& reason, const std::string& note) {
    auto key = load_key(c.key_file);
    GatewayClient client(c.node);
    auto id = ReportId::from_hex(report);
    ledger::DeletionPayload p{ledger::parse_deletion_reason(reason), note};
    return submit_and_wait(c, client, "/v1/reports/" + id.hex() + "/delete",
                           make_tx(client, key, TxKind::DeletionLog, id, ledger::encode_payload(p)));
}

int cmd_authority_merge(const Common& c, const std::string& report, const std::string& into) {
    auto key = load_key(c.key_file);
    GatewayClient client(c.node);
    auto id = ReportId::from_hex(report);
    ledger::MergePayload p{ReportId::from_hex(into)};
    return submit_and_wait(c, client, "/v1/reports/" + id.hex() + "/merge",
                           make_tx(client, key, TxKind::Merge, id, ledger::encode_payload(p)));
}

int cmd_register_auditor(const Common& c, const std::string& auditor) {
    auto key = load_key(c.key_file);
    GatewayClient client(c.node);
    ledger::RegisterAuditorPayload p{parse_public_key(auditor)};
    return submit_and_wait(c, client, "/v1/consortium/auditors",
                           make_tx(client, key, TxKind::RegisterAuditor, std::nullopt, ledger::encode_payload(p)));
}

int cmd_inspect_chain(const Common& c, std::optional<std::uint64_t> from, std::optional<std::uint64_t> to) {
    GatewayClient client(c.node);
    auto head = client.head();
    auto height = head.at("height").get<std::uint64_t>();
    std::cout << "chain " << head.at("chain_id").get<std::string>() << " height " << height << " head "
              << head.at("head_hash").get<std::string>() << "\n";
    std::uint64_t lo = from.value_or(0);
    std::uint64_t hi = std::min(to.value_or(height), height);
    for (auto h = lo; h < hi; ++h) {
        auto b = client.block(h);
        std::cout << h << "  " << b.at("hash").get<std::string>().substr(0, 16) << "  producer "
                  << b.at("producer").get<std::string>().substr(0, 16) << "  txs " << b.at("txs").size();
        for (const auto& tx : b.at("txs"))
            std::cout << " " << tx.at("kind").get<std::string>();
        std::cout << "\n";
    }
    return 0;
}

int cmd_inspect_report(const Common& c, const std::string& report) {
    GatewayClient client(c.node);
    std::cout << client.report(ReportId::from_hex(report)).dump(2) << "\n";
    return 0;
}

} // namespace acrp::cli
