#include "acrp/gateway/json_views.hpp"

namespace acrp::gateway {

json tx_json(const ledger::Transaction& tx) {
    json j{{"ref", to_hex(tx.ref())},
           {"kind", ledger::to_string(tx.kind)},
           {"sender", tx.sender.hex()},
           {"payload", to_base64(tx.payload)},
           {"signature", to_hex(tx.signature.bytes)}};
    j["report_id"] = tx.report_id ? json(tx.report_id->hex()) : json(nullptr);
    return j;
}

json block_json(const ledger::Block& block) {
    json txs = json::array();
    for (const auto& tx : block.txs)
        txs.push_back(tx_json(tx));
    return {{"height", block.header.height},
            {"hash", to_hex(block.hash)},
            {"prev_hash", to_hex(block.header.prev_hash)},
            {"producer", block.header.producer.hex()},
            {"timestamp", block.header.timestamp},
            {"tx_root", to_hex(block.header.tx_root)},
            {"producer_signature", to_hex(block.producer_signature.bytes)},
            {"txs", std::move(txs)},
            {"encoded", to_base64(ledger::encode(block))}};
}

json commitment_json(const SignatureCommitment& c) {
    return {{"field", rss::to_string(c.field_tag)},
            {"n", c.n},
            {"root", to_hex(c.root)},
            {"root_signature", to_hex(c.root_signature.bytes)},
            {"signer", c.signer_pk.hex()}};
}

json scheme_json(const chunking::ChunkingScheme& scheme) {
    json regions = json::array();
    for (const auto& r : scheme.regions)
        regions.push_back({r.x, r.y, r.w, r.h});
    static constexpr const char* kModes[] = {"GridCoarse", "GridFine", "ObjectBased", "TextWords", "LocationAtomic"};
    auto mode = static_cast<std::size_t>(scheme.mode);
    return {{"mode", mode < std::size(kModes) ? kModes[mode] : "unknown"},
            {"rows", scheme.rows},
            {"cols", scheme.cols},
            {"regions", std::move(regions)}};
}

json field_json(const rss::RedactedMessage& msg) {
    json slots = json::array();
    for (const auto& slot : msg.slots) {
        if (const auto* p = std::get_if<rss::Present>(&slot))
            slots.push_back({{"chunk", to_base64(p->chunk)}});
        else
            slots.push_back({{"commitment", to_hex(std::get<rss::Redacted>(slot).commitment)}});
    }
    auto redacted = msg.redacted_indices();
    json j{{"field", rss::to_string(msg.field_tag)},
           {"n", msg.n},
           {"redacted", redacted},
           {"slots", std::move(slots)},
           {"verified", rss::verify_redacted(msg)},
           {"encoded", to_base64(rss::encode(msg))}};

    auto present = [&](std::size_t i) { return std::get_if<rss::Present>(&msg.slots.at(i)); };
    switch (msg.field_tag) {
    case rss::FieldTag::Location:
        if (const auto* p = present(0)) {
            try {
                auto [lat, lon] = chunking::decode_location_chunk(p->chunk);
                j["location"] = {{"lat", lat}, {"lon", lon}};
            } catch (const Error&) {
                j["location"] = nullptr;
            }
        } else {
            j["location"] = nullptr;
        }
        break;
    case rss::FieldTag::Description: {
        std::string text;
        for (std::size_t i = 0; i < msg.slots.size(); ++i) {
            if (const auto* p = present(i)) {
                if (p->chunk != chunking::kEmptyTextMarker)
                    text += to_string(p->chunk);
            } else {
                text += kRedactedText;
                text += ' ';
            }
        }
        j["text"] = text;
        break;
    }
    case rss::FieldTag::Picture:
        if (const auto* p = present(0)) {
            try {
                j["scheme"] = scheme_json(chunking::decode_scheme_header(p->chunk));
                if (auto size = chunking::infer_picture_size(msg))
                    j["size"] = {{"width", size->first}, {"height", size->second}};
                else
                    j["size"] = nullptr;
            } catch (const Error&) {
                j["scheme"] = nullptr;
            }
        }
        break;
    }
    return j;
}

namespace {

json trace_json(const std::vector<ledger::TraceEntry>& trace) {
    json out = json::array();
    for (const auto& t : trace) {
        json e{{"height", t.height}, {"event", ledger::to_string(t.event)}, {"phase", ledger::to_string(t.phase)}};
        e["tx_ref"] = t.tx_ref == Digest{} ? json(nullptr) : json(to_hex(t.tx_ref));
        out.push_back(std::move(e));
    }
    return out;
}

} // namespace

json record_summary(const ReportId& id, const ledger::ReportRecord& rec) {
    json j{{"id", id.hex()},
           {"phase", ledger::to_string(rec.phase)},
           {"announcer", rec.announcer.hex()},
           {"announce_height", rec.announce_height},
           {"score", rec.score()},
           {"votes", rec.votes},
           {"merged_votes", rec.merged_votes},
           {"rejected", rec.rejected},
           {"forced_publish", rec.forced_publish},
           {"disputed", rec.disputed}};
    if (rec.commit_height) {
        j["commit_height"] = *rec.commit_height;
        j["type"] = to_string(rec.type);
        j["auditor"] = rec.auditor.hex();
        j["auditor_index"] = rec.auditor_index;
    } else {
        j["commit_height"] = nullptr;
        j["type"] = nullptr;
    }
    j["location"] = rec.location ? json{{"lat", rec.location->lat}, {"lon", rec.location->lon}} : json(nullptr);
    j["merged_into"] = rec.merged_into ? json(rec.merged_into->hex()) : json(nullptr);
    j["deletion_reason"] = rec.deletion_reason ? json(ledger::to_string(*rec.deletion_reason)) : json(nullptr);
    return j;
}

json report_view(const ReportId& id, const ledger::ReportRecord& rec, const std::optional<RedactedFields>& fields) {
    json j = record_summary(id, rec);
    if (rec.commit_height) {
        json cs = json::array();
        for (const auto& c : rec.commitments)
            cs.push_back(commitment_json(c));
        j["commitments"] = std::move(cs);
        j["storage_key"] = to_hex(rec.storage_key);
    }
    j["audit_tx"] = rec.audit_tx ? json(to_hex(*rec.audit_tx)) : json(nullptr);
    j["redacted"] = {{"location", rec.redacted[0]}, {"picture", rec.redacted[1]}, {"description", rec.redacted[2]}};
    json comments = json::array();
    for (const auto& c : rec.comments)
        comments.push_back(to_hex(c));
    j["comments"] = std::move(comments);
    j["trace"] = trace_json(rec.trace);
    if (fields) {
        json f = json::object();
        for (const auto& msg : *fields)
            f[std::string(rss::to_string(msg.field_tag))] = field_json(msg);
        j["fields"] = std::move(f);
    } else {
        j["fields"] = nullptr;
    }
    return j;
}

json duplicate_json(const community::DuplicateCandidate& c) {
    return {{"report_a", c.report_a.hex()},
            {"report_b", c.report_b.hex()},
            {"distance_m", c.distance_m},
            {"same_type", c.same_type}};
}

} // namespace acrp::gateway
