#include "acrp/bundle.hpp"

namespace acrp {

FieldMessages field_messages(const Report& r, chunking::TextGranularity granularity) {
    auto id = report_id(r);
    return {chunking::chunk_location(r.location.lat, r.location.lon, id.digest),
            chunking::chunk_image(r.picture, r.scheme, id.digest),
            chunking::chunk_text(r.description, granularity, id.digest)};
}

ReportBundle sign_report(const SigningKey& sk, Report report, chunking::TextGranularity granularity,
                         std::optional<Bytes> seed) {
    auto msgs = field_messages(report, granularity);
    ReportBundle b{std::move(report), granularity, {}};
    for (std::size_t i = 0; i < msgs.size(); ++i) {
        std::optional<rss::Seed> root_seed;
        if (seed) {
            auto d = Hasher().add("acrp-field-seed").add(*seed).add_u8(static_cast<std::uint8_t>(i)).finish();
            root_seed.emplace();
            std::copy_n(d.begin(), rss::kSeedSize, root_seed->begin());
        }
        b.signatures[i] = rss::sign_redactable(sk, msgs[i], root_seed);
    }
    return b;
}

bool verify_bundle(const ReportBundle& bundle) {
    try {
        auto msgs = field_messages(bundle.report, bundle.granularity);
        for (std::size_t i = 0; i < msgs.size(); ++i)
            if (!rss::verify_full(bundle.signatures[i].signer_pk, msgs[i], bundle.signatures[i]))
                return false;
        return true;
    } catch (const Error&) {
        return false;
    }
}

Bytes encode_bundle(const ReportBundle& bundle) {
    ByteWriter w;
    w.raw("ACRPB1");
    w.blob(canonical_encode(bundle.report));
    w.u8(static_cast<std::uint8_t>(bundle.granularity));
    for (const auto& s : bundle.signatures)
        w.blob(rss::encode(s));
    return std::move(w).take();
}

ReportBundle decode_bundle(ByteView bytes) {
    ByteReader r(bytes);
    if (to_string(r.raw(6)) != "ACRPB1")
        throw Error(Errc::Malformed, "not a report bundle");
    ReportBundle b;
    b.report = decode_report(r.blob());
    auto g = r.u8();
    if (g > static_cast<std::uint8_t>(chunking::TextGranularity::Sentences))
        throw Error(Errc::Malformed, "unknown text granularity");
    b.granularity = static_cast<chunking::TextGranularity>(g);
    for (auto& s : b.signatures)
        s = rss::decode_signature(r.blob());
    r.expect_end();
    return b;
}

bool SignatureCommitment::verify(const ReportId& id) const {
    return verify_signature(signer_pk, rss::signed_binding(root, n, field_tag, id.digest), root_signature);
}

bool SignatureCommitment::admits(const rss::RedactedMessage& msg) const {
    if (msg.field_tag != field_tag || msg.n != n || msg.signer_pk != signer_pk ||
        msg.root_signature != root_signature)
        return false;
    auto recomputed = rss::recompute_root(msg);
    return recomputed && *recomputed == root && rss::verify_redacted(msg);
}

FieldCommitments commitments(const ReportBundle& bundle) {
    auto msgs = field_messages(bundle.report, bundle.granularity);
    FieldCommitments out;
    for (std::size_t i = 0; i < msgs.size(); ++i) {
        const auto& sig = bundle.signatures[i];
        out[i] = {msgs[i].field_tag, sig.n, rss::merkle_root(msgs[i], sig), sig.root_signature, sig.signer_pk};
    }
    return out;
}

RedactedFields redact_bundle(const ReportBundle& bundle, const RedactionRequest& request) {
    auto msgs = field_messages(bundle.report, bundle.granularity);
    std::set<std::uint32_t> location;
    if (request.location)
        location.insert(0);
    std::set<std::uint32_t> picture;
    for (auto cell : request.picture_cells) {
        if (std::size_t{cell} + 1 >= msgs[1].chunks.size())
            throw Error(Errc::IndexOutOfRange, "picture cell " + std::to_string(cell));
        picture.insert(chunking::picture_chunk_index(cell));
    }
    return {rss::redact(msgs[0], bundle.signatures[0], location),
            rss::redact(msgs[1], bundle.signatures[1], picture),
            rss::redact(msgs[2], bundle.signatures[2], request.description_chunks)};
}

} // namespace acrp
