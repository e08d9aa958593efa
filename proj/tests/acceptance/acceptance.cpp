// Acceptance suite: one PASS/FAIL line per platform-level property. Exits 1 if any fails.

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "acrp/community.hpp"
#include "acrp/dispute.hpp"
#include "acrp/gateway/client.hpp"
#include "acrp/gateway/server.hpp"
#include "harness.hpp"
#include "process.hpp"
#include "ref_model.hpp"

using namespace acrp;
using namespace acrp::ledger;
using testing::Harness;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

/// Accumulates failures; the first few are kept for the report line.
struct Check {
    std::size_t failures = 0;
    std::vector<std::string> first;

    void expect(bool ok, const std::string& what) {
        if (ok)
            return;
        ++failures;
        if (first.size() < 3)
            first.push_back(what);
    }
    std::string summary() const {
        std::string s = std::to_string(failures) + " failure(s)";
        for (const auto& f : first)
            s += "; " + f;
        return s;
    }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int precision = 2) {
    std::ostringstream o;
    o.setf(std::ios::fixed);
    o.precision(precision);
    o << v;
    return o.str();
}

std::set<std::uint32_t> random_subset(std::mt19937_64& rng, std::uint32_t n) {
    std::set<std::uint32_t> s;
    for (std::uint32_t i = 0; i < n; ++i)
        if (rng() % 2)
            s.insert(i);
    return s;
}

rss::ChunkedMessage random_message(std::mt19937_64& rng, std::uint32_t n) {
    rss::ChunkedMessage m;
    m.field_tag = static_cast<rss::FieldTag>(rng() % 3);
    for (auto& b : m.context)
        b = static_cast<std::uint8_t>(rng());
    for (std::uint32_t i = 0; i < n; ++i) {
        Bytes c(1 + rng() % 48);
        for (auto& b : c)
            b = static_cast<std::uint8_t>(rng());
        m.chunks.push_back(std::move(c));
    }
    return m;
}

bool verifies_after_flip(const Bytes& encoded, std::size_t at, std::uint8_t mask, const Digest& context) {
    Bytes t = encoded;
    t[at] ^= mask;
    try {
        return rss::verify_redacted(rss::decode_redacted(t, context));
    } catch (const Error&) {
        return false;
    }
}

// ---------------------------------------------------------------------------------------------

Outcome rss_properties() {
    std::mt19937_64 rng(20240501);
    Check c;
    auto t0 = Clock::now();
    for (int iter = 0; iter < 500; ++iter) {
        auto n = static_cast<std::uint32_t>(1 + rng() % 64);
        auto msg = random_message(rng, n);
        auto sk = testing::test_key("rss/" + std::to_string(iter % 7));
        auto sig = rss::sign_redactable(sk, msg);
        std::string tag = "case " + std::to_string(iter) + " n=" + std::to_string(n);
        c.expect(rss::verify_full(sk.public_key(), msg, sig), tag + ": full verify");

        auto drop = random_subset(rng, n);
        auto red = rss::redact(msg, sig, drop);
        c.expect(rss::verify_redacted(red), tag + ": redacted verify");
        c.expect(red.redacted_indices() == drop, tag + ": redacted set");

        // One-byte tampering: a chunk of the original, the signature, and the published artifact.
        auto bad = msg;
        auto& chunk = bad.chunks[rng() % n];
        chunk[rng() % chunk.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
        c.expect(!rss::verify_full(sk.public_key(), bad, sig), tag + ": tampered chunk accepted");
        auto bad_sig = sig;
        bad_sig.root_signature.bytes[rng() % 64] ^= 0x20;
        c.expect(!rss::verify_full(sk.public_key(), msg, bad_sig), tag + ": tampered signature accepted");
        auto encoded = rss::encode(red);
        auto at = rng() % encoded.size();
        c.expect(!verifies_after_flip(encoded, at, static_cast<std::uint8_t>(1 + rng() % 255), msg.context),
                 tag + ": tampered artifact byte " + std::to_string(at) + " accepted");

        // Composition: redacting in two steps equals redacting the union at once.
        std::set<std::uint32_t> a, b;
        for (auto i : drop)
            (rng() % 2 ? a : b).insert(i);
        auto two_step = rss::redact(rss::redact(msg, sig, a), b);
        c.expect(two_step == red, tag + ": composition law");
        c.expect(rss::verify_redacted(two_step), tag + ": composed verify");
    }
    double secs = seconds_since(t0);
    c.expect(secs < 60.0, "runtime " + fmt(secs) + " s");
    return {c.failures == 0, "500 cases in " + fmt(secs) + " s, " + c.summary()};
}

Outcome size_law() {
    // Constants are fitted on n in {4, 16} and must bound every measurement, including n in {64, 256}.
    std::mt19937_64 rng(77);
    auto sk = testing::test_key("size");
    struct Point {
        std::uint32_t n, k;
        std::size_t bytes;
    };
    std::vector<Point> points;
    for (std::uint32_t n : {4u, 16u, 64u, 256u}) {
        auto msg = random_message(rng, n);
        auto sig = rss::sign_redactable(sk, msg);
        for (std::uint32_t k : {0u, 1u, n / 4, n}) {
            // Several random subsets per (n, k), plus the contiguous prefix.
            for (int trial = 0; trial < 8; ++trial) {
                std::vector<std::uint32_t> idx(n);
                std::iota(idx.begin(), idx.end(), 0u);
                if (trial > 0)
                    std::shuffle(idx.begin(), idx.end(), rng);
                std::set<std::uint32_t> drop(idx.begin(), idx.begin() + k);
                points.push_back({n, k, rss::overhead_bytes(rss::redact(msg, sig, drop))});
            }
        }
    }
    auto log2c = [](std::uint32_t n) { return static_cast<double>(rss::tree_depth(n)); };
    double c0 = 0, c1 = 0;
    for (const auto& p : points)
        if (p.n <= 16 && p.k == 0)
            c0 = std::max(c0, static_cast<double>(p.bytes));
    for (const auto& p : points)
        if (p.n <= 16 && p.k > 0)
            c1 = std::max(c1, (static_cast<double>(p.bytes) - c0) / (p.k * log2c(p.n)));
    std::size_t violations = 0;
    std::string worst;
    for (const auto& p : points) {
        double bound = c0 + c1 * p.k * log2c(p.n);
        if (static_cast<double>(p.bytes) > bound + 1e-9) {
            ++violations;
            worst = "n=" + std::to_string(p.n) + " k=" + std::to_string(p.k) + " bytes=" + std::to_string(p.bytes);
        }
    }
    std::string detail = "C0=" + fmt(c0) + " C1=" + fmt(c1) + " over " + std::to_string(points.size()) +
                         " measurements, " + std::to_string(violations) + " violations";
    std::cout << "  size law fit: overhead <= " << fmt(c0) << " + " << fmt(c1) << " * k * ceil(log2 n)\n";
    for (std::uint32_t n : {4u, 16u, 64u, 256u}) {
        std::cout << "  n=" << n << " max overhead:";
        std::map<std::uint32_t, std::size_t> max_by_k;
        for (const auto& p : points)
            if (p.n == n)
                max_by_k[p.k] = std::max(max_by_k[p.k], p.bytes);
        for (const auto& [k, b] : max_by_k)
            std::cout << " k=" << k << ":" << b << "B";
        std::cout << "\n";
    }
    if (!worst.empty())
        detail += " (e.g. " + worst + ")";
    return {violations == 0, detail};
}

/// All 5-byte windows of `b`.
void windows(const Bytes& b, std::set<std::string>& out) {
    for (std::size_t i = 0; i + 5 <= b.size(); ++i)
        out.insert(std::string(reinterpret_cast<const char*>(b.data() + i), 5));
}

constexpr std::ptrdiff_t kCellGeometryBytes = 16;

Outcome hiding() {
    std::mt19937_64 rng(555);
    Check c;
    std::size_t distinct = 0, checked_windows = 0;
    for (int iter = 0; iter < 200; ++iter) {
        auto report = testing::random_report(rng);
        auto sk = testing::test_key("citizen/" + std::to_string(iter % 8));
        auto first = sign_report(sk, report, chunking::TextGranularity::Words, to_bytes("one/" + std::to_string(iter)));
        auto second = sign_report(sk, report, chunking::TextGranularity::Words, to_bytes("two/" + std::to_string(iter)));

        RedactionRequest req;
        req.location = rng() % 2;
        auto cells = static_cast<std::uint32_t>(first.report.scheme.rows * first.report.scheme.cols);
        req.picture_cells = random_subset(rng, cells);
        auto words = static_cast<std::uint32_t>(field_messages(report, chunking::TextGranularity::Words)[2].chunks.size());
        req.description_chunks = random_subset(rng, words);
        if (req.picture_cells.empty())
            req.picture_cells.insert(0);

        AuditDecisionPayload decision;
        decision.fields = redact_bundle(first, req);
        auto artifact = encode_payload(decision);
        std::string haystack(artifact.begin(), artifact.end());

        // Windows of redacted content that also occur in content still shown are not secrets, and
        // neither is the cell geometry prefix (x, y, w, h) that the public grid layout determines.
        auto messages = field_messages(report, chunking::TextGranularity::Words);
        std::set<std::string> shown, hidden;
        for (std::size_t f = 0; f < 3; ++f) {
            auto redacted = (*decision.fields)[f].redacted_indices();
            for (std::uint32_t i = 0; i < messages[f].chunks.size(); ++i) {
                Bytes content = messages[f].chunks[i];
                if (f == 1 && i > 0)
                    content.erase(content.begin(), content.begin() + kCellGeometryBytes);
                windows(content, redacted.contains(i) ? hidden : shown);
            }
        }
        for (const auto& w : hidden) {
            if (shown.contains(w))
                continue;
            ++checked_windows;
            auto at = haystack.find(w);
            c.expect(at == std::string::npos, "report " + std::to_string(iter) + " leaks window " +
                                                  to_hex(as_bytes(w)) + " at " + std::to_string(at) + "/" +
                                                  std::to_string(haystack.size()));
        }

        // Same content, independent signings: every redacted slot digest differs.
        auto other = redact_bundle(second, req);
        bool all_differ = true;
        for (std::size_t f = 0; f < 3; ++f)
            for (std::size_t i = 0; i < other[f].slots.size(); ++i)
                if (const auto* r = std::get_if<rss::Redacted>(&other[f].slots[i]))
                    all_differ &= std::get<rss::Redacted>((*decision.fields)[f].slots[i]).commitment != r->commitment;
        distinct += all_differ;
    }
    c.expect(distinct >= 199, "distinct digests in " + std::to_string(distinct) + "/200");
    return {c.failures == 0, std::to_string(checked_windows) + " redacted 5-byte windows absent from artifacts; distinct digests " +
                                 std::to_string(distinct) + "/200; " + c.summary()};
}

Outcome lifecycle() {
    auto dir = testing::temp_dir("accept-lifecycle");
    Check c;
    std::mt19937_64 rng(4242);
    std::size_t handled = 0;
    {
        Harness h(20, 4, 4, 8, dir);
        const auto& citizens = h.actors().citizens;
        std::vector<ReportBundle> bundles;
        for (int i = 0; i < 50; ++i)
            bundles.push_back(h.sign(testing::random_report(rng), citizens[i % citizens.size()]));

        // 1. announce all at once; 2. beacon, auditor selection, commit.
        for (std::size_t i = 0; i < bundles.size(); ++i)
            h.submit(h.announce_tx(bundles[i], citizens[i % citizens.size()]));
        h.step();
        h.step();
        for (std::size_t i = 0; i < bundles.size(); ++i)
            h.submit(h.commit_tx(bundles[i], citizens[i % citizens.size()]));
        h.step();
        // 3./4. audit: most published with random redactions, some rejected.
        for (std::size_t i = 0; i < bundles.size(); ++i) {
            const auto& b = bundles[i];
            const auto& auditor = h.actors().auditor_for(h.record(b.id()).auditor);
            if (i % 10 == 9) {
                h.submit(h.reject_tx(b, RejectReason::LowQuality, auditor));
            } else {
                RedactionRequest req;
                req.location = i % 7 == 0;
                req.picture_cells = random_subset(rng, 16);
                h.submit(h.audit_tx(b, req, auditor));
            }
        }
        h.step();
        // 5. authority handling.
        for (const auto& b : bundles) {
            auto rec = h.record(b.id());
            const auto& authority = h.actors().authority_for(rec.type);
            if (rec.rejected)
                h.submit(h.delete_tx(b.id(), DeletionReason::NotActionable, authority));
            else
                h.submit(h.status_tx(b.id(), HandlingStatus::Acknowledged, authority));
        }
        h.step();
        for (std::size_t i = 0; i < bundles.size(); ++i) {
            const auto& b = bundles[i];
            auto rec = h.record(b.id());
            const auto& authority = h.actors().authority_for(rec.type);
            if (rec.phase != Phase::Acknowledged)
                continue;
            if (i % 3 == 0)
                h.submit(h.status_tx(b.id(), HandlingStatus::InProgress, authority));
            else if (i % 3 == 1)
                h.submit(h.status_tx(b.id(), HandlingStatus::Resolved, authority));
            else if (i % 5 == 2)
                h.submit(h.delete_tx(b.id(), DeletionReason::IllicitContent, authority));
        }
        h.step();
        h.run(3);

        c.expect(h.network().node(0).rejection_log().empty(), "unexpected rejections");
        for (const auto& b : bundles) {
            auto p = h.record(b.id()).phase;
            bool ok = p == Phase::Acknowledged || p == Phase::InProgress || is_terminal(p);
            handled += ok;
            c.expect(ok, "report left in " + std::string(to_string(p)));
        }

        auto live = h.state()->serialize();
        for (std::size_t n = 0; n < h.network().size(); ++n) {
            c.expect(h.network().node(n).state()->serialize() == live, "node " + std::to_string(n) + " live state differs");
            auto replay = validate_chain(h.genesis(), read_chain_dir(dir / ("node-" + std::to_string(n))));
            c.expect(replay.valid(), "node " + std::to_string(n) + " replay invalid: " + replay.reason);
            if (replay.valid())
                c.expect(replay.state->serialize() == live, "node " + std::to_string(n) + " replay differs");
        }
    }
    std::filesystem::remove_all(dir);
    return {c.failures == 0, std::to_string(handled) + "/50 reports handled or terminal; 4 nodes replayed from disk; " +
                                 c.summary()};
}

Outcome immutability() {
#ifndef ACRP_CLI_PATH
    return {false, "acrp CLI not built (configure with ACRP_BUILD_TOOLS=ON)"};
#else
    auto dir = testing::temp_dir("accept-immutability");
    Check c;
    std::size_t detected = 0;
    {
        Harness h(20, 4, 4, 8, dir);
        std::mt19937_64 rng(99);
        std::vector<ReportId> published;
        for (int i = 0; h.state()->height() < 100; ++i) {
            const auto& citizen = h.actors().citizens[i % 8];
            auto b = h.sign(testing::random_report(rng), citizen);
            h.submit(h.announce_tx(b, citizen));
            h.step();
            // The beacon block carries votes so that almost every block holds transactions.
            for (const auto& id : published)
                if (rng() % 3 == 0)
                    h.submit(h.vote_tx(id, testing::test_key("voter/" + std::to_string(i))));
            h.step();
            h.submit(h.commit_tx(b, citizen));
            h.step();
            h.submit(h.audit_tx(b, {}, h.actors().auditor_for(h.record(b.id()).auditor)));
            h.step();
            published.push_back(b.id());
        }
        c.expect(h.state()->height() == 100, "chain height " + std::to_string(h.state()->height()));
    }
    auto chain = dir / "node-0";
    auto files = std::vector<std::filesystem::path>();
    for (const auto& e : std::filesystem::directory_iterator(chain / "blocks"))
        files.push_back(e.path());
    std::sort(files.begin(), files.end());

    auto verify = [&] { return testing::run_command({ACRP_CLI_PATH, "verify", "--chain", chain.string()}); };
    auto clean = verify();
    c.expect(clean.exit_code == 0, "unmodified chain: " + clean.out);

    std::mt19937_64 rng(1234);
    for (int m = 0; m < 50; ++m) {
        // Pick a historical transaction and one of its bytes inside the block file.
        std::size_t height;
        Bytes raw;
        Block block;
        do {
            height = rng() % files.size();
            std::ifstream in(files[height], std::ios::binary);
            raw.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
            block = decode_block(raw);
        } while (block.txs.empty());
        auto tx_bytes = encode(block.txs[rng() % block.txs.size()]);
        auto pos = std::search(raw.begin(), raw.end(), tx_bytes.begin(), tx_bytes.end()) - raw.begin();
        auto at = static_cast<std::size_t>(pos) + rng() % tx_bytes.size();
        auto original = raw[at];
        raw[at] ^= static_cast<std::uint8_t>(1 + rng() % 255);
        std::ofstream(files[height], std::ios::binary | std::ios::trunc)
            .write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));

        auto r = verify();
        bool ok = r.exit_code != 0 && r.out.find("first invalid height " + std::to_string(height) + ":") != std::string::npos;
        detected += ok;
        c.expect(ok, "mutation at block " + std::to_string(height) + " byte " + std::to_string(at) + ": " + r.out);

        raw[at] = original;
        std::ofstream(files[height], std::ios::binary | std::ios::trunc)
            .write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    }
    c.expect(verify().exit_code == 0, "restored chain no longer verifies");
    std::filesystem::remove_all(dir);
    return {c.failures == 0, std::to_string(detected) + "/50 single-byte mutations detected at the right height over " +
                                 std::to_string(files.size()) + " blocks; " + c.summary()};
#endif
}

Outcome auditor_uniformity() {
    Harness h(20, 4, 8, 8);
    std::mt19937_64 rng(8);
    std::vector<ReportId> ids;
    for (int i = 0; i < 10'000; ++i) {
        auto r = testing::random_report(rng, 4, 4);
        r.description += " #" + std::to_string(i);
        ids.push_back(report_id(r));
        const auto& citizen = h.actors().citizens[static_cast<std::size_t>(i) % 8];
        h.submit(h.tx(TxKind::Announce, ids.back(), encode_payload(AnnouncePayload{ids.back().digest}), citizen));
    }
    while (h.network().node(0).mempool_size() > 0)
        h.step();
    h.step();  // beacon for the last announce block

    Check c;
    c.expect(h.network().node(0).rejection_log().empty(), "announce rejected");
    std::array<std::uint64_t, 8> counts{};
    std::vector<std::uint32_t> live;
    const auto& hashes = h.state()->block_hashes();
    for (const auto& id : ids) {
        auto sel = h.state()->expected_auditor(id);
        live.push_back(sel.index);
        ++counts.at(sel.index);
        auto beacon = hashes.at(h.record(id).announce_height + 1);
        c.expect(oracle::auditor_index(id.digest, beacon, 8) == sel.index, "oracle disagrees");
    }
    double expected = ids.size() / 8.0, chi2 = 0;
    for (auto k : counts)
        chi2 += (k - expected) * (k - expected) / expected;
    double p = oracle::chi_square_sf(chi2, 7);
    c.expect(p > 0.01, "p=" + fmt(p, 4));

    auto replay = validate_chain(h.genesis(), h.network().node(0).blocks());
    std::size_t same = 0;
    if (replay.valid())
        for (std::size_t i = 0; i < ids.size(); ++i)
            same += replay.state->expected_auditor(ids[i]).index == live[i];
    c.expect(same == ids.size(), "replay reproduced " + std::to_string(same) + " assignments");

    std::string dist;
    for (auto k : counts)
        dist += std::to_string(k) + " ";
    return {c.failures == 0, "counts [" + dist + "] chi2=" + fmt(chi2) + " p=" + fmt(p, 4) + "; replay reproduced " +
                                 std::to_string(same) + "/10000; " + c.summary()};
}

Outcome disputes() {
    Harness h;
    const auto& citizen = h.actors().citizens[0];
    auto report = testing::simple_report(ReportType::Graffiti, {50'775'300, 6'083'900}, "tag on the wall by the blue door");
    auto bundle = h.sign(report, citizen);
    RedactionRequest req{true, {0, 3}, {5, 6}};
    h.announce_and_commit(bundle, citizen);
    h.publish(bundle, req);

    Check c;
    auto rec = h.record(bundle.id());
    auto tx = h.network().node(0).transaction(*rec.audit_tx);
    auto published = *decode_audit(tx->payload, bundle.id()).fields;

    std::vector<std::string> verdicts;
    for (int round = 0; round < 3; ++round) {
        auto honest = verify_dispute(bundle, bundle.id(), rec.commitments, published);
        std::array<std::set<std::uint32_t>, 3> diff{std::set<std::uint32_t>{0}, {1, 4}, {5, 6}};
        c.expect(honest.verdict == DisputeVerdict::Consistent, "honest: " + honest.detail);
        c.expect(honest.diff == diff, "honest diff");

        // The auditor swapped a shown word for another one.
        auto altered = published;
        auto& desc = altered[field_slot(rss::FieldTag::Description)];
        std::get<rss::Present>(desc.slots[3]).chunk = to_bytes("fence ");
        auto alt = verify_dispute(bundle, bundle.id(), rec.commitments, altered);
        c.expect(alt.verdict == DisputeVerdict::AlteredContent, "alteration: " + alt.detail);

        // The citizen brings a different original.
        auto wrong = h.sign(testing::simple_report(ReportType::Graffiti, {50'775'300, 6'083'900}, "other"), citizen);
        auto mismatch = verify_dispute(wrong, bundle.id(), rec.commitments, published);
        c.expect(mismatch.verdict == DisputeVerdict::HashMismatch, "wrong original: " + mismatch.detail);
        auto resigned = h.sign(report, citizen, "another seed");
        auto mismatch2 = verify_dispute(resigned, bundle.id(), rec.commitments, published);
        c.expect(mismatch2.verdict == DisputeVerdict::HashMismatch, "re-signed original: " + mismatch2.detail);

        verdicts.push_back(std::string(to_string(honest.verdict)) + "/" + std::string(to_string(alt.verdict)) + "/" +
                           std::string(to_string(mismatch.verdict)));
    }
    c.expect(verdicts[0] == verdicts[1] && verdicts[1] == verdicts[2], "verdicts vary between runs");
    return {c.failures == 0, verdicts[0] + " (x3, honest diff L{0} P{1,4} D{5,6}); " + c.summary()};
}

Outcome deletion_accountability() {
    Harness h;
    auto dir = testing::temp_dir("accept-deletion");
    storage::BlobStore store(dir);
    gateway::GatewayServer server(h.network(), store);
    int port = server.start();
    gateway::GatewayClient client("http://127.0.0.1:" + std::to_string(port));
    httplib::Client raw("127.0.0.1", port);
    Check c;

    const auto& citizen = h.actors().citizens[0];
    auto bundle = h.sign(testing::simple_report(ReportType::Graffiti, {50'775'300, 6'083'900}, "offensive tag"), citizen);
    auto key = client.put_blob(encode_bundle(bundle));
    h.announce_and_commit(bundle, citizen);
    h.publish(bundle);
    auto id = bundle.id();
    auto base = "/v1/reports/" + id.hex();
    const auto& city = h.actors().city;

    // Every other way to make the report disappear.
    std::size_t attempts = 0;
    for (const auto& path : {base, base + "/delete", "/v1/storage/" + to_hex(key), std::string("/v1/reports")}) {
        auto d = raw.Delete(path);
        c.expect(d && d->status >= 400, "DELETE " + path + " accepted");
        auto p = raw.Put(path, "{}", "application/json");
        c.expect(p && p->status >= 400, "PUT " + path + " accepted");
        attempts += 2;
    }
    auto post_tx = [&](const std::string& path, const Transaction& tx) {
        ++attempts;
        try {
            client.submit(path, tx);
            h.step();
            return true;
        } catch (const gateway::ApiError&) {
            return false;
        }
    };
    auto deletion = h.delete_tx(id, DeletionReason::IllicitContent, city);
    auto status = h.status_tx(id, HandlingStatus::Resolved, city);
    c.expect(!post_tx(base + "/delete", status), "status tx through the delete route");
    c.expect(!post_tx(base + "/status", deletion), "deletion tx through the status route");
    c.expect(!post_tx(base + "/audit", deletion), "deletion tx through the audit route");
    c.expect(!post_tx(base + "/comment", deletion), "deletion tx through the comment route");
    c.expect(!post_tx(base + "/delete", h.delete_tx(id, DeletionReason::IllicitContent, citizen)), "citizen deletion");
    c.expect(!post_tx(base + "/delete", h.delete_tx(id, DeletionReason::IllicitContent, h.actors().members[0])),
             "member deletion");
    auto forged = deletion;
    forged.sender = citizen.public_key();
    c.expect(!post_tx(base + "/delete", forged), "forged sender");
    c.expect(!post_tx(base + "/audit", h.reject_tx(bundle, RejectReason::IllicitContent,
                                                   h.actors().auditor_for(h.record(id).auditor))),
             "late audit rejection");
    c.expect(h.record(id).phase == Phase::Published, "report changed phase without a DeletionLog");

    // The logged deletion.
    c.expect(post_tx(base + "/delete", deletion), "legitimate deletion refused");
    auto rec = h.record(id);
    c.expect(rec.phase == Phase::Deleted && rec.deletion_reason == DeletionReason::IllicitContent, "not deleted");
    c.expect(!rec.trace.empty() && rec.trace.back().event == Event::DeletionLog &&
                 rec.trace.back().tx_ref == deletion.ref(),
             "deletion not logged");
    // Every Deleted report on chain carries a signed, reasoned log entry.
    for (const auto& [rid, r] : h.state()->reports())
        if (r.phase == Phase::Deleted)
            c.expect(r.deletion_reason.has_value() && std::any_of(r.trace.begin(), r.trace.end(), [](const TraceEntry& t) {
                         return (t.event == Event::DeletionLog || t.event == Event::MergedInto) && t.tx_ref != Digest{};
                     }),
                     "deleted report without log");

    // Storage GC keeps only what live reports reference.
    std::set<Digest> retain;
    for (const auto& [rid, r] : h.state()->reports())
        if (r.phase != Phase::Deleted)
            retain.insert(r.storage_key);
    auto removed = store.gc(retain);
    c.expect(removed == 1 && !store.contains(key), "original not collected");
    server.stop();

    // What remains verifiable from the chain alone.
    auto replay = validate_chain(h.genesis(), h.network().node(0).blocks());
    c.expect(replay.valid(), "chain invalid after deletion: " + replay.reason);
    bool announce_ok = false, commit_ok = false;
    for (const auto& block : h.network().node(0).blocks())
        for (const auto& tx : block.txs) {
            if (tx.report_id != id || !tx.verify(h.genesis().chain_id))
                continue;
            if (tx.kind == TxKind::Announce)
                announce_ok = decode_announce(tx.payload).report_hash == id.digest && tx.sender == citizen.public_key();
            if (tx.kind == TxKind::Commit) {
                auto p = decode_commit(tx.payload);
                commit_ok = std::all_of(p.commitments.begin(), p.commitments.end(),
                                        [&](const SignatureCommitment& sc) { return sc.verify(id); }) &&
                            p.storage_key == key;
            }
        }
    c.expect(announce_ok, "announce hash not verifiable");
    c.expect(commit_ok, "commit signatures not verifiable");
    std::filesystem::remove_all(dir);
    return {c.failures == 0, std::to_string(attempts) + " alternative paths refused; deletion logged; gc removed " +
                                 std::to_string(removed) + " object; announce/commit verify after gc; " + c.summary()};
}

/// Independent model of tallies for the fuzz.
struct Tally {
    struct Row {
        std::uint64_t own = 0, merged = 0, announce = 0;
        std::set<std::string> voters;
        std::optional<ReportId> into;
        bool open = true;
    };
    std::map<ReportId, Row> rows;

    ReportId resolve(ReportId id) const {
        while (rows.at(id).into)
            id = *rows.at(id).into;
        return id;
    }
    bool vote(const ReportId& id, const std::string& voter) {
        auto& r = rows.at(resolve(id));
        if (!r.open || !r.voters.insert(voter).second)
            return false;
        ++r.own;
        return true;
    }
    void merge(const ReportId& from, const ReportId& to) {
        auto& f = rows.at(from);
        rows.at(to).merged += f.own + f.merged;
        f.open = false;
        f.into = to;
    }
    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (const auto& [id, r] : rows)
            t += r.open ? r.own + r.merged : 0;
        return t;
    }
};

Outcome duplicate_priority_fuzz() {
    Harness h;
    std::mt19937_64 rng(31337);
    std::vector<Report> reports;
    std::uniform_int_distribution<std::int32_t> jitter(-800, 800);  // within roughly 90 m
    for (int i = 0; i < 100; ++i) {
        auto r = testing::random_report(rng, 8, 8);
        r.type = static_cast<ReportType>(rng() % 3);
        r.location = {50'775'300 + jitter(rng), 6'083'900 + jitter(rng)};
        reports.push_back(r);
    }
    auto bundles = h.file_published_batch(reports);
    Check c;

    // Duplicates against brute-force pairwise distances.
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < bundles.size(); ++i) {
        std::set<ReportId> expected;
        for (std::size_t j = 0; j < bundles.size(); ++j) {
            if (i == j || reports[i].type != reports[j].type)
                continue;
            const auto &a = reports[i].location, &b = reports[j].location;
            double d = oracle::sphere_distance_m(a.lat / 1e6, a.lon / 1e6, b.lat / 1e6, b.lon / 1e6);
            if (d <= 50.0)
                expected.insert(bundles[j].id());
        }
        std::set<ReportId> got;
        for (const auto& d : community::find_duplicates(*h.state(), bundles[i].id()))
            got.insert(d.report_b);
        pairs += expected.size();
        c.expect(got == expected, "duplicates of report " + std::to_string(i));
    }

    Tally tally;
    for (const auto& b : bundles)
        tally.rows[b.id()].announce = h.record(b.id()).announce_height;
    std::vector<SigningKey> voters;
    for (int i = 0; i < 40; ++i)
        voters.push_back(testing::test_key("fuzz-voter/" + std::to_string(i)));

    std::size_t votes = 0, accepted_votes = 0, merges = 0;
    while (votes < 1000) {
        std::vector<std::pair<Digest, bool>> sent;
        std::set<std::pair<std::size_t, std::size_t>> in_block;
        for (int k = 0; k < 50 && votes < 1000; ++k) {
            std::size_t r = rng() % bundles.size(), v = rng() % voters.size();
            if (!in_block.insert({r, v}).second)
                continue;
            bool ok = tally.vote(bundles[r].id(), "v" + std::to_string(v));
            sent.push_back({h.submit(h.vote_tx(bundles[r].id(), voters[v])), ok});
            accepted_votes += ok;
            ++votes;
        }
        std::set<Digest> in_this_block;
        for (const auto& tx : h.step().txs)
            in_this_block.insert(tx.ref());
        for (const auto& [ref, ok] : sent)
            c.expect(in_this_block.contains(ref) == ok, "vote outcome differs from the tally model");
        if (votes % 50 == 0 && merges < 20) {
            // Merge a random open report into another open one of any type.
            std::vector<ReportId> open;
            for (const auto& [id, row] : tally.rows)
                if (row.open)
                    open.push_back(id);
            auto from = open[rng() % open.size()];
            auto to = open[rng() % open.size()];
            if (from == to)
                continue;
            auto before = community::total_live_score(*h.state());
            auto rc = h.apply(h.merge_tx(from, to, h.actors().authority_for(h.record(from).type)));
            c.expect(!rc, "merge rejected");
            if (!rc) {
                tally.merge(from, to);
                ++merges;
            }
            c.expect(community::total_live_score(*h.state()) == before, "merge changed the total score");
        }
    }
    while (merges < 20) {
        std::vector<ReportId> open;
        for (const auto& [id, row] : tally.rows)
            if (row.open)
                open.push_back(id);
        auto from = open[rng() % open.size()], to = open[rng() % open.size()];
        if (from == to)
            continue;
        auto before = community::total_live_score(*h.state());
        c.expect(!h.apply(h.merge_tx(from, to, h.actors().authority_for(h.record(from).type))), "merge rejected");
        tally.merge(from, to);
        ++merges;
        c.expect(community::total_live_score(*h.state()) == before, "merge changed the total score");
    }

    // Ranking and totals against the tally model.
    std::vector<std::tuple<std::uint64_t, std::uint64_t, ReportId>> model;
    for (const auto& [id, r] : tally.rows)
        if (r.open)
            model.push_back({r.own + r.merged, r.announce, id});
    std::sort(model.begin(), model.end(), [](const auto& a, const auto& b) {
        if (std::get<0>(a) != std::get<0>(b))
            return std::get<0>(a) > std::get<0>(b);
        return std::tie(std::get<1>(a), std::get<2>(a)) < std::tie(std::get<1>(b), std::get<2>(b));
    });
    auto ranking = community::priority_ranking(*h.state());
    c.expect(ranking.size() == model.size(), "ranking size");
    for (std::size_t i = 0; i < std::min(ranking.size(), model.size()); ++i)
        c.expect(ranking[i].report_id == std::get<2>(model[i]) && ranking[i].score == std::get<0>(model[i]),
                 "ranking position " + std::to_string(i));
    c.expect(community::total_live_score(*h.state()) == tally.total(), "total score");
    c.expect(tally.total() == accepted_votes, "votes not conserved");
    return {c.failures == 0, "100 reports (" + std::to_string(pairs) + " duplicate pairs), " + std::to_string(votes) +
                                 " votes (" + std::to_string(accepted_votes) + " accepted), " + std::to_string(merges) +
                                 " merges; total score " + std::to_string(tally.total()) + "; " + c.summary()};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"rss-properties", rss_properties},
        {"size-scaling-law", size_law},
        {"hiding", hiding},
        {"lifecycle-end-to-end", lifecycle},
        {"immutability-audit", immutability},
        {"auditor-selection-uniformity", auditor_uniformity},
        {"dispute-resolution", disputes},
        {"deletion-accountability", deletion_accountability},
        {"duplicate-priority-fuzz", duplicate_priority_fuzz},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << " (" << fmt(seconds_since(t0)) << " s): " << o.detail
                  << std::endl;
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
    return failed ? 1 : 0;
}
