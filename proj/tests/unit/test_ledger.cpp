#include <gtest/gtest.h>

#include <random>

#include "acrp/ledger_state.hpp"
#include "harness.hpp"
#include "ref_model.hpp"

using namespace acrp;
using namespace acrp::ledger;
using acrp::testing::Harness;

namespace {

Report graffiti(const std::string& text = "tag on the wall") {
    return acrp::testing::simple_report(ReportType::Graffiti, {50'775'300, 6'083'900}, text);
}

std::vector<Event> events(const ReportRecord& rec) {
    std::vector<Event> out;
    for (const auto& t : rec.trace)
        out.push_back(t.event);
    return out;
}

} // namespace

TEST(Apply, CommitBeforeAnnounceIsUnknownReport) {
    Harness h;
    auto b = h.sign(graffiti(), h.actors().citizens[0]);
    EXPECT_EQ(h.apply(h.commit_tx(b, h.actors().citizens[0], 0)), RejectCode::UnknownReport);
}

TEST(Apply, AnnounceChecks) {
    Harness h;
    const auto& c = h.actors().citizens[0];
    auto b = h.sign(graffiti(), c);
    auto wrong_hash = h.tx(TxKind::Announce, b.id(), encode_payload(AnnouncePayload{Digest{}}), c);
    EXPECT_EQ(h.apply(wrong_hash), RejectCode::HashMismatch);
    EXPECT_EQ(h.apply(h.announce_tx(b, c)), std::nullopt);
    EXPECT_EQ(h.apply(h.announce_tx(b, h.actors().citizens[1])), RejectCode::WrongPhase);
}

TEST(Apply, CommitChecks) {
    Harness h;
    const auto& c = h.actors().citizens[0];
    auto b = h.sign(graffiti(), c);
    ASSERT_EQ(h.apply(h.announce_tx(b, c)), std::nullopt);
    // Only the announce block exists; the beacon block is the one this commit would land in.
    EXPECT_EQ(h.apply(h.commit_tx(b, c, 0)), RejectCode::WrongPhase);

    auto expected = h.state()->expected_auditor(b.id());
    auto wrong_index = (expected.index + 1) % 4;
    EXPECT_EQ(h.apply(h.commit_tx(b, c, wrong_index)), RejectCode::AuditorMismatch);
    EXPECT_EQ(h.apply(h.commit_tx(b, h.actors().citizens[1], expected.index)), RejectCode::WrongRole);

    // Commitments signed for another report do not bind this id.
    auto other = h.sign(graffiti("different"), c);
    CommitPayload p{b.report.type, expected.index, commitments(other), sha256(encode_bundle(b))};
    EXPECT_EQ(h.apply(h.tx(TxKind::Commit, b.id(), encode_payload(p), c)), RejectCode::HashMismatch);

    // Field signatures from a different key than the committer.
    auto foreign = sign_report(h.actors().citizens[1], b.report, chunking::TextGranularity::Words, to_bytes("x"));
    p.commitments = commitments(foreign);
    EXPECT_EQ(h.apply(h.tx(TxKind::Commit, b.id(), encode_payload(p), c)), RejectCode::WrongRole);

    EXPECT_EQ(h.apply(h.commit_tx(b, c)), std::nullopt);
    EXPECT_EQ(h.record(b.id()).phase, Phase::Committed);
    EXPECT_EQ(h.apply(h.commit_tx(b, c)), RejectCode::WrongPhase);
}

TEST(Apply, AuditFromNonSelectedAuditorIsAuditorMismatch) {
    Harness h;
    auto b = h.sign(graffiti(), h.actors().citizens[0]);
    h.announce_and_commit(b, h.actors().citizens[0]);
    auto assigned = h.record(b.id()).auditor;
    for (const auto& a : h.actors().auditors) {
        if (a.public_key() == assigned)
            continue;
        EXPECT_EQ(h.apply(h.audit_tx(b, {}, a)), RejectCode::AuditorMismatch);
    }
    EXPECT_EQ(h.record(b.id()).phase, Phase::Committed);
}

TEST(Apply, AuditWithForeignArtifactsIsInvalidRedaction) {
    Harness h;
    const auto& c = h.actors().citizens[0];
    auto b = h.sign(graffiti(), c);
    auto other = h.sign(graffiti("another report entirely"), c);
    h.announce_and_commit(b, c);
    const auto& auditor = h.actors().auditor_for(h.record(b.id()).auditor);
    AuditDecisionPayload p;
    p.fields = redact_bundle(other, {});
    p.fields->at(0) = redact_bundle(b, {})[0];
    p.fields->at(1) = redact_bundle(b, {})[1];
    EXPECT_EQ(h.apply(h.tx(TxKind::AuditDecision, b.id(), encode_payload(p), auditor)), RejectCode::InvalidRedaction);

    // The scheme header must survive redaction.
    p.fields = redact_bundle(b, {});
    p.fields->at(1) = rss::redact(p.fields->at(1), {0});
    EXPECT_EQ(h.apply(h.tx(TxKind::AuditDecision, b.id(), encode_payload(p), auditor)), RejectCode::InvalidRedaction);
}

TEST(Apply, PublishIsNeverASubmittableTransaction) {
    Harness h;
    auto b = h.sign(graffiti(), h.actors().citizens[0]);
    h.announce_and_commit(b, h.actors().citizens[0]);
    const auto& auditor = h.actors().auditor_for(h.record(b.id()).auditor);
    EXPECT_EQ(h.apply(h.tx(TxKind::Publish, b.id(), {}, auditor)), RejectCode::WrongRole);
}

TEST(Apply, BadSignatureAndMalformed) {
    Harness h;
    auto b = h.sign(graffiti(), h.actors().citizens[0]);
    auto t = h.announce_tx(b, h.actors().citizens[0]);
    t.signature.bytes[0] ^= 1;
    EXPECT_EQ(h.apply(t), RejectCode::BadSignature);
    auto other_chain = Transaction::make(TxKind::Announce, b.id(), encode_payload(AnnouncePayload{b.id().digest}),
                                         h.actors().citizens[0], "another-chain");
    EXPECT_EQ(h.apply(other_chain), RejectCode::BadSignature);
    EXPECT_EQ(h.apply(h.tx(TxKind::Announce, b.id(), to_bytes("short"), h.actors().citizens[0])), RejectCode::Malformed);
    EXPECT_EQ(h.apply(h.tx(TxKind::Announce, std::nullopt, encode_payload(AnnouncePayload{}), h.actors().citizens[0])),
              RejectCode::Malformed);
}

// Scenario replayed and compared to a record constructed by hand.
TEST(Apply, HappyPathToResolved) {
    Harness h;
    const auto& c = h.actors().citizens[0];
    auto b = h.sign(graffiti(), c);
    auto announce = h.announce_tx(b, c);
    ASSERT_EQ(h.apply(announce), std::nullopt);        // block 0
    h.step();                                           // block 1: beacon
    auto commit = h.commit_tx(b, c);
    ASSERT_EQ(h.apply(commit), std::nullopt);          // block 2
    auto auditor_pk = h.record(b.id()).auditor;
    auto audit = h.audit_tx(b, {}, h.actors().auditor_for(auditor_pk));
    ASSERT_EQ(h.apply(audit), std::nullopt);           // block 3
    auto resolved = h.status_tx(b.id(), HandlingStatus::Resolved, h.actors().city);
    ASSERT_EQ(h.apply(resolved), std::nullopt);        // block 4

    ReportRecord expected;
    expected.phase = Phase::Resolved;
    expected.announcer = c.public_key();
    expected.announce_height = 0;
    expected.commit_height = 2;
    expected.type = ReportType::Graffiti;
    auto sel = oracle::auditor_index(b.id().digest, h.state()->block_hashes()[1], 4);
    expected.auditor_index = sel;
    expected.auditor = h.actors().auditors[sel].public_key();
    expected.commitments = commitments(b);
    expected.storage_key = sha256(encode_bundle(b));
    expected.audit_tx = audit.ref();
    expected.location = GeoPoint{50'775'300, 6'083'900};
    expected.trace = {{0, Event::Announce, announce.ref(), Phase::Announced},
                      {2, Event::Commit, commit.ref(), Phase::Committed},
                      {3, Event::AuditDecision, audit.ref(), Phase::Audited},
                      {3, Event::Publish, Digest{}, Phase::Published},
                      {4, Event::StatusUpdate, resolved.ref(), Phase::Resolved}};
    EXPECT_EQ(h.record(b.id()), expected);
    EXPECT_TRUE(is_terminal(h.record(b.id()).phase));
}

TEST(Apply, RedactedLocationIsNotPublic) {
    Harness h;
    auto id = h.file_published(graffiti(), 0, RedactionRequest{true, {1}, {0}});
    auto rec = h.record(id);
    EXPECT_EQ(rec.phase, Phase::Published);
    EXPECT_FALSE(rec.location);
    EXPECT_EQ(rec.redacted[0], (std::set<std::uint32_t>{0}));
    EXPECT_EQ(rec.redacted[1], (std::set<std::uint32_t>{2}));
    EXPECT_EQ(rec.redacted[2], (std::set<std::uint32_t>{0}));
}

TEST(Apply, HandlingStatusOrderAndRole) {
    Harness h;
    auto id = h.file_published(acrp::testing::simple_report(ReportType::Pothole, {1, 1}, "hole"));
    EXPECT_EQ(h.apply(h.status_tx(id, HandlingStatus::Acknowledged, h.actors().city)), RejectCode::WrongRole);
    EXPECT_EQ(h.apply(h.status_tx(id, HandlingStatus::InProgress, h.actors().roads)), std::nullopt);
    EXPECT_EQ(h.apply(h.status_tx(id, HandlingStatus::Acknowledged, h.actors().roads)), RejectCode::WrongPhase);
    EXPECT_EQ(h.apply(h.status_tx(id, HandlingStatus::Resolved, h.actors().roads)), std::nullopt);
    EXPECT_EQ(h.apply(h.status_tx(id, HandlingStatus::Resolved, h.actors().roads)), RejectCode::WrongPhase);
}

TEST(Apply, DeletionNeedsTheAuthorityAndAPublicOrRejectedReport) {
    Harness h;
    const auto& c = h.actors().citizens[0];
    auto b = h.sign(graffiti(), c);
    h.announce_and_commit(b, c);
    EXPECT_EQ(h.apply(h.delete_tx(b.id(), DeletionReason::NotActionable, h.actors().city)), RejectCode::WrongPhase);

    const auto& auditor = h.actors().auditor_for(h.record(b.id()).auditor);
    ASSERT_EQ(h.apply(h.reject_tx(b, RejectReason::Spam, auditor)), std::nullopt);
    EXPECT_EQ(h.record(b.id()).phase, Phase::Audited);
    EXPECT_TRUE(h.record(b.id()).rejected);
    EXPECT_EQ(h.apply(h.delete_tx(b.id(), DeletionReason::IllicitContent, h.actors().roads)), RejectCode::WrongRole);
    EXPECT_EQ(h.apply(h.delete_tx(b.id(), DeletionReason::IllicitContent, h.actors().city)), std::nullopt);
    EXPECT_EQ(h.record(b.id()).phase, Phase::Deleted);
    EXPECT_EQ(h.record(b.id()).deletion_reason, DeletionReason::IllicitContent);
    EXPECT_EQ(h.apply(h.delete_tx(b.id(), DeletionReason::IllicitContent, h.actors().city)), RejectCode::WrongPhase);

    auto published = h.file_published(graffiti("another one"), 1);
    EXPECT_EQ(h.apply(h.delete_tx(published, DeletionReason::NotActionable, c)), RejectCode::WrongRole);
    EXPECT_EQ(h.apply(h.delete_tx(published, DeletionReason::NotActionable, h.actors().city)), std::nullopt);
    EXPECT_EQ(events(h.record(published)).back(), Event::DeletionLog);
}

TEST(Apply, DisputeEvidenceOnlyFromTheAnnouncer) {
    Harness h;
    auto id = h.file_published(graffiti(), 0);
    auto payload = encode_payload(DisputePayload{Digest{}, DisputeVerdict::Consistent});
    EXPECT_EQ(h.apply(h.tx(TxKind::DisputeEvidence, id, payload, h.actors().citizens[1])), RejectCode::WrongRole);
    EXPECT_EQ(h.apply(h.tx(TxKind::DisputeEvidence, id, payload, h.actors().citizens[0])), std::nullopt);
    EXPECT_TRUE(h.record(id).disputed);
}

TEST(Apply, AuditorRegistrationByMembersTakesEffectForLaterAnnounces) {
    Harness h;
    auto newcomer = acrp::testing::test_key("auditor/new");
    auto reg = [&](const SigningKey& by) {
        return h.tx(TxKind::RegisterAuditor, std::nullopt, encode_payload(RegisterAuditorPayload{newcomer.public_key()}), by);
    };
    EXPECT_EQ(h.apply(reg(h.actors().citizens[0])), RejectCode::WrongRole);
    EXPECT_EQ(h.apply(reg(h.actors().members[2])), std::nullopt);
    EXPECT_EQ(h.apply(reg(h.actors().members[2])), RejectCode::AlreadyExists);
    const auto& auditors = h.state()->auditors().auditors;
    ASSERT_EQ(auditors.size(), 5u);
    EXPECT_EQ(auditors.back().activation_height, 1u);
    EXPECT_EQ(h.state()->auditors().active_at(0).size(), 4u);
    EXPECT_EQ(h.state()->auditors().active_at(1).size(), 5u);
}

TEST(ForcePublish, Boundary) {
    Harness h(3);
    const auto& c = h.actors().citizens[0];
    auto b = h.sign(graffiti(), c);
    h.announce_and_commit(b, c);
    auto commit_height = *h.record(b.id()).commit_height;

    auto state = *h.state();
    try {
        state.force_publish(b.id(), commit_height + 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::TimeoutNotReached);
    }
    state.force_publish(b.id(), commit_height + 4);
    EXPECT_EQ(state.find(b.id())->phase, Phase::Published);

    // On chain the sweep happens at the start of block commit_height + 4.
    while (h.state()->height() < commit_height + 4)
        h.step();
    EXPECT_EQ(h.record(b.id()).phase, Phase::Committed);
    h.step();
    auto rec = h.record(b.id());
    EXPECT_EQ(rec.phase, Phase::Published);
    EXPECT_TRUE(rec.forced_publish);
    EXPECT_EQ(rec.trace.back().event, Event::ForcedPublish);
    EXPECT_EQ(rec.trace.back().height, commit_height + 4);
    EXPECT_TRUE(rec.redacted[2].empty());
    // The chain never saw the location in clear; readers get it from the stored original.
    EXPECT_EQ(rec.location, std::nullopt);

    const auto& auditor = h.actors().auditor_for(rec.auditor);
    EXPECT_EQ(h.apply(h.audit_tx(b, {}, auditor)), RejectCode::WrongPhase);
}

TEST(ApplyTx, FunctionalFormLeavesInputUntouched) {
    Harness h;
    auto before = *h.state();
    auto b = h.sign(graffiti(), h.actors().citizens[0]);
    auto out = apply_tx(before, h.announce_tx(b, h.actors().citizens[0]), 0);
    ASSERT_TRUE(out.state);
    EXPECT_FALSE(out.rejection);
    EXPECT_TRUE(out.state->find(b.id()));
    EXPECT_FALSE(before.find(b.id()));
    auto again = apply_tx(*out.state, h.announce_tx(b, h.actors().citizens[0]), 0);
    EXPECT_FALSE(again.state);
    ASSERT_TRUE(again.rejection);
    EXPECT_EQ(again.rejection->code, RejectCode::WrongPhase);
}

// Blocks -----------------------------------------------------------------------------

namespace {

oracle::Hash to_oracle(const Digest& d) { return d; }

std::vector<Block> busy_chain(Harness& h, std::size_t blocks) {
    std::mt19937_64 rng(42);
    std::vector<ReportBundle> filed;
    while (h.state()->height() < blocks) {
        auto r = acrp::testing::random_report(rng);
        const auto& c = h.actors().citizens[rng() % h.actors().citizens.size()];
        auto b = h.sign(r, c);
        h.submit(h.announce_tx(b, c));
        h.submit(h.vote_tx(ReportId{}, c));  // rejected, never included
        h.step();
    }
    return h.network().node(0).blocks();
}

} // namespace

TEST(Blocks, TxRootIsRfc6962) {
    std::mt19937_64 rng(1);
    EXPECT_EQ(to_hex(tx_merkle_root(std::vector<Digest>{})), to_hex(sha256({})));
    for (std::size_t n = 0; n < 20; ++n) {
        std::vector<Digest> leaves(n);
        for (auto& l : leaves)
            for (auto& b : l)
                b = static_cast<std::uint8_t>(rng());
        auto ref = oracle::rfc6962(std::vector<oracle::Hash>(leaves.begin(), leaves.end()));
        EXPECT_EQ(tx_merkle_root(leaves), ref) << n;
    }
}

TEST(Blocks, HeaderHashLayout) {
    Harness h;
    h.run(3);
    for (const auto& b : h.network().node(1).blocks()) {
        oracle::Bytes pre;
        oracle::put_le(pre, b.header.height, 8);
        pre.insert(pre.end(), b.header.prev_hash.begin(), b.header.prev_hash.end());
        pre.insert(pre.end(), b.header.producer.bytes.begin(), b.header.producer.bytes.end());
        oracle::put_le(pre, b.header.timestamp, 8);
        pre.insert(pre.end(), b.header.tx_root.begin(), b.header.tx_root.end());
        EXPECT_EQ(b.hash, oracle::sha256(pre));
        EXPECT_EQ(header_hash(b.header), b.hash);
        EXPECT_EQ(b.header.timestamp, h.genesis().genesis_time + b.header.height * h.genesis().block_interval);
        EXPECT_EQ(decode_block(encode(b)), b);
    }
}

TEST(ValidateChain, UntamperedChainIsValid) {
    Harness h;
    auto blocks = busy_chain(h, 20);
    auto verdict = validate_chain(h.genesis(), blocks);
    ASSERT_TRUE(verdict.valid()) << verdict.reason;
    EXPECT_EQ(verdict.state->serialize(), h.state()->serialize());
}

TEST(ValidateChain, FlippedByteInBlockFiveTxIsInvalidAtFive) {
    Harness h;
    auto blocks = busy_chain(h, 20);
    ASSERT_FALSE(blocks[5].txs.empty());
    std::vector<Bytes> encoded;
    for (const auto& b : blocks)
        encoded.push_back(encode(b));
    auto tx_bytes = ledger::encode(blocks[5].txs[0]);
    auto& blk = encoded[5];
    auto pos = std::search(blk.begin(), blk.end(), tx_bytes.begin(), tx_bytes.end());
    ASSERT_NE(pos, blk.end());
    *(pos + static_cast<std::ptrdiff_t>(tx_bytes.size() / 2)) ^= 0x01;
    auto verdict = validate_chain(h.genesis(), encoded);
    EXPECT_FALSE(verdict.valid());
    EXPECT_EQ(verdict.invalid_height, 5u);
}

TEST(ValidateChain, ReorderedTransactionsBreakTheTxRoot) {
    Harness h;
    const auto& c = h.actors().citizens;
    std::mt19937_64 rng(3);
    h.step();
    for (int i = 0; i < 3; ++i) {
        auto b = h.sign(acrp::testing::random_report(rng), c[i]);
        h.submit(h.announce_tx(b, c[i]));
    }
    h.step();
    h.run(2);
    auto blocks = h.network().node(0).blocks();
    ASSERT_EQ(blocks[1].txs.size(), 3u);
    std::swap(blocks[1].txs[0], blocks[1].txs[2]);

    std::vector<Digest> refs;
    for (const auto& t : blocks[1].txs)
        refs.push_back(t.ref());
    EXPECT_NE(oracle::rfc6962(std::vector<oracle::Hash>(refs.begin(), refs.end())), to_oracle(blocks[1].header.tx_root));

    auto verdict = validate_chain(h.genesis(), blocks);
    EXPECT_FALSE(verdict.valid());
    EXPECT_EQ(verdict.invalid_height, 1u);
    EXPECT_NE(verdict.reason.find("merkle root"), std::string::npos);
}

TEST(ValidateChain, StructuralFailures) {
    Harness h;
    h.run(6);
    auto blocks = h.network().node(0).blocks();

    auto dropped = blocks;
    dropped.erase(dropped.begin() + 2);
    EXPECT_EQ(validate_chain(h.genesis(), dropped).invalid_height, 2u);

    auto wrong_producer = blocks;
    wrong_producer[3] = Block::seal(3, blocks[2].hash, h.genesis().timestamp_at(3), {}, h.actors().members[0]);
    EXPECT_EQ(validate_chain(h.genesis(), wrong_producer).invalid_height, 3u);

    auto bad_sig = blocks;
    bad_sig[4].producer_signature.bytes[0] ^= 1;
    EXPECT_EQ(validate_chain(h.genesis(), bad_sig).invalid_height, 4u);

    auto other_genesis = h.genesis();
    other_genesis.audit_timeout += 1;
    EXPECT_EQ(validate_chain(other_genesis, blocks).invalid_height, 0u);
}

TEST(ChooseFork, LongestValidThenLowestHead) {
    Harness h;
    h.run(5);
    auto base = h.network().node(0).blocks();
    std::vector<Block> shorter(base.begin(), base.begin() + 3);
    auto invalid = base;
    invalid[4].hash[0] ^= 1;
    EXPECT_EQ(choose_fork(h.genesis(), {shorter, base, invalid}), 1u);
    EXPECT_EQ(choose_fork(h.genesis(), {invalid}), std::nullopt);

    // Two valid forks of equal length differing in the last block's contents.
    auto fork_a = base, fork_b = base;
    auto producer = h.actors().members[4 % 4];
    auto reg = h.tx(TxKind::RegisterAuditor, std::nullopt,
                    encode_payload(RegisterAuditorPayload{acrp::testing::test_key("fork").public_key()}), h.actors().members[0]);
    fork_b[4] = Block::seal(4, base[3].hash, h.genesis().timestamp_at(4), {reg}, producer);
    ASSERT_TRUE(validate_chain(h.genesis(), fork_b).valid());
    auto expected = fork_a[4].hash < fork_b[4].hash ? 0u : 1u;
    EXPECT_EQ(choose_fork(h.genesis(), {fork_a, fork_b}), expected);
    EXPECT_EQ(choose_fork(h.genesis(), {fork_b, fork_a}), 1u - expected);
}

TEST(Replay, TwoReplaysAreByteIdentical) {
    Harness h;
    std::mt19937_64 rng(8);
    std::vector<ReportId> ids;
    for (int i = 0; i < 5; ++i)
        ids.push_back(h.file_published(acrp::testing::random_report(rng), static_cast<std::size_t>(i)));
    for (int i = 0; i < 5; ++i)
        h.submit(h.vote_tx(ids[static_cast<std::size_t>(i)], h.actors().citizens[7]));
    h.step();
    auto blocks = h.network().node(2).blocks();
    auto a = validate_chain(h.genesis(), blocks);
    auto b = validate_chain(h.genesis(), blocks);
    ASSERT_TRUE(a.valid() && b.valid());
    EXPECT_EQ(a.state->serialize(), b.state->serialize());
    for (std::size_t n = 0; n < 4; ++n)
        EXPECT_EQ(h.network().node(n).state()->serialize(), a.state->serialize());
}
