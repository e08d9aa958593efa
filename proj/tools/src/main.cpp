#include <iostream>

#include <CLI11.hpp>

#include "acrp/gateway/client.hpp"
#include "commands.hpp"

using namespace acrp::cli;

namespace {

void add_common(CLI::App* app, Common& c, bool needs_key) {
    app->add_option("--node", c.node, "Gateway base URL")->envname("ACRP_NODE_ADDR")->capture_default_str();
    auto* key = app->add_option("--key", c.key_file, "Key file")->envname("ACRP_KEY_FILE");
    if (needs_key)
        key->required();
    app->add_option("--timeout", c.timeout_s, "Seconds to wait for inclusion")->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Accountable city reports: keys, consortium node, citizen/auditor/authority clients"};
    app.require_subcommand(1);
    int rc = 0;
    Common common;

    auto* keygen = app.add_subcommand("keygen", "Create an Ed25519 key file");
    KeygenArgs keygen_args;
    keygen->add_option("--out", keygen_args.out, "Key file to write")->required();
    keygen->add_option("--seed", keygen_args.seed, "Derive deterministically from this text (testing only)");
    keygen->callback([&] { rc = cmd_keygen(keygen_args); });

    auto* devnet = app.add_subcommand("devnet", "Local development network")->require_subcommand(1);
    auto* init = devnet->add_subcommand("init", "Write genesis.json and role keys");
    DevnetArgs devnet_args;
    init->add_option("--dir", devnet_args.dir)->capture_default_str();
    init->add_option("--members", devnet_args.members)->capture_default_str();
    init->add_option("--auditors", devnet_args.auditors)->capture_default_str();
    init->add_option("--citizens", devnet_args.citizens)->capture_default_str();
    init->add_option("--audit-timeout", devnet_args.audit_timeout, "Blocks before forced publication")
        ->capture_default_str();
    init->add_option("--block-interval", devnet_args.block_interval, "Seconds per block")->capture_default_str();
    init->add_option("--seed", devnet_args.seed, "Deterministic keys (testing only)");
    init->callback([&] { rc = cmd_devnet_init(devnet_args); });

    auto* node = app.add_subcommand("node", "Consortium node")->require_subcommand(1);
    auto* run = node->add_subcommand("run", "Run every member of the consortium in-process behind the HTTP API");
    NodeRunArgs run_args;
    run->add_option("--genesis", run_args.genesis)->envname("ACRP_GENESIS")->required();
    run->add_option("--member-keys", run_args.member_keys, "Member key files");
    run->add_option("--keys-dir", run_args.keys_dir, "Directory scanned for member key files");
    run->add_option("--data", run_args.data, "Chain and storage directory")->capture_default_str();
    run->add_option("--host", run_args.host)->capture_default_str();
    run->add_option("--port", run_args.port)->capture_default_str();
    run->add_option("--block-ms", run_args.block_ms, "Block interval override in milliseconds");
    run->callback([&] { rc = cmd_node_run(run_args); });

    auto* citizen = app.add_subcommand("citizen", "Citizen actions")->require_subcommand(1);
    auto* file = citizen->add_subcommand("file", "Sign, announce, commit and upload a report");
    FileArgs file_args;
    add_common(file, common, true);
    file->add_option("--type", file_args.type, "Pothole|TrashDump|Graffiti|StreetDamage|TrafficObstruction|Other")
        ->required();
    file->add_option("--lat", file_args.lat, "Latitude, degrees")->required();
    file->add_option("--lon", file_args.lon, "Longitude, degrees")->required();
    file->add_option("--photo", file_args.photo, "PNG photo")->required()->check(CLI::ExistingFile);
    file->add_option("--desc", file_args.desc, "Description");
    auto* grid = file->add_option("--grid", file_args.grid, "Grid chunking ROWSxCOLS (4x4, 16x16, ...)");
    file->add_option("--regions", file_args.regions, "Object regions: JSON [[x,y,w,h],...] or a file")->excludes(grid);
    file->add_option("--granularity", file_args.granularity, "words|sentences")
        ->check(CLI::IsMember({"words", "sentences"}));
    file->add_option("--save", file_args.save, "Where to keep the signed original (default <id>.acrp)");
    file->callback([&] { rc = cmd_citizen_file(common, file_args); });

    std::string report, original, text, status, reason, note, into, auditor;
    auto* dispute = citizen->add_subcommand("dispute", "Check the published redaction against your original");
    add_common(dispute, common, true);
    dispute->add_option("--report", report)->required();
    dispute->add_option("--original", original, "Signed original saved by 'citizen file'")->required();
    dispute->callback([&] { rc = cmd_citizen_dispute(common, report, original); });

    auto* vote = citizen->add_subcommand("vote", "Up-vote a published report");
    add_common(vote, common, true);
    vote->add_option("--report", report)->required();
    vote->callback([&] { rc = cmd_citizen_vote(common, report); });

    auto* comment = citizen->add_subcommand("comment", "Comment on a published report");
    add_common(comment, common, true);
    comment->add_option("--report", report)->required();
    comment->add_option("--text", text)->required();
    comment->callback([&] { rc = cmd_citizen_comment(common, report, text); });

    auto* auditor_cmd = app.add_subcommand("auditor", "Auditor actions")->require_subcommand(1);
    auto* pending = auditor_cmd->add_subcommand("pending", "Committed reports assigned to this key");
    add_common(pending, common, true);
    pending->callback([&] { rc = cmd_auditor_pending(common); });

    auto* decide = auditor_cmd->add_subcommand("decide", "Publish (optionally redacted) or reject a report");
    DecideArgs decide_args;
    add_common(decide, common, true);
    decide->add_option("--report", decide_args.report)->required();
    auto* rp = decide->add_option("--redact,--redact-photo", decide_args.redact_photo, "Picture cell indices, e.g. 5,6");
    auto* rd = decide->add_option("--redact-desc", decide_args.redact_desc, "Description chunk indices");
    auto* rl = decide->add_flag("--redact-location", decide_args.redact_location);
    decide->add_option("--reject", decide_args.reject, "LowQuality|Forged|IllicitContent|Spam")
        ->excludes(rp)
        ->excludes(rd)
        ->excludes(rl);
    decide->add_option("--note", decide_args.note);
    decide->callback([&] { rc = cmd_auditor_decide(common, decide_args); });

    auto* authority = app.add_subcommand("authority", "Responsible authority actions")->require_subcommand(1);
    auto* update = authority->add_subcommand("update", "Post a handling status");
    add_common(update, common, true);
    update->add_option("--report", report)->required();
    update->add_option("--status", status, "Acknowledged|InProgress|Resolved")->required();
    update->add_option("--note", note);
    update->callback([&] { rc = cmd_authority_update(common, report, status, note); });

    auto* del = authority->add_subcommand("delete", "Delete a report with a logged reason");
    add_common(del, common, true);
    del->add_option("--report", report)->required();
    del->add_option("--reason", reason, "NotActionable|IllicitContent|Duplicate")->required();
    del->add_option("--note", note);
    del->callback([&] { rc = cmd_authority_delete(common, report, reason, note); });

    auto* merge = authority->add_subcommand("merge", "Merge a duplicate into another report");
    add_common(merge, common, true);
    merge->add_option("--report", report)->required();
    merge->add_option("--into", into)->required();
    merge->callback([&] { rc = cmd_authority_merge(common, report, into); });

    auto* consortium = app.add_subcommand("consortium", "Consortium administration")->require_subcommand(1);
    auto* reg = consortium->add_subcommand("register-auditor", "Register an auditor key (member key required)");
    add_common(reg, common, true);
    reg->add_option("--auditor", auditor, "Hex public key or key file")->required();
    reg->callback([&] { rc = cmd_register_auditor(common, auditor); });

    auto* inspect = app.add_subcommand("inspect", "Read chain data from a node")->require_subcommand(1);
    auto* ichain = inspect->add_subcommand("chain", "List blocks");
    std::optional<std::uint64_t> from, to;
    add_common(ichain, common, false);
    ichain->add_option("--from", from);
    ichain->add_option("--to", to);
    ichain->callback([&] { rc = cmd_inspect_chain(common, from, to); });
    auto* ireport = inspect->add_subcommand("report", "Public view of a report");
    add_common(ireport, common, false);
    ireport->add_option("id", report)->required();
    ireport->callback([&] { rc = cmd_inspect_report(common, report); });

    auto* verify = app.add_subcommand("verify", "Replay a chain directory from genesis");
    VerifyArgs verify_args;
    verify->add_option("--chain", verify_args.chain, "Directory with genesis.json and blocks/")->required();
    verify->add_option("--genesis", verify_args.genesis, "Genesis file (default <chain>/genesis.json)")
        ->envname("ACRP_GENESIS");
    verify->callback([&] { rc = cmd_verify(verify_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const acrp::gateway::ApiError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.status() == 0 ? 2 : 1;
    } catch (const acrp::Error& e) {
        std::cerr << "error: " << acrp::to_string(e.code()) << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
