#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace acrp::cli {

struct Common {
    std::string node = "http://127.0.0.1:8080";
    std::string key_file;
    std::string genesis;
    int timeout_s = 60;
};

// Local verbs --------------------------------------------------------------------

struct KeygenArgs {
    std::string out;
    std::string seed;
};
int cmd_keygen(const KeygenArgs& a);

struct DevnetArgs {
    std::string dir = "devnet";
    unsigned members = 4;
    unsigned auditors = 3;
    unsigned citizens = 2;
    std::uint64_t audit_timeout = 20;
    std::uint64_t block_interval = 2;
    std::string seed;
};
int cmd_devnet_init(const DevnetArgs& a);

struct NodeRunArgs {
    std::string genesis;
    std::vector<std::string> member_keys;
    std::string keys_dir;
    std::string data = "acrp-data";
    std::string host = "127.0.0.1";
    int port = 8080;
    unsigned block_ms = 0;  // 0: genesis block_interval
};
int cmd_node_run(const NodeRunArgs& a);

struct VerifyArgs {
    std::string chain;
    std::string genesis;
};
int cmd_verify(const VerifyArgs& a);

// Verbs that talk to a node ------------------------------------------------------

struct FileArgs {
    std::string type;
    double lat = 0;
    double lon = 0;
    std::string photo;
    std::string desc;
    std::string grid = "4x4";
    std::string regions;
    std::string granularity = "words";
    std::string save;
};
int cmd_citizen_file(const Common& c, const FileArgs& a);

int cmd_citizen_dispute(const Common& c, const std::string& report, const std::string& original);
int cmd_citizen_vote(const Common& c, const std::string& report);
int cmd_citizen_comment(const Common& c, const std::string& report, const std::string& text);

int cmd_auditor_pending(const Common& c);

struct DecideArgs {
    std::string report;
    std::string redact_photo;
    std::string redact_desc;
    bool redact_location = false;
    std::string reject;
    std::string note;
};
int cmd_auditor_decide(const Common& c, const DecideArgs& a);

int cmd_authority_update(const Common& c, const std::string& report, const std::string& status, const std::string& note);
int cmd_authority_delete(const Common& c, const std::string& report, const std::string& reason, const std::string& note);
int cmd_authority_merge(const Common& c, const std::string& report, const std::string& into);

int cmd_register_auditor(const Common& c, const std::string& auditor);

int cmd_inspect_chain(const Common& c, std::optional<std::uint64_t> from, std::optional<std::uint64_t> to);
int cmd_inspect_report(const Common& c, const std::string& report);

} // namespace acrp::cli
