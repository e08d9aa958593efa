#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "acrp/gateway/server.hpp"
#include "commands.hpp"
#include "keyfile.hpp"

namespace acrp::cli {

namespace fs = std::filesystem;
using ledger::Genesis;

namespace {

SigningKey make_key(const std::string& seed, const std::string& label) {
    if (seed.empty())
        return keygen().signing_key;
    return keygen(as_bytes(seed + "/" + label)).signing_key;
}

} // namespace

int cmd_keygen(const KeygenArgs& a) {
    auto key = a.seed.empty() ? keygen().signing_key : keygen(as_bytes(a.seed)).signing_key;
    save_key(a.out, key);
    std::cout << key.public_key().hex() << "\n";
    return 0;
}

int cmd_devnet_init(const DevnetArgs& a) {
    fs::path dir = a.dir;
    if (fs::exists(dir / "genesis.json"))
        throw Error(Errc::Io, (dir / "genesis.json").string() + " already exists");
    Genesis g;
    g.audit_timeout = a.audit_timeout;
    g.block_interval = a.block_interval;
    for (unsigned i = 0; i < a.members; ++i) {
        auto k = make_key(a.seed, "member/" + std::to_string(i));
        save_key(dir / "keys" / ("member-" + std::to_string(i) + ".key"), k);
        g.members.push_back(k.public_key());
    }
    for (unsigned i = 0; i < a.auditors; ++i) {
        auto k = make_key(a.seed, "auditor/" + std::to_string(i));
        save_key(dir / "keys" / ("auditor-" + std::to_string(i) + ".key"), k);
        g.auditors.push_back(k.public_key());
    }
    // Road damage goes to the roads office; everything else to the city's general desk.
    auto roads = make_key(a.seed, "authority/roads");
    auto city = make_key(a.seed, "authority/city");
    save_key(dir / "keys" / "authority-roads.key", roads);
    save_key(dir / "keys" / "authority-city.key", city);
    g.authorities.push_back({"roads", ReportType::Pothole, std::nullopt, roads.public_key()});
    g.authorities.push_back({"roads", ReportType::StreetDamage, std::nullopt, roads.public_key()});
    g.authorities.push_back({"city", std::nullopt, std::nullopt, city.public_key()});
    for (unsigned i = 0; i < a.citizens; ++i)
        save_key(dir / "keys" / ("citizen-" + std::to_string(i) + ".key"),
                 make_key(a.seed, "citizen/" + std::to_string(i)));

    std::ofstream(dir / "genesis.json") << g.to_json() << "\n";
    std::cout << "genesis " << to_hex(g.hash()) << " written to " << (dir / "genesis.json").string() << "\n";
    return 0;
}

int cmd_node_run(const NodeRunArgs& a) {
    auto genesis = Genesis::load(a.genesis);
    std::vector<SigningKey> keys;
    for (const auto& f : a.member_keys)
        keys.push_back(load_key(f));
    if (!a.keys_dir.empty()) {
        for (const auto& e : fs::directory_iterator(a.keys_dir)) {
            if (e.path().extension() != ".key")
                continue;
            auto k = load_key(e.path());
            if (std::find(genesis.members.begin(), genesis.members.end(), k.public_key()) != genesis.members.end())
                keys.push_back(k);
        }
    }

    // Handle SIGINT/SIGTERM synchronously on this thread; block them before any thread starts.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    fs::path data = a.data;
    ledger::Network network(genesis, keys, data / "chain");
    storage::BlobStore store(data / "storage");
    gateway::ServerOptions options;
    options.host = a.host;
    options.port = a.port;
    options.block_interval = std::chrono::milliseconds(a.block_ms ? a.block_ms : genesis.block_interval * 1000);
    gateway::GatewayServer server(network, store, options);
    int port = server.start();
    std::cout << "acrp node: chain " << genesis.chain_id << " height " << network.height() << ", " << network.size()
              << " members, listening on http://" << a.host << ":" << port << std::endl;

    int sig = 0;
    sigwait(&signals, &sig);
    std::cout << "shutting down (signal " << sig << ")" << std::endl;
    server.stop();
    return 0;
}

int cmd_verify(const VerifyArgs& a) {
    fs::path chain = a.chain;
    auto genesis = Genesis::load(a.genesis.empty() ? (chain / "genesis.json").string() : a.genesis);
    auto blocks = ledger::read_chain_dir(chain);
    auto verdict = ledger::validate_chain(genesis, blocks);
    if (!verdict.valid()) {
        std::cout << "INVALID first invalid height " << *verdict.invalid_height << ": " << verdict.reason << "\n";
        return 1;
    }
    std::cout << "VALID " << blocks.size() << " blocks, head " << to_hex(verdict.state->head_hash()) << ", "
              << verdict.state->reports().size() << " reports\n";
    return 0;
}

} // namespace acrp::cli
