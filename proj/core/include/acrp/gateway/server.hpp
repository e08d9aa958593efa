#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "acrp/gateway/json_views.hpp"
#include "acrp/node.hpp"
#include "acrp/storage.hpp"

namespace httplib {
class Server;
}

namespace acrp::gateway {

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 0;  // 0: pick a free port
    /// Produce a block this often; nullopt leaves block production to the caller.
    std::optional<std::chrono::milliseconds> block_interval;
    std::size_t page_size = 50;
};

/// HTTP/JSON front end over an in-process consortium and a blob store. Holds no protocol state
/// of its own: reads come from the first node's snapshot, writes are client-signed transactions
/// queued into every member's mempool.
class GatewayServer {
public:
    GatewayServer(ledger::Network& network, storage::BlobStore& store, ServerOptions options = {});
    ~GatewayServer();
    GatewayServer(const GatewayServer&) = delete;
    GatewayServer& operator=(const GatewayServer&) = delete;

    /// Binds and serves on a background thread; returns the bound port.
    int start();
    void stop();
    /// Blocks until stop() (e.g. from a signal handler thread).
    void wait();
    int port() const { return port_; }

    /// Published fields of a report as the public sees them; nullopt while not public.
    std::optional<RedactedFields> published_fields(const ReportId& id, const ledger::ReportRecord& rec) const;

private:
    void routes();
    void produce_loop();

    ledger::Network& network_;
    storage::BlobStore& store_;
    ServerOptions options_;
    std::unique_ptr<httplib::Server> http_;
    std::thread listener_;
    std::thread producer_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::atomic<bool> stopping_{false};
    int port_ = 0;
};

} // namespace acrp::gateway
