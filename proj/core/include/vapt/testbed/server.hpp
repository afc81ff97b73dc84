#pragma once

#include <memory>
#include <string>

#include "vapt/metrics/manifest.hpp"
#include "vapt/testbed/config.hpp"
#include "vapt/testbed/site.hpp"

namespace vapt::testbed {

/// Serves a Site over http and, when configured, over https with a freshly generated
/// self-signed certificate. Port 0 binds an ephemeral port; config() reports the
/// ports actually in use and manifest() is built from them.
class Server {
public:
    explicit Server(TestbedConfig config);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds and starts serving in background threads. Throws Error when a port is taken.
    void start();
    void stop();
    /// Blocks until stop() is called from another thread.
    void wait();

    [[nodiscard]] const TestbedConfig& config() const;
    [[nodiscard]] const metrics::GroundTruthManifest& manifest() const;
    [[nodiscard]] Site& site();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace vapt::testbed
