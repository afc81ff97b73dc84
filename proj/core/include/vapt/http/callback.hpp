#pragma once

#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "vapt/http/transaction_log.hpp"

namespace vapt::http {

/// True when token occurs in hit as a whole word: neither neighbour is alphanumeric,
/// so "m-1" does not match a hit for "m-12".
bool has_token(std::string_view hit, std::string_view token);

/// Out-of-band channel for remote-inclusion probes: the target is asked to fetch
/// base_url() + "/" + token, and the detector waits for the hit.
class CallbackSink {
public:
    virtual ~CallbackSink() = default;
    [[nodiscard]] virtual std::string base_url() const = 0;
    /// True once a request whose path contains token has arrived.
    virtual bool wait_for(std::string_view token, std::chrono::milliseconds timeout) = 0;
};

/// Live listener bound to host:port (port 0 picks an ephemeral port). Every hit is
/// recorded in the transaction log so replays can answer the same questions.
class CallbackListener final : public CallbackSink {
public:
    CallbackListener(std::string host, int port, std::shared_ptr<TransactionLog> log);
    ~CallbackListener() override;
    CallbackListener(const CallbackListener&) = delete;
    CallbackListener& operator=(const CallbackListener&) = delete;

    [[nodiscard]] std::string base_url() const override;
    bool wait_for(std::string_view token, std::chrono::milliseconds timeout) override;
    [[nodiscard]] int port() const { return port_; }
    [[nodiscard]] std::vector<std::string> hits() const;

private:
    struct Server;
    std::unique_ptr<Server> server_;
    std::string host_;
    int port_ = 0;
    std::shared_ptr<TransactionLog> log_;
    std::thread thread_;
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::vector<std::string> hits_;
};

/// Answers wait_for() from callback records of a previously written log.
class ReplayCallbacks final : public CallbackSink {
public:
    ReplayCallbacks(std::string base_url, std::vector<std::string> hits);
    [[nodiscard]] std::string base_url() const override { return base_url_; }
    bool wait_for(std::string_view token, std::chrono::milliseconds timeout) override;

private:
    std::string base_url_;
    std::vector<std::string> hits_;
};

} // namespace vapt::http
