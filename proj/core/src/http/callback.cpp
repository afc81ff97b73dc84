#include <algorithm>
#include <cctype>

#include <httplib.h>

#include "vapt/error.hpp"
#include "vapt/http/callback.hpp"

namespace vapt::http {

struct CallbackListener::Server {
    httplib::Server http;
};

CallbackListener::CallbackListener(std::string host, int port, std::shared_ptr<TransactionLog> log)
    : server_(std::make_unique<Server>()), host_(std::move(host)), log_(std::move(log))
{
    server_->http.Get(".*", [this](const httplib::Request& req, httplib::Response& res) {
        {
            std::lock_guard lock(mutex_);
            hits_.push_back(req.path);
        }
        if (log_)
            log_->record_callback(req.path);
        cv_.notify_all();
        res.set_content("callback-ok " + req.path, "text/plain");
    });
    if (port == 0)
        port_ = server_->http.bind_to_any_port(host_);
    else
        port_ = server_->http.bind_to_port(host_, port) ? port : -1;
    if (port_ <= 0)
        throw Error("callback listener cannot bind " + host_ + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_->http.listen_after_bind(); });
    server_->http.wait_until_ready();
}

CallbackListener::~CallbackListener()
{
    server_->http.stop();
    if (thread_.joinable())
        thread_.join();
}

bool has_token(std::string_view hit, std::string_view token)
{
    if (token.empty())
        return false;
    auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
    for (auto pos = hit.find(token); pos != std::string_view::npos; pos = hit.find(token, pos + 1)) {
        auto end = pos + token.size();
        if ((pos == 0 || !alnum(hit[pos - 1])) && (end == hit.size() || !alnum(hit[end])))
            return true;
    }
    return false;
}

std::string CallbackListener::base_url() const { return "http://" + host_ + ":" + std::to_string(port_); }

bool CallbackListener::wait_for(std::string_view token, std::chrono::milliseconds timeout)
{
    std::unique_lock lock(mutex_);
    return cv_.wait_for(lock, timeout, [&] {
        return std::any_of(hits_.begin(), hits_.end(), [&](const auto& hit) { return has_token(hit, token); });
    });
}

std::vector<std::string> CallbackListener::hits() const
{
    std::lock_guard lock(mutex_);
    return hits_;
}

ReplayCallbacks::ReplayCallbacks(std::string base_url, std::vector<std::string> hits)
    : base_url_(std::move(base_url)), hits_(std::move(hits))
{
}

bool ReplayCallbacks::wait_for(std::string_view token, std::chrono::milliseconds)
{
    return std::any_of(hits_.begin(), hits_.end(), [&](const auto& hit) { return has_token(hit, token); });
}

} // namespace vapt::http
