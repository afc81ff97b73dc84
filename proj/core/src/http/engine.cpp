#include "vapt/http/engine.hpp"

#include "vapt/http/url.hpp"

namespace vapt::http {

namespace {

bool is_redirect(int status)
{
    return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

} // namespace

HttpEngine::HttpEngine(RequestPolicy policy, std::shared_ptr<Transport> transport, std::shared_ptr<Clock> clock,
                       std::shared_ptr<TransactionLog> log)
    : policy_(std::move(policy)), transport_(std::move(transport)), clock_(std::move(clock)), log_(std::move(log))
{
    policy_.validate();
}

void HttpEngine::acquire_slot()
{
    std::unique_lock lock(slot_mutex_);
    slot_cv_.wait(lock, [&] { return in_flight_ < policy_.max_concurrent; });
    ++in_flight_;
}

void HttpEngine::release_slot()
{
    {
        std::lock_guard lock(slot_mutex_);
        --in_flight_;
    }
    slot_cv_.notify_one();
}

void HttpEngine::wait_politeness(const std::string& host_key)
{
    Clock::time_point start;
    {
        std::lock_guard lock(pace_mutex_);
        start = clock_->now();
        if (auto it = last_start_.find(host_key); it != last_start_.end()) {
            auto earliest = it->second + policy_.min_delay;
            if (earliest > start)
                start = earliest;
        }
        last_start_[host_key] = start;
    }
    clock_->sleep_until(start);
}

HttpTransaction HttpEngine::send_once(const HttpRequest& request, const SendOptions& options, CookieJar* jar)
{
    HttpTransaction tx;
    tx.tag = options.tag;
    tx.request = request;
    tx.tls = options.tls;

    auto url = Url::parse(request.url);
    if (!url) {
        tx.sequence_no = log_->next_sequence();
        tx.outcome = TransportError{"invalid URL: " + request.url};
        log_->append(tx);
        return tx;
    }

    if (!header_value(tx.request.headers, "User-Agent"))
        tx.request.headers.emplace_back("User-Agent", policy_.user_agent);
    if (jar != nullptr && !header_value(tx.request.headers, "Cookie")) {
        auto cookie = jar->header_for(*url);
        if (!cookie.empty())
            tx.request.headers.emplace_back("Cookie", std::move(cookie));
    }

    ExchangeResult result = TransportError{"not attempted"};
    int attempts = 0;
    acquire_slot();
    try {
        for (; attempts <= policy_.max_retries; ++attempts) {
            wait_politeness(url->authority() + "|" + url->scheme);
            result = transport_->exchange(tx.request, policy_.timeout, policy_.max_body_bytes);
            if (std::holds_alternative<HttpResponse>(result))
                break;
        }
    } catch (const std::exception& e) {
        result = TransportError{std::string("transport threw: ") + e.what()};
    }
    release_slot();

    tx.attempts = std::min(attempts + 1, policy_.max_retries + 1);
    tx.outcome = std::move(result);
    if (auto* response = tx.response(); response != nullptr && jar != nullptr)
        jar->store(*url, response->headers);
    if (options.finalize)
        options.finalize(tx);
    tx.sequence_no = log_->next_sequence();
    log_->append(tx);
    return tx;
}

HttpTransaction HttpEngine::send(HttpRequest request, const SendOptions& options)
{
    CookieJar* jar = options.use_cookies ? (options.jar != nullptr ? options.jar : &jar_) : nullptr;
    auto tx = send_once(request, options, jar);
    if (!request.follow_redirects)
        return tx;

    for (int hop = 0; hop < policy_.max_redirects; ++hop) {
        const auto* response = tx.response();
        if (response == nullptr || !is_redirect(response->status))
            break;
        auto location = header_value(response->headers, "Location");
        auto current = Url::parse(request.url);
        if (!location || !current)
            break;
        auto next = current->resolve(*location);
        if (!next)
            break;
        request.url = next->str();
        if (response->status == 303 || ((response->status == 301 || response->status == 302) && request.method == "POST")) {
            request.method = "GET";
            request.body.clear();
            std::erase_if(request.headers, [](const auto& h) {
                return iequals(h.first, "Content-Type") || iequals(h.first, "Content-Length");
            });
        }
        std::erase_if(request.headers, [](const auto& h) { return iequals(h.first, "Cookie"); });
        tx = send_once(request, options, jar);
    }
    return tx;
}

} // namespace vapt::http
