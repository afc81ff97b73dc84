#include "vapt/http/transaction_log.hpp"

#include <algorithm>

#include "vapt/error.hpp"

namespace vapt::http {

using nlohmann::json;

namespace {

json headers_to_json(const Headers& headers)
{
    json out = json::array();
    for (const auto& [name, value] : headers)
        out.push_back(json::array({name, value}));
    return out;
}

Headers headers_from_json(const json& j)
{
    Headers out;
    for (const auto& h : j)
        out.emplace_back(h.at(0).get<std::string>(), h.at(1).get<std::string>());
    return out;
}

std::string dump_line(const json& j)
{
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

} // namespace

void to_json(json& j, const HttpRequest& r)
{
    j = json{{"method", r.method},
             {"url", r.url},
             {"headers", headers_to_json(r.headers)},
             {"body", r.body},
             {"follow_redirects", r.follow_redirects}};
}

void from_json(const json& j, HttpRequest& r)
{
    r.method = j.at("method").get<std::string>();
    r.url = j.at("url").get<std::string>();
    r.headers = headers_from_json(j.value("headers", json::array()));
    r.body = j.value("body", "");
    r.follow_redirects = j.value("follow_redirects", true);
}

void to_json(json& j, const HttpResponse& r)
{
    j = json{{"status", r.status},
             {"headers", headers_to_json(r.headers)},
             {"body", r.body},
             {"elapsed_ms", r.elapsed_ms},
             {"truncated", r.truncated}};
}

void from_json(const json& j, HttpResponse& r)
{
    r.status = j.at("status").get<int>();
    r.headers = headers_from_json(j.value("headers", json::array()));
    r.body = j.value("body", "");
    r.elapsed_ms = j.value("elapsed_ms", 0.0);
    r.truncated = j.value("truncated", false);
}

void to_json(json& j, const TlsInfo& t)
{
    j = json{{"https_available", t.https_available},
             {"protocol_version", t.protocol_version ? json(*t.protocol_version) : json(nullptr)},
             {"certificate_valid", t.certificate_valid},
             {"certificate_host_match", t.certificate_host_match},
             {"hsts_present", t.hsts_present}};
}

void from_json(const json& j, TlsInfo& t)
{
    t.https_available = j.value("https_available", false);
    if (j.contains("protocol_version") && j["protocol_version"].is_string())
        t.protocol_version = j["protocol_version"].get<std::string>();
    else
        t.protocol_version.reset();
    t.certificate_valid = j.value("certificate_valid", false);
    t.certificate_host_match = j.value("certificate_host_match", false);
    t.hsts_present = j.value("hsts_present", false);
}

void to_json(json& j, const HttpTransaction& tx)
{
    j = json{{"type", "tx"}, {"seq", tx.sequence_no}, {"tag", tx.tag}, {"request", tx.request}, {"attempts", tx.attempts}};
    if (const auto* r = tx.response())
        j["response"] = *r;
    else
        j["error"] = tx.error()->message;
    if (tx.tls)
        j["tls"] = *tx.tls;
}

void from_json(const json& j, HttpTransaction& tx)
{
    tx.sequence_no = j.at("seq").get<std::uint64_t>();
    tx.tag = j.value("tag", "");
    tx.request = j.at("request").get<HttpRequest>();
    tx.attempts = j.value("attempts", 1);
    if (j.contains("response"))
        tx.outcome = j["response"].get<HttpResponse>();
    else
        tx.outcome = TransportError{j.value("error", "unknown transport error")};
    if (j.contains("tls"))
        tx.tls = j["tls"].get<TlsInfo>();
}

TransactionLog::TransactionLog(const std::filesystem::path& sink) : sink_(sink, std::ios::out | std::ios::trunc)
{
    if (!sink_)
        throw Error("cannot open transaction log " + sink.string());
}

void TransactionLog::write_line(const json& record)
{
    if (sink_.is_open()) {
        sink_ << dump_line(record) << '\n';
        sink_.flush();
    }
}

void TransactionLog::write_header(const json& meta)
{
    std::lock_guard lock(mutex_);
    header_ = meta;
    json record = meta;
    record["type"] = "header";
    write_line(record);
}

void TransactionLog::append(const HttpTransaction& tx)
{
    std::lock_guard lock(mutex_);
    transactions_.push_back(tx);
    write_line(json(tx));
}

void TransactionLog::record_callback(const std::string& token)
{
    std::lock_guard lock(mutex_);
    callbacks_.push_back(token);
    write_line(json{{"type", "callback"}, {"token", token}});
}

std::vector<HttpTransaction> TransactionLog::snapshot() const
{
    std::lock_guard lock(mutex_);
    auto out = transactions_;
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.sequence_no < b.sequence_no; });
    return out;
}

std::optional<HttpTransaction> TransactionLog::find(std::uint64_t sequence_no) const
{
    std::lock_guard lock(mutex_);
    auto it = std::find_if(transactions_.begin(), transactions_.end(),
                           [&](const auto& tx) { return tx.sequence_no == sequence_no; });
    if (it == transactions_.end())
        return std::nullopt;
    return *it;
}

std::vector<std::string> TransactionLog::callbacks() const
{
    std::lock_guard lock(mutex_);
    return callbacks_;
}

json TransactionLog::header() const
{
    std::lock_guard lock(mutex_);
    return header_;
}

std::size_t TransactionLog::size() const
{
    std::lock_guard lock(mutex_);
    return transactions_.size();
}

LogContents read_transaction_log(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot read transaction log " + path.string());
    LogContents out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        try {
            auto record = json::parse(line);
            auto type = record.value("type", "");
            if (type == "header") {
                record.erase("type");
                out.header = std::move(record);
            } else if (type == "tx") {
                out.transactions.push_back(record.get<HttpTransaction>());
            } else if (type == "callback") {
                out.callbacks.push_back(record.at("token").get<std::string>());
            } else {
                throw SchemaError("unknown record type '" + type + "'");
            }
        } catch (const json::exception& e) {
            throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const SchemaError& e) {
            throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

} // namespace vapt::http
