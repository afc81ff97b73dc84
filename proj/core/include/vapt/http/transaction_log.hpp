#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vapt/http/types.hpp"

namespace vapt::http {

/// Append-only record of every transaction in a scan, optionally mirrored to a JSONL file.
///
/// File layout: one JSON object per line. The first line may be a
/// {"type":"header", ...} record carrying scan metadata (marker, target);
/// {"type":"tx", ...} lines are HttpTransactions; {"type":"callback","token":...}
/// lines record hits on the out-of-band callback listener.
class TransactionLog {
public:
    TransactionLog() = default;
    explicit TransactionLog(const std::filesystem::path& sink);

    std::uint64_t next_sequence() { return ++sequence_; }

    void write_header(const nlohmann::json& meta);
    void append(const HttpTransaction& tx);
    void record_callback(const std::string& token);

    [[nodiscard]] std::vector<HttpTransaction> snapshot() const;
    [[nodiscard]] std::optional<HttpTransaction> find(std::uint64_t sequence_no) const;
    [[nodiscard]] std::vector<std::string> callbacks() const;
    [[nodiscard]] nlohmann::json header() const;
    [[nodiscard]] std::size_t size() const;

private:
    void write_line(const nlohmann::json& record);

    mutable std::mutex mutex_;
    std::atomic<std::uint64_t> sequence_{0};
    std::vector<HttpTransaction> transactions_;
    std::vector<std::string> callbacks_;
    nlohmann::json header_ = nlohmann::json::object();
    std::ofstream sink_;
};

struct LogContents {
    nlohmann::json header = nlohmann::json::object();
    std::vector<HttpTransaction> transactions;
    std::vector<std::string> callbacks;
};

/// Reads a JSONL transaction log written by TransactionLog. Throws SchemaError on bad lines.
LogContents read_transaction_log(const std::filesystem::path& path);

void to_json(nlohmann::json& j, const HttpRequest& r);
void from_json(const nlohmann::json& j, HttpRequest& r);
void to_json(nlohmann::json& j, const HttpResponse& r);
void from_json(const nlohmann::json& j, HttpResponse& r);
void to_json(nlohmann::json& j, const TlsInfo& t);
void from_json(const nlohmann::json& j, TlsInfo& t);
void to_json(nlohmann::json& j, const HttpTransaction& tx);
void from_json(const nlohmann::json& j, HttpTransaction& tx);

} // namespace vapt::http
