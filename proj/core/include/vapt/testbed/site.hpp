#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vapt/http/types.hpp"
#include "vapt/http/url.hpp"
#include "vapt/metrics/manifest.hpp"
#include "vapt/testbed/config.hpp"

namespace vapt::testbed {

struct Request {
    std::string method = "GET";
    std::string path = "/";
    http::QueryParams query;
    http::QueryParams form;
    std::map<std::string, std::string> headers;   // lower-case names
    std::map<std::string, std::string> cookies;
    bool secure = false;

    /// First value for name in the query, then in the form body.
    [[nodiscard]] std::optional<std::string> param(std::string_view name) const;
    [[nodiscard]] std::optional<std::string> header(std::string_view name) const;
    [[nodiscard]] std::optional<std::string> cookie(std::string_view name) const;

    /// Builds a request from what arrived on the wire: target is the raw path plus query,
    /// the body is parsed as a form when it is urlencoded.
    static Request from_wire(std::string method, std::string_view target, const http::Headers& headers,
                             std::string_view body, bool secure);
};

struct Response {
    int status = 200;
    std::string content_type = "text/html; charset=utf-8";
    std::string body;
    std::vector<std::pair<std::string, std::string>> headers;
    /// Adds X-Content-Type-Options and X-Frame-Options.
    bool security_headers = true;
};

/// The vulnerable application itself, independent of any socket: one request in, one
/// response out. Building it also produces the ground truth for what it serves.
class Site {
public:
    explicit Site(TestbedConfig config);

    Response handle(const Request& request);

    [[nodiscard]] const TestbedConfig& config() const { return config_; }
    [[nodiscard]] const std::vector<Instance>& instances() const { return instances_; }
    [[nodiscard]] const metrics::GroundTruthManifest& manifest() const { return manifest_; }

private:
    using Handler = std::function<Response(const Request&)>;

    void route(const std::string& method, const std::string& path, Handler handler);
    void truth(const Instance& inst, const std::string& url, model::Vector vector, std::string name,
               std::optional<model::VulnCode> cls = std::nullopt, Role role = Role::Positive);

    void build_index();
    void build_v1(const Instance& inst);
    void build_v2(const Instance& inst);
    void build_v3(const Instance& inst);
    void build_v4(const Instance& inst);
    void build_v5(const Instance& inst);
    void build_v6(const Instance& inst);
    void build_v7(const Instance& inst);
    void build_v8(const Instance& inst);

    std::string new_id();
    std::optional<std::string> load(const std::string& key);
    void store(const std::string& key, std::string value);
    void erase(const std::string& key);

    TestbedConfig config_;
    std::vector<Instance> instances_;
    metrics::GroundTruthManifest manifest_;
    std::map<std::pair<std::string, std::string>, Handler> routes_;

    std::mutex mutex_;
    std::mt19937_64 rng_;
    std::map<std::string, std::string> state_;
};

} // namespace vapt::testbed
