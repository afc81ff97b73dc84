#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "vapt/crawl/crawler.hpp"
#include "vapt/http/types.hpp"
#include "vapt/http/url.hpp"
#include "vapt/model/finding.hpp"

namespace vapt::va {

/// A single value the scanner can control: a query parameter (links and GET forms) or
/// a field of a form submitted in the request body.
struct InjectionPoint {
    std::string url;      // no query
    std::string method = "GET";
    model::Vector vector = model::Vector::Parameter;
    std::string name;
    http::QueryParams params;   // every field with its sample value, in form order
    std::string page_url;       // page the point was found on

    [[nodiscard]] model::Location location() const { return {url, vector, name}; }
    [[nodiscard]] std::string value() const;
    /// The request with this point's value replaced by injected (other fields keep their samples).
    [[nodiscard]] http::HttpRequest request(std::string_view injected) const;
    [[nodiscard]] http::HttpRequest baseline() const { return request(value()); }

    /// Round-trip through a finding's details map so the verifier can re-probe.
    void store(std::map<std::string, std::string>& details) const;
    static InjectionPoint load(const std::map<std::string, std::string>& details, const model::Location& location);
};

/// All points of the surface, unique per (url, vector, name), in a stable order.
std::vector<InjectionPoint> injection_points(const crawl::AttackSurface& surface);

/// Sample value for a form input with an empty default.
std::string sample_value(const crawl::FormInput& input);

} // namespace vapt::va
