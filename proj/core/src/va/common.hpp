#pragma once

#include <initializer_list>
#include <string>

#include "vapt/http/types.hpp"
#include "vapt/model/finding.hpp"
#include "vapt/va/detectors.hpp"

namespace vapt::va::detail {

inline bool is_html(const http::HttpTransaction& tx)
{
    if (!tx.ok())
        return false;
    auto type = http::header_value(tx.response()->headers, "Content-Type");
    return !type || http::to_lower(*type).find("html") != std::string::npos;
}

inline model::Finding suspect(model::VulnCode cls, const model::Location& location, std::string title,
                              std::initializer_list<std::uint64_t> evidence, std::string note)
{
    auto f = model::make_finding(cls, location, std::move(title));
    f.evidence.transactions.assign(evidence.begin(), evidence.end());
    f.evidence.note = std::move(note);
    f.confidence = model::Confidence::Suspected;
    return f;
}

inline void mark_clean(DetectorReport& report, const model::Location& location)
{
    report.clean_locations.push_back(location.normalized());
}

inline std::string tag_for(model::VulnCode cls, const char* stage = "va")
{
    return std::string(stage) + ":" + std::string(model::code_label(cls));
}

} // namespace vapt::va::detail
