#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "vapt/va/catalog.hpp"
#include "vapt/va/detectors.hpp"
#include "vapt/va/points.hpp"

namespace vapt::va {

/// First catalog error signature present in the probe response but not the baseline.
std::optional<std::string> sql_error_signature(std::string_view probe_body, std::string_view baseline_body,
                                               const PayloadCatalog& catalog);

struct BooleanOutcome {
    bool complete = false;       // both probes got a response
    bool differential = false;   // TRUE resembles the baseline and FALSE departs from TRUE
    double true_vs_base = 0.0;
    double false_vs_true = 0.0;
    std::array<std::uint64_t, 2> transactions{};
};

/// Sends one TRUE/FALSE pair at point and compares the responses against base.
BooleanOutcome boolean_differential(Prober& prober, const InjectionPoint& point, const SqliPair& pair,
                                    const http::HttpTransaction& base, const PayloadCatalog& catalog,
                                    const std::vector<std::regex>& volatile_patterns, std::string_view marker);

/// median + max(min_extra, mad_factor * MAD) over the baseline timings.
double delay_threshold_ms(const std::vector<double>& baseline_ms, const TimeSettings& settings);

} // namespace vapt::va
