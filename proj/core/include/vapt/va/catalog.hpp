#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace vapt::va {

struct XssTemplate {
    std::string name;
    std::string templ;
    std::string marker;   // substring whose raw reflection signals the payload survived
    std::vector<std::string> channels;
};

struct SqliPair {
    std::string context;   // "numeric" or "string"
    std::string true_templ;
    std::string false_templ;
};

struct ContextTemplate {
    std::string context;
    std::string templ;
};

struct TimeSettings {
    int delay_seconds = 4;
    double min_extra_ms = 3000;
    double mad_factor = 5.0;
    int baseline_samples = 3;
    int repeats = 2;
};

struct NamedTemplate {
    std::string name;
    std::string templ;
};

struct DefaultPath {
    std::string path;
    std::string signature;
};

/// Everything the detectors send or look for, loaded from a structured file so the
/// probes can be tuned without code changes.
///
/// Templates use {M} for the per-scan marker, {V} for the original value, {S} for
/// the delay in seconds, {CB} for the callback base URL and {N} for a probe counter.
struct PayloadCatalog {
    std::string marker;

    std::vector<XssTemplate> xss;

    std::vector<ContextTemplate> sqli_error;
    std::vector<std::string> sqli_error_signatures;
    std::vector<SqliPair> sqli_boolean;
    std::vector<SqliPair> sqli_confirm;
    std::vector<ContextTemplate> sqli_time;
    double similarity_threshold = 0.95;
    TimeSettings time;

    std::vector<NamedTemplate> lfi_traversal;
    NamedTemplate lfi_remote;
    std::string lfi_marker_pattern;
    std::string passwd_line_pattern;
    int min_passwd_lines = 3;
    int callback_grace_ms = 500;

    std::vector<std::pair<std::string, std::string>> default_credentials;
    std::vector<std::string> failure_keywords;
    std::vector<std::string> success_keywords;

    std::vector<std::string> required_headers;
    std::vector<std::string> listing_signatures;
    std::vector<std::string> stack_trace_signatures;
    std::vector<std::string> crafted_values;
    std::vector<std::string> dangerous_methods;
    std::vector<DefaultPath> default_paths;

    std::vector<std::string> backup_suffixes;
    std::vector<std::string> source_signatures;
    std::string private_key_pattern;
    std::string internal_ip_pattern;
    std::string card_pattern;

    std::string csrf_probe_origin = "http://attacker.invalid";

    std::vector<std::string> volatile_patterns;

    /// Parses a catalog document; throws SchemaError naming the bad field. The marker is
    /// left empty for the caller to set.
    static PayloadCatalog from_json(const nlohmann::json& doc);
    /// The catalog compiled into the library.
    static PayloadCatalog bundled();

    /// Substitutes the placeholders in templ.
    [[nodiscard]] std::string render(std::string_view templ, std::string_view value = {}, std::string_view marker = {},
                                     std::string_view callback = {}, int counter = 0) const;
};

/// A fresh marker: "vx" followed by 8 lowercase alphanumerics, usable as a JS identifier,
/// SQL string and path segment. seed=nullopt draws from std::random_device.
std::string make_marker(std::optional<std::uint64_t> seed = std::nullopt);

} // namespace vapt::va
