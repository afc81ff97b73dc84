#pragma once

#include <optional>
#include <string_view>

namespace vapt::data {

/// Data files compiled into the library ("mapping.json", "catalog.json", "dispatch.json").
std::optional<std::string_view> bundled(std::string_view name);

} // namespace vapt::data
