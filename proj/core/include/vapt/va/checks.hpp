#pragma once

#include <string>
#include <vector>

#include "vapt/crawl/crawler.hpp"
#include "vapt/http/cookies.hpp"
#include "vapt/http/types.hpp"
#include "vapt/va/catalog.hpp"

namespace vapt::va {

/// Checklist headers absent from a response.
std::vector<std::string> missing_headers(const http::Headers& headers, const PayloadCatalog& catalog);
/// Catalog methods advertised by an OPTIONS response (Allow or Public).
std::vector<std::string> dangerous_methods(const http::Headers& headers, const PayloadCatalog& catalog);
/// Every in-scope directory (trailing slash) above a crawled page.
std::vector<std::string> directories_of(const crawl::AttackSurface& surface);

/// Surface cookies sent with a POST to action_url that SameSite does not hold back.
std::vector<http::Cookie> unprotected_cookies(const crawl::AttackSurface& surface, const std::string& action_url);

/// Hosts and ports worth a TLS handshake: https scope prefixes, form actions, pages and
/// linked same-host origins, plus the base host on 443.
std::vector<std::pair<std::string, int>> tls_targets(const crawl::AttackSurface& surface);

} // namespace vapt::va
