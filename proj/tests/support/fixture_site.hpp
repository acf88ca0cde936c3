#pragma once

#include <optional>
#include <string>

namespace testsupport {

// Two pages: a search form at "/" and "/result?q=..." echoing the query.
// `target` is a path with an optional query string.
std::optional<std::string> fixture_page(const std::string& target);

// The expected text on the result page after searching for `query`.
std::string fixture_result_text(const std::string& query);

std::string url_decode(const std::string& s);
std::string url_encode(const std::string& s);

}  // namespace testsupport
