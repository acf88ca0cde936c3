#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace webnav {

struct UrlParts {
    std::string scheme;  // lowercase
    std::string host;    // lowercase, without port or credentials
    std::string rest;    // everything after the authority
};

// Absolute URLs only. http(s)/ftp/ws(s) must carry a host.
std::optional<UrlParts> parse_url(std::string_view url);

bool is_valid_url(std::string_view url);

// Host reduced to its registrable domain ("www.bbc.co.uk" -> "bbc.co.uk").
// Uses a short built-in list of two-label public suffixes.
std::string registrable_domain(std::string_view url);

// Scheme dropped, host lowercased, trailing slashes removed. Used for
// comparing jump targets.
std::string normalize_url_for_match(std::string_view url);

}  // namespace webnav
