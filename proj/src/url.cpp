#include "webnav/url.hpp"
#include "webnav/text.hpp"

#include <algorithm>
#include <array>
#include <vector>

namespace webnav {

namespace {

bool scheme_char(char c, bool first) {
    bool alpha = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    if (first) return alpha;
    return alpha || (c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.';
}

bool needs_host(std::string_view scheme) {
    return scheme == "http" || scheme == "https" || scheme == "ftp" || scheme == "ws" || scheme == "wss";
}

}  // namespace

std::optional<UrlParts> parse_url(std::string_view url) {
    if (url.empty()) return std::nullopt;
    for (char c : url) {
        if (is_ascii_space(c) || static_cast<unsigned char>(c) < 0x20) return std::nullopt;
    }
    std::size_t colon = url.find(':');
    if (colon == std::string_view::npos || colon == 0) return std::nullopt;
    for (std::size_t i = 0; i < colon; ++i) {
        if (!scheme_char(url[i], i == 0)) return std::nullopt;
    }
    UrlParts parts;
    parts.scheme = ascii_lower(url.substr(0, colon));
    std::string_view rest = url.substr(colon + 1);
    if (rest.substr(0, 2) == "//") {
        rest.remove_prefix(2);
        std::size_t end = rest.find_first_of("/?#");
        std::string_view authority = rest.substr(0, end);
        if (auto at = authority.rfind('@'); at != std::string_view::npos) authority.remove_prefix(at + 1);
        std::string_view host = authority;
        if (!host.empty() && host.front() == '[') {
            auto close = host.find(']');
            host = close == std::string_view::npos ? std::string_view{} : host.substr(0, close + 1);
        } else if (auto port = host.find(':'); port != std::string_view::npos) {
            host = host.substr(0, port);
        }
        parts.host = ascii_lower(host);
        parts.rest = end == std::string_view::npos ? std::string{} : std::string(rest.substr(end));
        if (needs_host(parts.scheme) && parts.host.empty()) return std::nullopt;
    } else {
        if (needs_host(parts.scheme) || rest.empty()) return std::nullopt;
        parts.rest = std::string(rest);
    }
    return parts;
}

bool is_valid_url(std::string_view url) { return parse_url(url).has_value(); }

std::string registrable_domain(std::string_view url) {
    auto parts = parse_url(url);
    std::string host = parts ? parts.value().host : ascii_lower(url);
    if (host.empty()) return host;
    if (host.front() == '[') return host;
    bool numeric = std::all_of(host.begin(), host.end(), [](char c) { return (c >= '0' && c <= '9') || c == '.'; });
    if (numeric) return host;

    static constexpr std::array<std::string_view, 24> kTwoLabelSuffixes = {
        "co.uk", "org.uk", "ac.uk", "gov.uk", "com.cn", "net.cn", "org.cn", "gov.cn", "edu.cn",
        "com.au", "net.au", "org.au", "co.jp", "ne.jp", "or.jp", "com.br", "com.hk", "com.tw",
        "co.kr", "co.in", "co.nz", "com.sg", "com.mx", "co.za"};

    std::vector<std::size_t> dots;
    for (std::size_t i = 0; i < host.size(); ++i)
        if (host[i] == '.') dots.push_back(i);
    if (dots.empty()) return host;
    auto suffix_from = [&](std::size_t labels) -> std::string {
        if (dots.size() < labels) return host;
        return host.substr(dots[dots.size() - labels] + 1);
    };
    bool two_label_suffix = std::find(kTwoLabelSuffixes.begin(), kTwoLabelSuffixes.end(),
                                      std::string_view(suffix_from(2))) != kTwoLabelSuffixes.end();
    return two_label_suffix ? suffix_from(3) : suffix_from(2);
}

std::string normalize_url_for_match(std::string_view url) {
    std::string out;
    if (auto parts = parse_url(url)) {
        if (!parts->host.empty()) {
            out = parts->host + parts->rest;
        } else {
            out = parts->rest;
        }
    } else {
        out = std::string(url);
    }
    while (!out.empty() && out.back() == '/') out.pop_back();
    return out;
}

}  // namespace webnav
