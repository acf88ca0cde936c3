#include "webnav/http.hpp"
#include "webnav/errors.hpp"
#include "webnav/text.hpp"

#include <httplib.h>

namespace webnav {

std::optional<Endpoint> split_endpoint(const std::string& url) {
    auto sep = url.find("://");
    if (sep == std::string::npos) return std::nullopt;
    std::string scheme = ascii_lower(url.substr(0, sep));
    if (scheme != "http" && scheme != "https") return std::nullopt;
    auto slash = url.find('/', sep + 3);
    Endpoint ep;
    ep.origin = url.substr(0, slash);
    if (ep.origin.size() == sep + 3) return std::nullopt;
    if (slash != std::string::npos) ep.path = url.substr(slash);
    while (!ep.path.empty() && ep.path.back() == '/') ep.path.pop_back();
    for (char c : url)
        if (is_ascii_space(c)) return std::nullopt;
    return ep;
}

HttpResponse http_request(const std::string& method, const std::string& url, const std::string& body,
                          const HttpHeaders& headers, std::chrono::milliseconds timeout) {
    auto ep = split_endpoint(url);
    if (!ep) throw EnvironmentError("not an http(s) URL: " + url);
    std::string path = ep->path.empty() ? "/" : ep->path;

    httplib::Client client(ep->origin);
    if (!client.is_valid()) throw EnvironmentError("cannot open a client for " + ep->origin);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers hdrs;
    for (const auto& [k, v] : headers) hdrs.emplace(k, v);

    httplib::Result res;
    if (method == "GET")
        res = client.Get(path, hdrs);
    else if (method == "DELETE")
        res = client.Delete(path, hdrs);
    else if (method == "POST")
        res = client.Post(path, hdrs, body, "application/json");
    else
        throw EnvironmentError("unsupported method " + method);
    if (!res) throw EnvironmentError(method + " " + url + " failed: " + httplib::to_string(res.error()));
    return {res->status, res->body};
}

}  // namespace webnav
