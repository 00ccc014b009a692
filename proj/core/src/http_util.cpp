#include "http_util.hpp"

#include "keyclip/error.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <openssl/evp.h>

#include <cstdlib>

namespace keyclip::detail {

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint URL has no scheme: '" + url + "'");
    const std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") throw ConfigError("unsupported URL scheme '" + scheme + "'");
    const auto path_start = url.find('/', scheme_end + 3);
    SplitUrl out;
    out.origin = url.substr(0, path_start);
    out.path = path_start == std::string::npos ? "/" : url.substr(path_start);
    if (out.origin.size() <= scheme_end + 3) throw ConfigError("endpoint URL has no host: '" + url + "'");
    return out;
}

std::string join_path(const std::string& prefix, const std::string& suffix) {
    std::string p = prefix;
    while (!p.empty() && p.back() == '/') p.pop_back();
    return p + (suffix.starts_with('/') ? suffix : "/" + suffix);
}

std::string post_json(const std::string& url, const std::string& body, const std::string& bearer,
                      std::chrono::milliseconds timeout) {
    const SplitUrl target = split_url(url);
    httplib::Client client(target.origin);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    if (!bearer.empty()) client.set_bearer_token_auth(bearer);

    auto res = client.Post(target.path, body, "application/json");
    if (!res) throw TransportError("POST " + url + " failed: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300) {
        throw TransportError("POST " + url + " returned HTTP " + std::to_string(res->status));
    }
    return res->body;
}

std::string read_credential(const std::string& env_name) {
    if (env_name.empty()) return {};
    const char* value = std::getenv(env_name.c_str());
    if (value == nullptr || *value == '\0') {
        throw ConfigError("credential environment variable " + env_name + " is not set");
    }
    return value;
}

std::string encode_base64(const std::string& bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                  reinterpret_cast<const unsigned char*>(bytes.data()),
                                  static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

} // namespace keyclip::detail
