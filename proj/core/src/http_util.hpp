#pragma once

#include <chrono>
#include <string>

namespace keyclip::detail {

struct SplitUrl {
    std::string origin; // scheme://host[:port]
    std::string path;   // always starts with '/'
};

/// Splits "http://host:8000/v1" into origin and path. Throws ConfigError for
/// anything that is not http(s).
SplitUrl split_url(const std::string& url);

std::string join_path(const std::string& prefix, const std::string& suffix);

/// POSTs a JSON body and returns the response body. Connection failures and
/// non-2xx statuses throw TransportError.
std::string post_json(const std::string& url, const std::string& body, const std::string& bearer,
                      std::chrono::milliseconds timeout);

/// Reads the credential variable; empty `env_name` means no credential.
std::string read_credential(const std::string& env_name);

std::string encode_base64(const std::string& bytes);

} // namespace keyclip::detail
