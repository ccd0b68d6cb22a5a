#pragma once

// Thin synchronous HTTP client used by every remote backend.

#include <string>
#include <utility>
#include <vector>

namespace kgav::http {

struct Request {
  std::string method = "GET";  // GET or POST
  std::string url;             // scheme://host[:port]/path
  std::vector<std::pair<std::string, std::string>> headers;
  /// GET: appended as the query string. POST: sent form-encoded unless `body`
  /// is non-empty.
  std::vector<std::pair<std::string, std::string>> params;
  std::string body;
  std::string content_type;
  double timeout_seconds = 30.0;
};

struct Response {
  int status = 0;
  std::string body;
  std::string content_type;
};

/// Throws TransportError when no HTTP response could be obtained. Non-2xx
/// statuses are returned, not thrown.
Response send(const Request& request);

/// Splits `http://host:port/path` into origin and path ("/" when absent).
std::pair<std::string, std::string> split_url(const std::string& url);

}  // namespace kgav::http
