#include "kgav/http.hpp"

#include <httplib.h>

#include <chrono>

#include "kgav/error.hpp"

namespace kgav::http {

std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme = url.find("://");
  if (scheme == std::string::npos) throw ConfigError("URL without scheme: " + url);
  auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

Response send(const Request& request) {
  auto [origin, path] = split_url(request.url);
  httplib::Client client(origin);
  auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(request.timeout_seconds));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Headers headers;
  for (const auto& [k, v] : request.headers) headers.emplace(k, v);
  httplib::Params params;
  for (const auto& [k, v] : request.params) params.emplace(k, v);

  httplib::Result result;
  if (request.method == "GET") {
    result = client.Get(path, params, headers);
  } else if (request.method == "POST") {
    if (!request.body.empty()) {
      if (!params.empty()) {
        path = httplib::append_query_params(path, params);
      }
      result = client.Post(path, headers, request.body,
                           request.content_type.empty() ? "application/octet-stream"
                                                        : request.content_type);
    } else {
      result = client.Post(path, headers, params);
    }
  } else {
    throw ConfigError("unsupported HTTP method " + request.method);
  }
  if (!result) {
    throw TransportError(request.method + " " + request.url + " failed: " +
                         httplib::to_string(result.error()));
  }
  Response response;
  response.status = result->status;
  response.body = result->body;
  response.content_type = result->get_header_value("Content-Type");
  return response;
}

}  // namespace kgav::http
