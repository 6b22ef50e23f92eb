#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace lyra {

struct HttpResponse {
  int status = 0;
  std::string body;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

/// JSON-over-HTTP POST. Implementations throw TransportError when no
/// response was received; any received status is returned, not thrown.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post_json(const std::string& url, const std::string& body,
                                 const HttpHeaders& headers, std::chrono::milliseconds timeout) = 0;
};

/// cpp-httplib backed transport. http:// always; https:// when built with
/// OpenSSL.
std::shared_ptr<HttpTransport> make_http_transport();

struct ParsedUrl {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string path;

  std::string origin() const;
};

/// Throws ConfigError for anything that is not scheme://host[:port][/path].
ParsedUrl parse_url(const std::string& url);

/// Cuts `text` to at most `limit` bytes, "..." included, without splitting a
/// UTF-8 sequence.
std::string excerpt(const std::string& text, std::size_t limit = 200);

}  // namespace lyra
