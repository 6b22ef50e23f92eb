#include "lyra/http_transport.hpp"

#include <httplib.h>

#include "lyra/error.hpp"

namespace lyra {

std::string ParsedUrl::origin() const {
  return scheme + "://" + host + ":" + std::to_string(port);
}

ParsedUrl parse_url(const std::string& url) {
  ParsedUrl out;
  const auto sep = url.find("://");
  if (sep == std::string::npos) throw ConfigError("endpoint '" + url + "' has no scheme");
  out.scheme = url.substr(0, sep);
  if (out.scheme != "http" && out.scheme != "https") {
    throw ConfigError("endpoint '" + url + "' must use http or https");
  }
  auto rest = url.substr(sep + 3);
  const auto slash = rest.find('/');
  std::string authority = rest.substr(0, slash);
  out.path = slash == std::string::npos ? "/" : rest.substr(slash);
  const auto colon = authority.rfind(':');
  if (colon != std::string::npos && authority.find(']') == std::string::npos) {
    out.host = authority.substr(0, colon);
    try {
      out.port = std::stoi(authority.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("endpoint '" + url + "' has an invalid port");
    }
  } else {
    out.host = authority;
    out.port = out.scheme == "https" ? 443 : 80;
  }
  if (out.host.empty()) throw ConfigError("endpoint '" + url + "' has no host");
  return out;
}

std::string excerpt(const std::string& text, std::size_t limit) {
  if (text.size() <= limit) return text;
  const std::string marker = "...";
  std::size_t cut = limit > marker.size() ? limit - marker.size() : 0;
  while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
  return text.substr(0, cut) + marker;
}

namespace {

class HttplibTransport final : public HttpTransport {
 public:
  HttpResponse post_json(const std::string& url, const std::string& body,
                         const HttpHeaders& headers, std::chrono::milliseconds timeout) override {
    const ParsedUrl parsed = parse_url(url);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (parsed.scheme == "https") {
      throw ConfigError("https endpoints need a build with OpenSSL support");
    }
#endif
    httplib::Client client(parsed.origin());
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());

    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto result = client.Post(parsed.path, h, body, "application/json");
    if (!result) {
      throw TransportError("POST " + parsed.origin() + parsed.path + " failed: " +
                               httplib::to_string(result.error()),
                           1);
    }
    return {result->status, result->body};
  }
};

}  // namespace

std::shared_ptr<HttpTransport> make_http_transport() {
  return std::make_shared<HttplibTransport>();
}

}  // namespace lyra
