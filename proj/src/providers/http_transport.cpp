#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "revmatch/providers.hpp"

namespace revmatch {
namespace {

class HttplibTransport : public HttpTransport {
 public:
  HttplibTransport(const std::string& endpoint, double timeout_seconds) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) throw std::invalid_argument("endpoint needs a scheme: " + endpoint);
    const auto path_start = endpoint.find('/', scheme_end + 3);
    const std::string origin = endpoint.substr(0, path_start);
    if (path_start != std::string::npos) prefix_ = endpoint.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    client_ = std::make_unique<httplib::Client>(origin);
    const auto secs = static_cast<time_t>(timeout_seconds);
    const auto usecs = static_cast<time_t>((timeout_seconds - static_cast<double>(secs)) * 1e6);
    client_->set_connection_timeout(secs, usecs);
    client_->set_read_timeout(secs, usecs);
    client_->set_write_timeout(secs, usecs);
  }

  HttpResponse post_json(const std::string& path, const std::string& body,
                         const std::vector<std::pair<std::string, std::string>>& headers) override {
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = client_->Post(prefix_ + path, h, body, "application/json");
    if (!res) throw TransportError("request to " + prefix_ + path + " failed: " + httplib::to_string(res.error()));
    return HttpResponse{res->status, res->body};
  }

 private:
  std::unique_ptr<httplib::Client> client_;
  std::string prefix_;
};

}  // namespace

std::unique_ptr<HttpTransport> make_http_transport(const std::string& endpoint, double timeout_seconds) {
  return std::make_unique<HttplibTransport>(endpoint, timeout_seconds);
}

}  // namespace revmatch
