#include "vforge/http_api.hpp"

#include <charconv>

namespace vforge::http {

int status_for(std::string_view code) {
  static constexpr std::string_view kNotFound[] = {"NotFound", "UnknownSilo", "UnknownVThing",
                                                   "UnknownPair", "UnknownConcept", "UnknownSession"};
  static constexpr std::string_view kConflict[] = {"DuplicateId", "AlreadyAdded", "TargetConflict",
                                                   "InvalidTransition"};
  for (auto c : kNotFound) {
    if (c == code) return 404;
  }
  for (auto c : kConflict) {
    if (c == code) return 409;
  }
  return 400;
}

void send_json(httplib::Response& res, const Json& body, int status) {
  res.status = status;
  res.set_content(dump_compact(body), "application/json");
}

void send_error(httplib::Response& res, std::string_view code, std::string_view message) {
  send_json(res, {{"error", code}, {"message", message}}, status_for(code));
}

Json body_json(const httplib::Request& req) { return parse_json(req.body); }

ListenAddress parse_listen(std::string_view text) {
  ListenAddress a;
  std::string_view port = text;
  if (auto colon = text.rfind(':'); colon != std::string_view::npos) {
    if (colon > 0) a.host = std::string(text.substr(0, colon));
    port = text.substr(colon + 1);
  }
  int value = -1;
  auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
  if (ec != std::errc() || ptr != port.data() + port.size() || value < 0 || value > 65535) {
    fail("InvalidArgument", "listen address must be host:port, got '" + std::string(text) + "'");
  }
  a.port = value;
  return a;
}

}  // namespace vforge::http
