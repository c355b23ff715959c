#pragma once

#include <string>
#include <string_view>

#include "httplib.h"
#include "vforge/document.hpp"
#include "vforge/error.hpp"

namespace vforge::http {

/// HTTP status for a domain error code (404 for lookups, 409 for conflicts, else 400).
int status_for(std::string_view code);

void send_json(httplib::Response& res, const Json& body, int status = 200);
void send_error(httplib::Response& res, std::string_view code, std::string_view message);

/// Parses the request body as a JSON document; MalformedDocument otherwise.
Json body_json(const httplib::Request& req);

/// Runs a handler and turns domain and JSON errors into error responses.
template <class F>
void guarded(httplib::Response& res, F&& handler) {
  try {
    handler();
  } catch (const Error& e) {
    send_error(res, e.code(), e.what());
  } catch (const nlohmann::json::exception& e) {
    send_error(res, "MalformedDocument", e.what());
  }
}

struct ListenAddress {
  std::string host = "127.0.0.1";
  int port = 0;
};

/// "host:port", ":port" or "port". InvalidArgument on anything else.
ListenAddress parse_listen(std::string_view text);

}  // namespace vforge::http
