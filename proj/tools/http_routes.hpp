#pragma once

#include "httplib.h"
#include "palms/label_api.hpp"

namespace palms {

/// Mounts the session routes on `server`. The store must outlive it.
inline void mount_session_routes(httplib::Server& server, SessionStore& store) {
  const auto route = [&store](const httplib::Request& req, httplib::Response& res) {
    const auto r = handle_request(store, req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  server.Get(R"(/sessions(/.*)?)", route);
  server.Post(R"(/sessions(/.*)?)", route);
  server.Options(R"(/sessions(/.*)?)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
}

}  // namespace palms
