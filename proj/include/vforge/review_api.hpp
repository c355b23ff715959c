#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "httplib.h"
#include "vforge/ontology.hpp"
#include "vforge/review.hpp"
#include "vforge/schema.hpp"
#include "vforge/translation.hpp"

namespace vforge::review {

/// Holds review sessions and, per session, what compilation needs.
class ReviewService {
public:
  struct Context {
    std::optional<schema::SourceSchema> schema;
    std::optional<onto::Ontology> target;
    pipeline::Provenance provenance;
    std::optional<std::filesystem::path> persist_dir;  // session.json / config.json written here
  };

  /// Replaces any session with the same id; returns the id.
  std::string add(ReviewSession session, Context context = {});

  /// Copy of the current session state. UnknownSession otherwise.
  ReviewSession session(const std::string& id) const;

  /// Routes:
  ///   POST /api/sessions, GET /api/sessions, GET /api/sessions/{id},
  ///   GET /api/sessions/{id}/candidates?status=,
  ///   GET /api/sessions/{id}/annotations/{concept},
  ///   POST /api/sessions/{id}/candidates/{pairId}/decision,
  ///   POST /api/sessions/{id}/compile.
  void mount(httplib::Server& server);

private:
  struct Entry {
    ReviewSession session;
    Context context;
  };

  Entry& entry(const std::string& id);
  void persist(const Entry& e) const;

  mutable std::mutex mu_;
  std::map<std::string, Entry> sessions_;
};

}  // namespace vforge::review
