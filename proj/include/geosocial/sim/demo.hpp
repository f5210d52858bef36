#pragma once

#include <string>
#include <vector>

#include "geosocial/common/result.hpp"

namespace geosocial::sim {

struct DemoSummary {
    int users_created = 0;
    int users_existing = 0;
    int friendships_created = 0;
    int posts_created = 0;
    int messages_sent = 0;
    int fixes_recorded = 0;
    // One line per step that hit an existing record (HTTP 409).
    std::vector<std::string> conflicts;
    // One line per step that failed for any other reason.
    std::vector<std::string> errors;
};

// Populates a running server with five users in five Nigerian cities, all
// pairwise friends, each with a post and a location fix, plus a short chat
// between neighbours. Safe to rerun: existing users and friendships are
// reported as conflicts and nothing is duplicated.
Result<DemoSummary> seed_demo(const std::string& server_url);

}  // namespace geosocial::sim
