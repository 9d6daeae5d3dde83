#pragma once

#include "prszz/forge/http.hpp"
#include "prszz/forge/model.hpp"

#include <cstdint>
#include <functional>
#include <string>

namespace prszz::forge {

struct FetchOptions {
    int per_page = 100;       // GitHub list page size
    int jira_page = 50;       // Jira search page size
    int max_retries = 3;
    int parallelism = 4;      // bounded-parallel per-item detail requests
    // Injectable so replay tests never sleep for real.
    std::function<void(int)> sleep_seconds;
    std::function<std::int64_t()> now; // for rate-limit reset waits
};

// Drains every page of pull requests and issues created inside the window,
// including comments, reviews, per-inner-commit file lists, and integrated
// links. Honors rate limits with bounded retries.
Snapshot fetch_github(HttpTransport& transport, const std::string& owner_repo,
                      const std::string& token, std::int64_t window_start,
                      std::int64_t window_end, const std::string& api_base,
                      const FetchOptions& options = {});

// Issues-only partial snapshot from a Jira-style tracker.
Snapshot fetch_jira(HttpTransport& transport, const std::string& base_url,
                    const std::string& project_key, const std::string& token,
                    std::int64_t window_start, std::int64_t window_end,
                    const FetchOptions& options = {});

std::string url_encode(std::string_view value);

} // namespace prszz::forge
