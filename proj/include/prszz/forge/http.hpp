#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace prszz::forge {

struct HttpResponse {
    int status = 0;
    std::map<std::string, std::string> headers; // lower-cased names
    std::string body;
};

using HeaderList = std::vector<std::pair<std::string, std::string>>;

class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    // Throws NetworkError on transport failure (connection refused, DNS, ...).
    virtual HttpResponse get(const std::string& url, const HeaderList& headers) = 0;
};

// Live transport over cpp-httplib (used only behind the explicit --live flag).
class LiveTransport : public HttpTransport {
public:
    HttpResponse get(const std::string& url, const HeaderList& headers) override;
};

// Replays responses recorded on disk or registered programmatically.
// Directory layout: <dir>/index.json holding
//   [{"url": ..., "status": ..., "headers": {...}, "body": ...} |
//    {"url": ..., "status": ..., "body_file": "relative.json"}]
class RecordedTransport : public HttpTransport {
public:
    RecordedTransport() = default;
    explicit RecordedTransport(const std::filesystem::path& dir);

    void add(const std::string& url, HttpResponse response);

    HttpResponse get(const std::string& url, const HeaderList& headers) override;

    const std::vector<std::string>& requests() const { return requests_; }

private:
    std::map<std::string, std::vector<HttpResponse>> responses_;
    std::map<std::string, std::size_t> cursor_; // sequential replay per URL
    std::vector<std::string> requests_;
    std::mutex mutex_;
};

} // namespace prszz::forge
