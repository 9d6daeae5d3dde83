#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "prszz/forge/http.hpp"

#include "prszz/support/errors.hpp"
#include "prszz/support/json_io.hpp"
#include "prszz/support/strings.hpp"

#include <nlohmann/json.hpp>

namespace prszz::forge {

HttpResponse LiveTransport::get(const std::string& url, const HeaderList& headers) {
    // Split scheme://host[:port] from the path.
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw NetworkError("malformed url: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    std::string origin =
        path_start == std::string::npos ? url : url.substr(0, path_start);
    std::string path =
        path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    client.set_follow_location(true);
    client.set_connection_timeout(30);
    client.set_read_timeout(60);

    httplib::Headers hl;
    for (const auto& [name, value] : headers)
        hl.emplace(name, value);

    auto result = client.Get(path, hl);
    if (!result)
        throw NetworkError("request failed for " + url + ": " +
                           httplib::to_string(result.error()));

    HttpResponse response;
    response.status = result->status;
    for (const auto& [name, value] : result->headers)
        response.headers[strings::to_lower(name)] = value;
    response.body = result->body;
    return response;
}

RecordedTransport::RecordedTransport(const std::filesystem::path& dir) {
    auto index = json_io::read_file(dir / "index.json");
    for (const auto& entry : index) {
        HttpResponse response;
        response.status = entry.value("status", 200);
        if (auto it = entry.find("headers"); it != entry.end())
            for (const auto& [name, value] : it->items())
                response.headers[strings::to_lower(name)] =
                    value.get<std::string>();
        if (auto it = entry.find("body_file"); it != entry.end()) {
            auto body = json_io::read_file(dir / it->get<std::string>());
            response.body = body.dump();
        } else if (auto body_it = entry.find("body"); body_it != entry.end()) {
            response.body = body_it->is_string() ? body_it->get<std::string>()
                                                 : body_it->dump();
        }
        responses_[entry.at("url").get<std::string>()].push_back(
            std::move(response));
    }
}

void RecordedTransport::add(const std::string& url, HttpResponse response) {
    std::lock_guard lock(mutex_);
    responses_[url].push_back(std::move(response));
}

HttpResponse RecordedTransport::get(const std::string& url, const HeaderList&) {
    std::lock_guard lock(mutex_);
    requests_.push_back(url);
    auto it = responses_.find(url);
    if (it == responses_.end() || it->second.empty())
        throw NetworkError("no recorded response for " + url);
    auto& cursor = cursor_[url];
    // Repeat the last recorded response once the sequence is exhausted.
    const auto& response =
        it->second[std::min(cursor, it->second.size() - 1)];
    ++cursor;
    return response;
}

} // namespace prszz::forge
