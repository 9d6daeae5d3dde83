#include "prszz/support/zstream.hpp"

#include "prszz/support/errors.hpp"

#include <zlib.h>

#include <cstring>

namespace prszz::zstream {

std::string inflate_prefix(std::string_view data, std::size_t* consumed) {
    z_stream zs;
    std::memset(&zs, 0, sizeof(zs));
    if (inflateInit(&zs) != Z_OK)
        throw CorruptObjectDatabase("zlib inflateInit failed");

    std::string out;
    char buf[16384];
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());

    int rc = Z_OK;
    do {
        zs.next_out = reinterpret_cast<Bytef*>(buf);
        zs.avail_out = sizeof(buf);
        rc = ::inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw CorruptObjectDatabase("zlib inflate failed (rc=" +
                                        std::to_string(rc) + ")");
        }
        out.append(buf, sizeof(buf) - zs.avail_out);
    } while (rc != Z_STREAM_END);

    if (consumed != nullptr)
        *consumed = zs.total_in;
    inflateEnd(&zs);
    return out;
}

std::string inflate(std::string_view compressed) {
    return inflate_prefix(compressed, nullptr);
}

std::string deflate(std::string_view raw) {
    z_stream zs;
    std::memset(&zs, 0, sizeof(zs));
    if (deflateInit(&zs, Z_BEST_SPEED) != Z_OK)
        throw IoError("zlib deflateInit failed");

    std::string out;
    char buf[16384];
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(raw.data()));
    zs.avail_in = static_cast<uInt>(raw.size());

    int rc = Z_OK;
    do {
        zs.next_out = reinterpret_cast<Bytef*>(buf);
        zs.avail_out = sizeof(buf);
        rc = ::deflate(&zs, Z_FINISH);
        if (rc == Z_STREAM_ERROR) {
            deflateEnd(&zs);
            throw IoError("zlib deflate failed");
        }
        out.append(buf, sizeof(buf) - zs.avail_out);
    } while (rc != Z_STREAM_END);

    deflateEnd(&zs);
    return out;
}

} // namespace prszz::zstream
