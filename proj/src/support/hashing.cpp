#include "prszz/support/hashing.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace prszz::hashing {

std::array<unsigned char, 20> sha1(std::string_view data) {
    std::array<unsigned char, 20> out{};
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr ||
        EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, out.data(), &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("sha1 digest failed");
    }
    EVP_MD_CTX_free(ctx);
    return out;
}

std::string sha1_hex(std::string_view data) {
    auto digest = sha1(data);
    return to_hex(digest.data(), digest.size());
}

std::string to_hex(const unsigned char* data, std::size_t len) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (std::size_t i = 0; i < len; ++i) {
        out.push_back(digits[data[i] >> 4]);
        out.push_back(digits[data[i] & 0x0f]);
    }
    return out;
}

} // namespace prszz::hashing
