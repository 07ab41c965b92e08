#include "gtrx/uuid5.hpp"

#include <memory>

#include <openssl/evp.h>

#include "gtrx/errors.hpp"
#include "gtrx/text.hpp"

namespace gtrx::ids {

namespace {

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::string Uuid::str() const {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(36);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        if (i == 4 || i == 6 || i == 8 || i == 10) out.push_back('-');
        out.push_back(kHex[bytes[i] >> 4]);
        out.push_back(kHex[bytes[i] & 0xF]);
    }
    return out;
}

std::optional<Uuid> Uuid::parse(std::string_view s) {
    if (s.size() != 36) return std::nullopt;
    Uuid u;
    std::size_t b = 0;
    for (std::size_t i = 0; i < s.size();) {
        if (i == 8 || i == 13 || i == 18 || i == 23) {
            if (s[i] != '-') return std::nullopt;
            ++i;
            continue;
        }
        const int hi = hex_value(s[i]);
        const int lo = hex_value(s[i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        u.bytes[b++] = static_cast<std::uint8_t>(hi << 4 | lo);
        i += 2;
    }
    return u;
}

Uuid namespace_url() { return *Uuid::parse("6ba7b811-9dad-11d1-80b4-00c04fd430c8"); }

Uuid entity_namespace() { return *Uuid::parse(kEntityNamespace); }

Uuid make_uuid5(const Uuid& ns, std::string_view name) {
    if (name.empty()) throw InvalidInput("uuid5 name must be non-empty");
    const std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), ns.bytes.data(), ns.bytes.size()) != 1 ||
        EVP_DigestUpdate(ctx.get(), name.data(), name.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1 || length < 16)
        throw Error("internal", "SHA-1 digest failed");
    Uuid u;
    for (std::size_t i = 0; i < u.bytes.size(); ++i) u.bytes[i] = digest[i];
    u.bytes[6] = static_cast<std::uint8_t>((u.bytes[6] & 0x0F) | 0x50);
    u.bytes[8] = static_cast<std::uint8_t>((u.bytes[8] & 0x3F) | 0x80);
    return u;
}

std::string canonical_key(std::string_view kind, std::string_view council, std::string_view source_key) {
    std::string s;
    s.append(kind).append("|").append(council).append("|").append(source_key);
    return text::to_lower_ascii(s);
}

std::string derive_id(std::string_view kind, std::string_view council, std::string_view source_key) {
    return make_uuid5(entity_namespace(), canonical_key(kind, council, source_key)).str();
}

}  // namespace gtrx::ids
