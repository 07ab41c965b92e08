#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace gtrx::ids {

struct Uuid {
    std::array<std::uint8_t, 16> bytes{};

    /// Lowercase 8-4-4-4-12 form.
    std::string str() const;
    static std::optional<Uuid> parse(std::string_view s);

    int version() const { return bytes[6] >> 4; }
    /// True when the variant bits are 10 (RFC 4122).
    bool rfc4122_variant() const { return (bytes[8] & 0xC0) == 0x80; }

    auto operator<=>(const Uuid&) const = default;
};

/// RFC 4122 NAMESPACE_URL.
Uuid namespace_url();

/// Namespace for every derived entity id: uuid5(NAMESPACE_URL, "urn:gtrx:entity-ids").
/// Changing it changes every derived id.
inline constexpr std::string_view kEntityNamespace = "b6ffec7e-21ec-5cc5-a6c7-1670b0572ec2";
Uuid entity_namespace();

/// Name-based SHA-1 UUID. Throws InvalidInput for an empty name.
Uuid make_uuid5(const Uuid& ns, std::string_view name);

/// "{kind}|{council}|{source_key}", lowercased.
std::string canonical_key(std::string_view kind, std::string_view council, std::string_view source_key);

/// make_uuid5(entity_namespace(), canonical_key(...)).str()
std::string derive_id(std::string_view kind, std::string_view council, std::string_view source_key);

}  // namespace gtrx::ids
