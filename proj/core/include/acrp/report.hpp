#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "acrp/bytes.hpp"
#include "acrp/chunking.hpp"
#include "acrp/crypto.hpp"

namespace acrp {

enum class ReportType : std::uint8_t {
    Pothole = 0,
    TrashDump = 1,
    Graffiti = 2,
    StreetDamage = 3,
    TrafficObstruction = 4,
    Other = 5,
};

inline constexpr std::uint8_t kReportTypeCount = 6;

std::string_view to_string(ReportType t);
ReportType parse_report_type(std::string_view name);

/// WGS84 position in microdegrees.
struct GeoPoint {
    std::int32_t lat = 0;
    std::int32_t lon = 0;

    auto operator<=>(const GeoPoint&) const = default;

    static GeoPoint from_degrees(double lat_deg, double lon_deg);
    double lat_deg() const { return lat / 1e6; }
    double lon_deg() const { return lon / 1e6; }
    bool valid() const {
        return lat >= -90'000'000 && lat <= 90'000'000 && lon >= -180'000'000 && lon <= 180'000'000;
    }
};

struct Report {
    ReportType type = ReportType::Other;
    GeoPoint location;
    chunking::ImageDescriptor picture;
    chunking::ChunkingScheme scheme = chunking::ChunkingScheme::coarse();
    std::string description;

    bool operator==(const Report&) const = default;
};

struct ReportId {
    Digest digest{};

    auto operator<=>(const ReportId&) const = default;
    std::string hex() const { return to_hex(digest); }
    static ReportId from_hex(std::string_view hex) { return {digest_from_hex(hex)}; }
};

/// Throws Error(InvalidReport) with the first violated constraint.
void validate_report(const Report& r);

/// T:u8 | lat:i32 | lon:i32 | len(P):u32 | P | len(D):u32 | D, where P is the picture's
/// chunk list as count:u32 followed by length-prefixed chunks.
Bytes canonical_encode(const Report& r);
Report decode_report(ByteView bytes);
ReportId report_id(const Report& r);

double haversine_m(const GeoPoint& a, const GeoPoint& b);

struct BoundingBox {
    GeoPoint min;
    GeoPoint max;

    bool operator==(const BoundingBox&) const = default;
    bool contains(const GeoPoint& p) const {
        return p.lat >= min.lat && p.lat <= max.lat && p.lon >= min.lon && p.lon <= max.lon;
    }
};

struct Polygon {
    std::vector<GeoPoint> vertices;

    bool operator==(const Polygon&) const = default;
    /// Even-odd rule; points on an edge count as inside.
    bool contains(const GeoPoint& p) const;
};

using Region = std::variant<BoundingBox, Polygon>;

struct AuthorityEntry {
    std::string name;
    std::optional<ReportType> type;  // nullopt: every type
    std::optional<Region> region;    // nullopt: everywhere, including unknown locations
    PublicKey authority;

    bool operator==(const AuthorityEntry&) const = default;
    bool matches(ReportType t, const std::optional<GeoPoint>& where) const;
};

struct AuthorityDirectory {
    std::vector<AuthorityEntry> entries;

    bool contains_key(const PublicKey& pk) const;
};

/// First matching entry in directory order. `where` is nullopt when the location is not public.
const AuthorityEntry& route(ReportType t, const std::optional<GeoPoint>& where, const AuthorityDirectory& dir);

struct AuditorEntry {
    PublicKey key;
    std::uint64_t activation_height = 0;

    bool operator==(const AuditorEntry&) const = default;
};

struct AuditorRegistry {
    std::vector<AuditorEntry> auditors;  // on-chain registration order

    std::vector<PublicKey> active_at(std::uint64_t height) const;
};

struct AuditorSelection {
    std::uint32_t index = 0;
    PublicKey key;
};

/// index = big-endian H("acrp-auditor" | id | beacon) mod |auditors|
AuditorSelection select_auditor(const ReportId& id, const Digest& beacon, std::span<const PublicKey> auditors);

} // namespace acrp
