#include "acrp/report.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace acrp {
namespace {

constexpr std::array<std::string_view, kReportTypeCount> kTypeNames{
    "Pothole", "TrashDump", "Graffiti", "StreetDamage", "TrafficObstruction", "Other"};

constexpr double kEarthRadiusM = 6'371'000.0;

bool on_segment(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
    std::int64_t cross = (std::int64_t{b.lat} - a.lat) * (std::int64_t{p.lon} - a.lon) -
                         (std::int64_t{b.lon} - a.lon) * (std::int64_t{p.lat} - a.lat);
    return cross == 0 && std::min(a.lat, b.lat) <= p.lat && p.lat <= std::max(a.lat, b.lat) &&
           std::min(a.lon, b.lon) <= p.lon && p.lon <= std::max(a.lon, b.lon);
}

} // namespace

std::string_view to_string(ReportType t) {
    auto i = static_cast<std::size_t>(t);
    return i < kTypeNames.size() ? kTypeNames[i] : "Invalid";
}

ReportType parse_report_type(std::string_view name) {
    for (std::size_t i = 0; i < kTypeNames.size(); ++i)
        if (kTypeNames[i] == name)
            return static_cast<ReportType>(i);
    throw Error(Errc::InvalidReport, "unknown report type '" + std::string(name) + "'");
}

GeoPoint GeoPoint::from_degrees(double lat_deg, double lon_deg) {
    return {static_cast<std::int32_t>(std::llround(lat_deg * 1e6)),
            static_cast<std::int32_t>(std::llround(lon_deg * 1e6))};
}

void validate_report(const Report& r) {
    if (static_cast<std::uint8_t>(r.type) >= kReportTypeCount)
        throw Error(Errc::InvalidReport, "type outside the fixed taxonomy");
    if (!r.location.valid())
        throw Error(Errc::InvalidReport, "location outside WGS84 range");
    if (!chunking::valid_utf8(r.description))
        throw Error(Errc::InvalidReport, "description is not UTF-8");
    try {
        r.picture.validate();
        chunking::validate_scheme(r.scheme, r.picture.width, r.picture.height);
    } catch (const Error& e) {
        throw Error(Errc::InvalidReport, e.what());
    }
}

Bytes canonical_encode(const Report& r) {
    validate_report(r);
    auto picture = chunking::chunk_image(r.picture, r.scheme);
    ByteWriter p;
    p.u32(static_cast<std::uint32_t>(picture.chunks.size()));
    for (const auto& c : picture.chunks)
        p.blob(c);

    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(r.type)).i32(r.location.lat).i32(r.location.lon);
    w.blob(p.bytes());
    w.blob(r.description);
    return std::move(w).take();
}

Report decode_report(ByteView bytes) {
    try {
        ByteReader r(bytes);
        Report out;
        auto type = r.u8();
        if (type >= kReportTypeCount)
            throw Error(Errc::InvalidReport, "type outside the fixed taxonomy");
        out.type = static_cast<ReportType>(type);
        out.location.lat = r.i32();
        out.location.lon = r.i32();

        ByteReader p(r.blob());
        auto count = p.u32();
        if (count > rss::kMaxChunks)
            throw Error(Errc::InvalidReport, "too many picture chunks");
        std::vector<Bytes> chunks;
        for (std::uint32_t i = 0; i < count; ++i) {
            auto c = p.blob();
            chunks.emplace_back(c.begin(), c.end());
        }
        p.expect_end();
        auto decoded = chunking::reassemble_image(chunks);
        out.picture = std::move(decoded.image);
        out.scheme = std::move(decoded.scheme);
        out.description = r.str();
        r.expect_end();

        if (canonical_encode(out) != Bytes(bytes.begin(), bytes.end()))
            throw Error(Errc::InvalidReport, "encoding is not canonical");
        return out;
    } catch (const Error& e) {
        if (e.code() == Errc::InvalidReport)
            throw;
        throw Error(Errc::InvalidReport, e.what());
    }
}

ReportId report_id(const Report& r) { return {sha256(canonical_encode(r))}; }

double haversine_m(const GeoPoint& a, const GeoPoint& b) {
    constexpr double rad = std::numbers::pi / 180.0;
    double phi1 = a.lat_deg() * rad;
    double phi2 = b.lat_deg() * rad;
    double dphi = phi2 - phi1;
    double dlambda = (b.lon_deg() - a.lon_deg()) * rad;
    double h = std::sin(dphi / 2) * std::sin(dphi / 2) +
               std::cos(phi1) * std::cos(phi2) * std::sin(dlambda / 2) * std::sin(dlambda / 2);
    h = std::min(1.0, std::max(0.0, h));
    return 2 * kEarthRadiusM * std::atan2(std::sqrt(h), std::sqrt(1 - h));
}

bool Polygon::contains(const GeoPoint& p) const {
    const auto n = vertices.size();
    if (n < 3)
        return false;
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const auto& a = vertices[i];
        const auto& b = vertices[j];
        if (on_segment(p, a, b))
            return true;
        if ((a.lat > p.lat) != (b.lat > p.lat)) {
            double lon_at = static_cast<double>(b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon;
            if (p.lon < lon_at)
                inside = !inside;
        }
    }
    return inside;
}

bool AuthorityEntry::matches(ReportType t, const std::optional<GeoPoint>& where) const {
    if (type && *type != t)
        return false;
    if (!region)
        return true;
    if (!where)
        return false;
    return std::visit([&](const auto& r) { return r.contains(*where); }, *region);
}

bool AuthorityDirectory::contains_key(const PublicKey& pk) const {
    for (const auto& e : entries)
        if (e.authority == pk)
            return true;
    return false;
}

const AuthorityEntry& route(ReportType t, const std::optional<GeoPoint>& where, const AuthorityDirectory& dir) {
    for (const auto& e : dir.entries)
        if (e.matches(t, where))
            return e;
    throw Error(Errc::NoResponsibleAuthority, std::string(to_string(t)));
}

std::vector<PublicKey> AuditorRegistry::active_at(std::uint64_t height) const {
    std::vector<PublicKey> out;
    for (const auto& a : auditors)
        if (a.activation_height <= height)
            out.push_back(a.key);
    return out;
}

AuditorSelection select_auditor(const ReportId& id, const Digest& beacon, std::span<const PublicKey> auditors) {
    if (auditors.empty())
        throw Error(Errc::EmptyRegistry, "no active auditors");
    auto h = Hasher().add("acrp-auditor").add(id.digest).add(beacon).finish();
    std::uint64_t m = auditors.size();
    std::uint64_t rem = 0;
    for (auto byte : h)
        rem = (rem * 256 + byte) % m;
    auto index = static_cast<std::uint32_t>(rem);
    return {index, auditors[index]};
}

} // namespace acrp
