#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "acrp/report.hpp"

namespace acrp::ledger {

/// Consortium bootstrap configuration. Coordinates are integer microdegrees.
///
/// {
///   "chain_id": "acrp-devnet", "audit_timeout": 20, "genesis_time": 1700000000, "block_interval": 5,
///   "members": ["<hex pk>", ...], "auditors": ["<hex pk>", ...],
///   "authorities": [{"name": "roads", "type": "Pothole" | null,
///                    "region": null | {"bbox": [min_lat, min_lon, max_lat, max_lon]}
///                                   | {"polygon": [[lat, lon], ...]},
///                    "key": "<hex pk>"}]
/// }
struct Genesis {
    std::string chain_id = "acrp-devnet";
    std::uint64_t audit_timeout = 20;
    std::uint64_t genesis_time = 1'700'000'000;
    std::uint64_t block_interval = 5;
    std::vector<PublicKey> members;
    std::vector<PublicKey> auditors;
    std::vector<AuthorityEntry> authorities;

    bool operator==(const Genesis&) const = default;

    std::string to_json() const;
    static Genesis from_json(std::string_view text);
    static Genesis load(const std::string& path);

    /// SHA-256 of the canonical JSON form; the first block's prev_hash.
    Digest hash() const;
    std::uint64_t timestamp_at(std::uint64_t height) const { return genesis_time + height * block_interval; }
};

} // namespace acrp::ledger
