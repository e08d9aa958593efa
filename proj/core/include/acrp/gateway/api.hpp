#pragma once

// Wire-level conventions shared by the HTTP server and its clients.

#include <string>
#include <string_view>

#include "acrp/crypto.hpp"
#include "acrp/ledger_state.hpp"

namespace acrp::gateway {

/// Headers authorising reads of access-controlled storage objects.
inline constexpr const char* kKeyHeader = "X-ACRP-Key";        // hex public key
inline constexpr const char* kSignatureHeader = "X-ACRP-Sig";  // hex Ed25519 signature

/// "acrp-storage-get" | key | chain_id, signed by the requesting key.
Bytes storage_read_message(const Digest& key, std::string_view chain_id);

/// HTTP status mirroring a ledger rejection: 400 malformed, 401 bad signature, 403 wrong role,
/// 404 unknown report, 409 conflicts with chain state.
int http_status(ledger::RejectCode code);

/// Error body code strings ("HashMismatch", "WrongRole", ...).
std::string error_code(ledger::RejectCode code);

} // namespace acrp::gateway
