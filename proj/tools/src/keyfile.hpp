#pragma once

#include <filesystem>
#include <string>

#include "acrp/crypto.hpp"

namespace acrp::cli {

// {"public_key": "<hex>", "seed": "<hex>"}; written 0600.
void save_key(const std::filesystem::path& path, const SigningKey& key);
SigningKey load_key(const std::filesystem::path& path);

/// A hex public key, or the path of a key file whose public half is used.
PublicKey parse_public_key(const std::string& hex_or_path);

} // namespace acrp::cli
