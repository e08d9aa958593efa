#include "keyfile.hpp"

#include <fstream>

#include <json.hpp>

namespace acrp::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

void save_key(const fs::path& path, const SigningKey& key) {
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    {
        std::ofstream out(path, std::ios::trunc);
        out << json{{"public_key", key.public_key().hex()}, {"seed", to_hex(key.seed())}}.dump(2) << "\n";
        if (!out)
            throw Error(Errc::Io, "cannot write " + path.string());
    }
    fs::permissions(path, fs::perms::owner_read | fs::perms::owner_write);
}

SigningKey load_key(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::Io, "cannot read key file " + path.string());
    auto j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.contains("seed"))
        throw Error(Errc::Malformed, path.string() + " is not a key file");
    auto seed = from_hex(j["seed"].get<std::string>());
    if (seed.size() != 32)
        throw Error(Errc::Malformed, path.string() + ": seed must be 32 bytes");
    std::array<std::uint8_t, 32> s{};
    std::copy(seed.begin(), seed.end(), s.begin());
    SigningKey key(s);
    if (j.contains("public_key") && PublicKey::from_hex(j["public_key"].get<std::string>()) != key.public_key())
        throw Error(Errc::Malformed, path.string() + ": public key does not match seed");
    return key;
}

PublicKey parse_public_key(const std::string& hex_or_path) {
    if (hex_or_path.size() == 64 && !fs::exists(hex_or_path))
        return PublicKey::from_hex(hex_or_path);
    return load_key(hex_or_path).public_key();
}

} // namespace acrp::cli
