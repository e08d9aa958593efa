#include "acrp/storage.hpp"

#include <algorithm>
#include <mutex>
#include <fstream>

#include "acrp/crypto.hpp"

namespace acrp::storage {
namespace fs = std::filesystem;

BlobStore::BlobStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

fs::path BlobStore::path_for(const Digest& key) const {
    auto hex = to_hex(key);
    return root_ / hex.substr(0, 2) / hex.substr(2, 2) / hex;
}

Digest BlobStore::put(ByteView value) {
    if (value.size() > kMaxObjectSize)
        throw Error(Errc::TooLarge, std::to_string(value.size()) + " bytes");
    auto key = sha256(value);
    auto path = path_for(key);
    std::shared_lock lock(mu_);
    if (fs::exists(path))
        return key;
    fs::create_directories(path.parent_path());
    auto tmp = path;
    tmp += "." + to_hex(random_bytes(8)) + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(value.data()), static_cast<std::streamsize>(value.size()));
        out.flush();
        if (!out)
            throw Error(Errc::Io, "cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
    return key;
}

std::optional<StoredObject> BlobStore::get_object(const Digest& key) const {
    auto path = path_for(key);
    std::shared_lock lock(mu_);
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return std::nullopt;
    Bytes value((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (sha256(value) != key)
        throw Error(Errc::IntegrityError, "stored object " + to_hex(key) + " does not match its key");
    return StoredObject{key, std::move(value), fs::last_write_time(path)};
}

std::optional<Bytes> BlobStore::get(const Digest& key) const {
    auto obj = get_object(key);
    if (!obj)
        return std::nullopt;
    return std::move(obj->value);
}

bool BlobStore::contains(const Digest& key) const {
    std::shared_lock lock(mu_);
    return fs::exists(path_for(key));
}

std::vector<Digest> BlobStore::keys() const {
    std::shared_lock lock(mu_);
    std::vector<Digest> out;
    for (const auto& e : fs::recursive_directory_iterator(root_)) {
        if (!e.is_regular_file() || e.path().filename().string().size() != 64)
            continue;
        try {
            out.push_back(digest_from_hex(e.path().filename().string()));
        } catch (const Error&) {
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t BlobStore::gc(const std::set<Digest>& retain) {
    auto all = keys();
    std::unique_lock lock(mu_);
    std::size_t removed = 0;
    for (const auto& k : all) {
        if (retain.contains(k))
            continue;
        if (fs::remove(path_for(k)))
            ++removed;
    }
    return removed;
}

} // namespace acrp::storage
