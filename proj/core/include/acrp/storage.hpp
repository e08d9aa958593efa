#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <set>
#include <shared_mutex>
#include <vector>

#include "acrp/bytes.hpp"

namespace acrp::storage {

inline constexpr std::size_t kMaxObjectSize = 32u << 20;

struct StoredObject {
    Digest key{};
    Bytes value;
    std::filesystem::file_time_type created_at;
};

/// Content-addressed blob store on a local directory, fanned out as aa/bb/<hex key>.
/// Writes go to a temp file and are renamed into place; reads re-hash the content.
class BlobStore {
public:
    explicit BlobStore(std::filesystem::path root);

    /// Idempotent. Throws TooLarge above 32 MiB.
    Digest put(ByteView value);
    /// nullopt when absent; throws IntegrityError when the stored bytes no longer hash to `key`.
    std::optional<Bytes> get(const Digest& key) const;
    std::optional<StoredObject> get_object(const Digest& key) const;
    bool contains(const Digest& key) const;
    std::vector<Digest> keys() const;

    /// Removes every object not in `retain`; blocks concurrent puts and gets.
    std::size_t gc(const std::set<Digest>& retain);

    std::filesystem::path path_for(const Digest& key) const;
    const std::filesystem::path& root() const { return root_; }

private:
    std::filesystem::path root_;
    mutable std::shared_mutex mu_;
};

} // namespace acrp::storage
