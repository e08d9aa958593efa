#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "acrp/bytes.hpp"
#include "acrp/rss.hpp"

namespace acrp::chunking {

enum class ChunkMode : std::uint8_t {
    GridCoarse = 0,
    GridFine = 1,
    ObjectBased = 2,
    TextWords = 3,
    LocationAtomic = 4,
};

enum class TextGranularity : std::uint8_t { Words = 0, Sentences = 1 };

struct Rect {
    std::uint32_t x = 0;
    std::uint32_t y = 0;
    std::uint32_t w = 0;
    std::uint32_t h = 0;

    bool operator==(const Rect&) const = default;

    std::uint64_t area() const { return std::uint64_t{w} * h; }
    bool contains(std::uint32_t px, std::uint32_t py) const {
        return px >= x && py >= y && px - x < w && py - y < h;
    }
    bool intersects(const Rect& o) const {
        return std::uint64_t{x} < std::uint64_t{o.x} + o.w && std::uint64_t{o.x} < std::uint64_t{x} + w &&
               std::uint64_t{y} < std::uint64_t{o.y} + o.h && std::uint64_t{o.y} < std::uint64_t{y} + h;
    }
};

struct ChunkingScheme {
    ChunkMode mode = ChunkMode::GridCoarse;
    std::uint16_t rows = 4;
    std::uint16_t cols = 4;
    std::vector<Rect> regions;

    bool operator==(const ChunkingScheme&) const = default;

    static ChunkingScheme coarse() { return {ChunkMode::GridCoarse, 4, 4, {}}; }
    static ChunkingScheme fine() { return {ChunkMode::GridFine, 16, 16, {}}; }
    static ChunkingScheme grid(std::uint16_t rows, std::uint16_t cols) {
        return {rows * cols > 16 ? ChunkMode::GridFine : ChunkMode::GridCoarse, rows, cols, {}};
    }
    static ChunkingScheme objects(std::vector<Rect> regions) {
        return {ChunkMode::ObjectBased, 0, 0, std::move(regions)};
    }

    bool is_grid() const { return mode == ChunkMode::GridCoarse || mode == ChunkMode::GridFine; }
};

/// Raw RGB8, row-major.
struct ImageDescriptor {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    Bytes data;

    bool operator==(const ImageDescriptor&) const = default;

    static ImageDescriptor blank(std::uint32_t width, std::uint32_t height);
    void validate() const;
};

// Picture chunk 0 is the scheme header: mode:u8 rows:u16 cols:u16 region_count:u16 then
// (x,y,w,h):u32 per region. Every other picture chunk is rect (x,y,w,h):u32 + raw pixels.
Bytes encode_scheme_header(const ChunkingScheme& scheme);
ChunkingScheme decode_scheme_header(ByteView header);

/// Chunk index of cell/region `i` (skips the header chunk).
constexpr std::uint32_t picture_chunk_index(std::uint32_t cell) { return cell + 1; }

rss::ChunkedMessage chunk_image_grid(const ImageDescriptor& img, std::uint16_t rows, std::uint16_t cols,
                                     const Digest& context = {});
rss::ChunkedMessage chunk_image_objects(const ImageDescriptor& img, const std::vector<Rect>& regions,
                                        const Digest& context = {});
rss::ChunkedMessage chunk_image(const ImageDescriptor& img, const ChunkingScheme& scheme,
                                const Digest& context = {});

/// Rectangles of chunks 1..n-1 in chunk order (grid cells row-major, or regions then background).
std::vector<Rect> chunk_rects(const ChunkingScheme& scheme, std::uint32_t width, std::uint32_t height);

/// Throws RegionOutOfBounds / OverlappingRegions / GridTooFine.
void validate_scheme(const ChunkingScheme& scheme, std::uint32_t width, std::uint32_t height);

struct DecodedPicture {
    ImageDescriptor image;
    ChunkingScheme scheme;
};

/// Inverse of chunk_image for an unredacted picture message.
DecodedPicture reassemble_image(const std::vector<Bytes>& chunks);

/// Present chunks composited at their rectangles, redacted rectangles black.
ImageDescriptor render_redacted_image(std::uint32_t width, std::uint32_t height, const ChunkingScheme& scheme,
                                      const rss::RedactedMessage& redacted);

/// Image size recovered from the surviving chunks: exact when an edge cell (or the object-mode
/// background) is present, otherwise the smallest size consistent with the geometry.
std::optional<std::pair<std::uint32_t, std::uint32_t>> infer_picture_size(const rss::RedactedMessage& redacted);

/// Chunk used for an empty description; 0xFF never occurs in UTF-8.
inline const Bytes kEmptyTextMarker{0xFF};

rss::ChunkedMessage chunk_text(std::string_view text, TextGranularity granularity, const Digest& context = {});
std::string join_text(const std::vector<Bytes>& chunks);

rss::ChunkedMessage chunk_location(std::int32_t lat_microdeg, std::int32_t lon_microdeg, const Digest& context = {});
std::pair<std::int32_t, std::int32_t> decode_location_chunk(ByteView chunk);

bool valid_utf8(std::string_view text);

} // namespace acrp::chunking
