#include "acrp/chunking.hpp"

#include <algorithm>

namespace acrp::chunking {
namespace {

constexpr std::size_t kPixelSize = 3;

Rect read_rect(ByteReader& r) {
    Rect rect;
    rect.x = r.u32();
    rect.y = r.u32();
    rect.w = r.u32();
    rect.h = r.u32();
    return rect;
}

void write_rect(ByteWriter& w, const Rect& rect) { w.u32(rect.x).u32(rect.y).u32(rect.w).u32(rect.h); }

Bytes cell_chunk(const ImageDescriptor& img, const Rect& rect, const std::vector<Rect>& zeroed = {}) {
    ByteWriter w;
    write_rect(w, rect);
    Bytes pixels(rect.area() * kPixelSize);
    std::size_t row_bytes = std::size_t{rect.w} * kPixelSize;
    for (std::uint32_t row = 0; row < rect.h; ++row) {
        std::size_t src = ((std::size_t{rect.y} + row) * img.width + rect.x) * kPixelSize;
        std::copy_n(img.data.begin() + static_cast<std::ptrdiff_t>(src), row_bytes,
                    pixels.begin() + static_cast<std::ptrdiff_t>(row * row_bytes));
    }
    for (const auto& z : zeroed) {
        for (std::uint32_t row = 0; row < z.h; ++row) {
            std::size_t dst = ((std::size_t{z.y} - rect.y + row) * rect.w + (z.x - rect.x)) * kPixelSize;
            std::fill_n(pixels.begin() + static_cast<std::ptrdiff_t>(dst), std::size_t{z.w} * kPixelSize, 0);
        }
    }
    w.raw(pixels);
    return std::move(w).take();
}

// Paste a cell chunk's pixels into `img`, leaving pixels inside `skip` untouched.
// Returns the chunk's rectangle.
Rect paste_chunk(ImageDescriptor& img, ByteView chunk, const std::vector<Rect>& skip = {}) {
    ByteReader r(chunk);
    Rect rect = read_rect(r);
    if (std::uint64_t{rect.x} + rect.w > img.width || std::uint64_t{rect.y} + rect.h > img.height)
        throw Error(Errc::SchemeMismatch, "chunk rectangle outside image");
    auto pixels = r.raw(rect.area() * kPixelSize);
    r.expect_end();
    for (std::uint32_t row = 0; row < rect.h; ++row) {
        for (std::uint32_t col = 0; col < rect.w; ++col) {
            std::uint32_t px = rect.x + col;
            std::uint32_t py = rect.y + row;
            if (std::any_of(skip.begin(), skip.end(), [&](const Rect& k) { return k.contains(px, py); }))
                continue;
            std::size_t src = (std::size_t{row} * rect.w + col) * kPixelSize;
            std::size_t dst = (std::size_t{py} * img.width + px) * kPixelSize;
            std::copy_n(pixels.begin() + static_cast<std::ptrdiff_t>(src), kPixelSize,
                        img.data.begin() + static_cast<std::ptrdiff_t>(dst));
        }
    }
    return rect;
}

Rect chunk_rect(ByteView chunk) {
    ByteReader r(chunk);
    return read_rect(r);
}

std::vector<Rect> grid_cells(std::uint16_t rows, std::uint16_t cols, std::uint32_t width, std::uint32_t height) {
    if (rows == 0 || cols == 0 || rows > height || cols > width)
        throw Error(Errc::GridTooFine, std::to_string(rows) + "x" + std::to_string(cols) + " grid on " +
                                           std::to_string(width) + "x" + std::to_string(height) + " image");
    std::uint32_t cw = width / cols;
    std::uint32_t ch = height / rows;
    std::vector<Rect> cells;
    cells.reserve(std::size_t{rows} * cols);
    for (std::uint32_t r = 0; r < rows; ++r) {
        for (std::uint32_t c = 0; c < cols; ++c) {
            Rect cell{c * cw, r * ch, c + 1 == cols ? width - c * cw : cw, r + 1 == rows ? height - r * ch : ch};
            cells.push_back(cell);
        }
    }
    return cells;
}

// Length of the UTF-8 sequence at s[i] (0 if invalid); decoded code point in `cp`.
std::size_t utf8_seq_len(std::string_view s, std::size_t i, std::uint32_t& cp) {
    auto b = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    unsigned char c = b(i);
    std::size_t len = 0;
    std::uint32_t min = 0;
    if (c < 0x80) {
        cp = c;
        return 1;
    } else if ((c & 0xE0) == 0xC0) {
        len = 2;
        cp = c & 0x1F;
        min = 0x80;
    } else if ((c & 0xF0) == 0xE0) {
        len = 3;
        cp = c & 0x0F;
        min = 0x800;
    } else if ((c & 0xF8) == 0xF0) {
        len = 4;
        cp = c & 0x07;
        min = 0x10000;
    } else {
        return 0;
    }
    if (i + len > s.size())
        return 0;
    for (std::size_t k = 1; k < len; ++k) {
        if ((b(i + k) & 0xC0) != 0x80)
            return 0;
        cp = (cp << 6) | (b(i + k) & 0x3F);
    }
    if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
        return 0;
    return len;
}

bool is_unicode_space(std::uint32_t cp) {
    return (cp >= 0x09 && cp <= 0x0D) || cp == 0x20 || cp == 0x85 || cp == 0xA0 || cp == 0x1680 ||
           (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F ||
           cp == 0x3000;
}

bool is_terminator(std::uint32_t cp) { return cp == '.' || cp == '!' || cp == '?'; }

} // namespace

ImageDescriptor ImageDescriptor::blank(std::uint32_t width, std::uint32_t height) {
    return {width, height, Bytes(std::size_t{width} * height * kPixelSize, 0)};
}

void ImageDescriptor::validate() const {
    if (width == 0 || height == 0 || data.size() != std::size_t{width} * height * kPixelSize)
        throw Error(Errc::InvalidImage, "data length must equal width*height*3");
}

Bytes encode_scheme_header(const ChunkingScheme& scheme) {
    if (scheme.regions.size() > UINT16_MAX)
        throw Error(Errc::TooManyChunks, "too many regions");
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(scheme.mode)).u16(scheme.rows).u16(scheme.cols);
    w.u16(static_cast<std::uint16_t>(scheme.regions.size()));
    for (const auto& r : scheme.regions)
        write_rect(w, r);
    return std::move(w).take();
}

ChunkingScheme decode_scheme_header(ByteView header) {
    ByteReader r(header);
    ChunkingScheme s;
    auto mode = r.u8();
    if (mode > static_cast<std::uint8_t>(ChunkMode::ObjectBased))
        throw Error(Errc::SchemeMismatch, "header mode is not a picture mode");
    s.mode = static_cast<ChunkMode>(mode);
    s.rows = r.u16();
    s.cols = r.u16();
    auto count = r.u16();
    for (std::uint16_t i = 0; i < count; ++i)
        s.regions.push_back(read_rect(r));
    r.expect_end();
    return s;
}

void validate_scheme(const ChunkingScheme& scheme, std::uint32_t width, std::uint32_t height) {
    if (scheme.is_grid()) {
        grid_cells(scheme.rows, scheme.cols, width, height);
        if (!scheme.regions.empty())
            throw Error(Errc::SchemeMismatch, "grid schemes carry no regions");
        if (std::size_t{scheme.rows} * scheme.cols + 1 > rss::kMaxChunks)
            throw Error(Errc::TooManyChunks, "grid has too many cells");
        return;
    }
    if (scheme.mode != ChunkMode::ObjectBased)
        throw Error(Errc::SchemeMismatch, "not a picture chunking mode");
    if (scheme.regions.size() + 2 > rss::kMaxChunks)
        throw Error(Errc::TooManyChunks, "too many regions");
    for (std::size_t i = 0; i < scheme.regions.size(); ++i) {
        const auto& r = scheme.regions[i];
        if (r.w == 0 || r.h == 0 || std::uint64_t{r.x} + r.w > width || std::uint64_t{r.y} + r.h > height)
            throw Error(Errc::RegionOutOfBounds, "region " + std::to_string(i));
        for (std::size_t j = 0; j < i; ++j)
            if (r.intersects(scheme.regions[j]))
                throw Error(Errc::OverlappingRegions,
                            "regions " + std::to_string(j) + " and " + std::to_string(i));
    }
}

std::vector<Rect> chunk_rects(const ChunkingScheme& scheme, std::uint32_t width, std::uint32_t height) {
    validate_scheme(scheme, width, height);
    if (scheme.is_grid())
        return grid_cells(scheme.rows, scheme.cols, width, height);
    auto rects = scheme.regions;
    rects.push_back({0, 0, width, height});
    return rects;
}

rss::ChunkedMessage chunk_image(const ImageDescriptor& img, const ChunkingScheme& scheme, const Digest& context) {
    img.validate();
    auto rects = chunk_rects(scheme, img.width, img.height);
    rss::ChunkedMessage msg{rss::FieldTag::Picture, {}, context};
    msg.chunks.reserve(rects.size() + 1);
    msg.chunks.push_back(encode_scheme_header(scheme));
    if (scheme.is_grid()) {
        for (const auto& r : rects)
            msg.chunks.push_back(cell_chunk(img, r));
    } else {
        for (const auto& r : scheme.regions)
            msg.chunks.push_back(cell_chunk(img, r));
        msg.chunks.push_back(cell_chunk(img, rects.back(), scheme.regions));
    }
    return msg;
}

rss::ChunkedMessage chunk_image_grid(const ImageDescriptor& img, std::uint16_t rows, std::uint16_t cols,
                                     const Digest& context) {
    return chunk_image(img, ChunkingScheme::grid(rows, cols), context);
}

rss::ChunkedMessage chunk_image_objects(const ImageDescriptor& img, const std::vector<Rect>& regions,
                                        const Digest& context) {
    return chunk_image(img, ChunkingScheme::objects(regions), context);
}

DecodedPicture reassemble_image(const std::vector<Bytes>& chunks) {
    if (chunks.size() < 2)
        throw Error(Errc::SchemeMismatch, "picture needs a header and at least one cell");
    auto scheme = decode_scheme_header(chunks.front());
    // The last chunk is the bottom-right cell or the full-image background.
    Rect last = chunk_rect(chunks.back());
    auto width = static_cast<std::uint32_t>(std::uint64_t{last.x} + last.w);
    auto height = static_cast<std::uint32_t>(std::uint64_t{last.y} + last.h);
    if (width == 0 || height == 0 || std::uint64_t{width} * height > (1ull << 28))
        throw Error(Errc::InvalidImage, "implausible picture dimensions");
    auto rects = chunk_rects(scheme, width, height);
    if (rects.size() + 1 != chunks.size())
        throw Error(Errc::SchemeMismatch, "chunk count does not match scheme");
    auto img = ImageDescriptor::blank(width, height);
    for (std::size_t i = 0; i < rects.size(); ++i) {
        bool background = !scheme.is_grid() && i + 1 == rects.size();
        if (paste_chunk(img, chunks[i + 1], background ? scheme.regions : std::vector<Rect>{}) != rects[i])
            throw Error(Errc::SchemeMismatch, "chunk " + std::to_string(i + 1) + " rectangle");
    }
    return {std::move(img), std::move(scheme)};
}

std::optional<std::pair<std::uint32_t, std::uint32_t>> infer_picture_size(const rss::RedactedMessage& redacted) {
    if (redacted.slots.empty() || !std::holds_alternative<rss::Present>(redacted.slots.front()))
        return std::nullopt;
    auto scheme = decode_scheme_header(std::get<rss::Present>(redacted.slots.front()).chunk);
    auto present = [&](std::size_t cell) -> const Bytes* {
        if (cell + 1 >= redacted.slots.size())
            return nullptr;
        const auto* p = std::get_if<rss::Present>(&redacted.slots[cell + 1]);
        return p ? &p->chunk : nullptr;
    };
    if (!scheme.is_grid()) {
        if (const Bytes* bg = present(scheme.regions.size())) {
            Rect r = chunk_rect(*bg);
            return std::pair{r.x + r.w, r.y + r.h};
        }
        if (scheme.regions.empty())
            return std::nullopt;
        std::uint32_t w = 0, h = 0;
        for (const auto& r : scheme.regions) {
            w = std::max(w, r.x + r.w);
            h = std::max(h, r.y + r.h);
        }
        return std::pair{w, h};
    }
    const std::uint32_t rows = scheme.rows, cols = scheme.cols;
    std::optional<std::uint32_t> width, height, cw, ch;
    for (std::uint32_t i = 0; i < rows * cols; ++i) {
        const Bytes* chunk = present(i);
        if (!chunk)
            continue;
        Rect r = chunk_rect(*chunk);
        std::uint32_t row = i / cols, col = i % cols;
        if (col + 1 == cols)
            width = r.x + r.w;
        else
            cw = r.w;
        if (row + 1 == rows)
            height = r.y + r.h;
        else
            ch = r.h;
        if (col + 1 == cols && col > 0)
            cw = r.x / col;
        if (row + 1 == rows && row > 0)
            ch = r.y / row;
    }
    if (!width && cw)
        width = *cw * cols;
    if (!height && ch)
        height = *ch * rows;
    if (!width || !height)
        return std::nullopt;
    return std::pair{*width, *height};
}

ImageDescriptor render_redacted_image(std::uint32_t width, std::uint32_t height, const ChunkingScheme& scheme,
                                      const rss::RedactedMessage& redacted) {
    if (redacted.field_tag != rss::FieldTag::Picture)
        throw Error(Errc::SchemeMismatch, "not a picture message");
    if (redacted.slots.empty() || !std::holds_alternative<rss::Present>(redacted.slots.front()))
        throw Error(Errc::SchemeMismatch, "scheme header chunk missing");
    if (decode_scheme_header(std::get<rss::Present>(redacted.slots.front()).chunk) != scheme)
        throw Error(Errc::SchemeMismatch, "header differs from expected scheme");
    auto rects = chunk_rects(scheme, width, height);
    if (rects.size() + 1 != redacted.slots.size())
        throw Error(Errc::SchemeMismatch, "slot count does not match scheme");
    auto img = ImageDescriptor::blank(width, height);
    for (std::size_t i = 0; i < rects.size(); ++i) {
        const auto* p = std::get_if<rss::Present>(&redacted.slots[i + 1]);
        if (!p)
            continue;
        bool background = !scheme.is_grid() && i + 1 == rects.size();
        if (paste_chunk(img, p->chunk, background ? scheme.regions : std::vector<Rect>{}) != rects[i])
            throw Error(Errc::SchemeMismatch, "chunk " + std::to_string(i + 1) + " rectangle");
    }
    return img;
}

bool valid_utf8(std::string_view text) {
    std::uint32_t cp = 0;
    for (std::size_t i = 0; i < text.size();) {
        auto len = utf8_seq_len(text, i, cp);
        if (len == 0)
            return false;
        i += len;
    }
    return true;
}

rss::ChunkedMessage chunk_text(std::string_view text, TextGranularity granularity, const Digest& context) {
    if (!valid_utf8(text))
        throw Error(Errc::Malformed, "description is not valid UTF-8");
    rss::ChunkedMessage msg{rss::FieldTag::Description, {}, context};
    if (text.empty()) {
        msg.chunks.push_back(kEmptyTextMarker);
        return msg;
    }
    // A chunk is a body plus its trailing whitespace. Word bodies end at the first
    // space; sentence bodies end at a run of terminators.
    std::size_t start = 0;
    bool in_tail = false;
    std::uint32_t cp = 0;
    for (std::size_t i = 0; i < text.size();) {
        auto len = utf8_seq_len(text, i, cp);
        bool space = is_unicode_space(cp);
        bool stays_in_tail = granularity == TextGranularity::Words ? space : (space || is_terminator(cp));
        if (in_tail && !stays_in_tail) {
            msg.chunks.push_back(to_bytes(text.substr(start, i - start)));
            start = i;
            in_tail = false;
        }
        if (granularity == TextGranularity::Words ? space : is_terminator(cp))
            in_tail = true;
        i += len;
    }
    msg.chunks.push_back(to_bytes(text.substr(start)));
    return msg;
}

std::string join_text(const std::vector<Bytes>& chunks) {
    if (chunks.size() == 1 && chunks.front() == kEmptyTextMarker)
        return {};
    std::string out;
    for (const auto& c : chunks)
        out += to_string(c);
    return out;
}

rss::ChunkedMessage chunk_location(std::int32_t lat_microdeg, std::int32_t lon_microdeg, const Digest& context) {
    ByteWriter w;
    w.i32(lat_microdeg).i32(lon_microdeg);
    return {rss::FieldTag::Location, {std::move(w).take()}, context};
}

std::pair<std::int32_t, std::int32_t> decode_location_chunk(ByteView chunk) {
    ByteReader r(chunk);
    auto lat = r.i32();
    auto lon = r.i32();
    r.expect_end();
    return {lat, lon};
}

} // namespace acrp::chunking
