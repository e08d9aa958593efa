#include <benchmark/benchmark.h>

#include "acrp/chunking.hpp"
#include "acrp/rss.hpp"

using namespace acrp;

namespace {

chunking::ImageDescriptor photo(std::uint32_t w, std::uint32_t h) {
    auto img = chunking::ImageDescriptor::blank(w, h);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        img.data[i] = static_cast<std::uint8_t>(i * 31);
    return img;
}

// Grid chunking plus signing of a 1280x720 photo; the argument is the grid side.
void BM_ChunkAndSign(benchmark::State& state) {
    auto img = photo(1280, 720);
    auto side = static_cast<std::uint16_t>(state.range(0));
    auto key = keygen(as_bytes("bench")).signing_key;
    for (auto _ : state) {
        auto m = chunking::chunk_image_grid(img, side, side);
        benchmark::DoNotOptimize(rss::sign_redactable(key, m));
    }
    state.counters["chunks"] = side * side + 1;
}
BENCHMARK(BM_ChunkAndSign)->Arg(4)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

// Redacting one cell and rendering the public picture.
void BM_RedactAndRender(benchmark::State& state) {
    auto img = photo(1280, 720);
    auto side = static_cast<std::uint16_t>(state.range(0));
    auto key = keygen(as_bytes("bench")).signing_key;
    auto m = chunking::chunk_image_grid(img, side, side);
    auto sig = rss::sign_redactable(key, m);
    auto scheme = chunking::ChunkingScheme::grid(side, side);
    for (auto _ : state) {
        auto red = rss::redact(m, sig, {chunking::picture_chunk_index(0)});
        benchmark::DoNotOptimize(chunking::render_redacted_image(1280, 720, scheme, red));
    }
}
BENCHMARK(BM_RedactAndRender)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_TextChunking(benchmark::State& state) {
    std::string text;
    for (int i = 0; i < state.range(0); ++i)
        text += "word" + std::to_string(i) + (i % 9 == 8 ? ". " : " ");
    for (auto _ : state)
        benchmark::DoNotOptimize(chunking::chunk_text(text, chunking::TextGranularity::Words));
}
BENCHMARK(BM_TextChunking)->Arg(64)->Arg(1024);

} // namespace
