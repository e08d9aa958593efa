#include <benchmark/benchmark.h>

#include "acrp/rss.hpp"

using namespace acrp;

namespace {

rss::ChunkedMessage message(std::size_t n, std::size_t chunk_size) {
    rss::ChunkedMessage m;
    m.field_tag = rss::FieldTag::Picture;
    for (std::size_t i = 0; i < n; ++i)
        m.chunks.push_back(Bytes(chunk_size, static_cast<std::uint8_t>(i)));
    return m;
}

const SigningKey& key() {
    static auto k = keygen(as_bytes("bench")).signing_key;
    return k;
}

void BM_Sign(benchmark::State& state) {
    auto m = message(static_cast<std::size_t>(state.range(0)), 1024);
    for (auto _ : state)
        benchmark::DoNotOptimize(rss::sign_redactable(key(), m));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sign)->RangeMultiplier(4)->Range(4, 1024);

void BM_Verify(benchmark::State& state) {
    auto m = message(static_cast<std::size_t>(state.range(0)), 1024);
    auto sig = rss::sign_redactable(key(), m);
    for (auto _ : state)
        benchmark::DoNotOptimize(rss::verify_full(key().public_key(), m, sig));
}
BENCHMARK(BM_Verify)->RangeMultiplier(4)->Range(4, 1024);

void BM_RedactHalf(benchmark::State& state) {
    auto n = static_cast<std::size_t>(state.range(0));
    auto m = message(n, 1024);
    auto sig = rss::sign_redactable(key(), m);
    std::set<std::uint32_t> drop;
    for (std::uint32_t i = 0; i < n; i += 2)
        drop.insert(i);
    for (auto _ : state)
        benchmark::DoNotOptimize(rss::redact(m, sig, drop));
}
BENCHMARK(BM_RedactHalf)->RangeMultiplier(4)->Range(4, 1024);

void BM_VerifyRedacted(benchmark::State& state) {
    auto n = static_cast<std::size_t>(state.range(0));
    auto m = message(n, 1024);
    auto sig = rss::sign_redactable(key(), m);
    auto red = rss::redact(m, sig, {0, static_cast<std::uint32_t>(n / 2)});
    for (auto _ : state)
        benchmark::DoNotOptimize(rss::verify_redacted(red));
}
BENCHMARK(BM_VerifyRedacted)->RangeMultiplier(4)->Range(4, 1024);

} // namespace
