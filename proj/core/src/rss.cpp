#include "acrp/rss.hpp"

#include <algorithm>
#include <functional>

namespace acrp::rss {
namespace {

constexpr std::uint8_t kContentLeaf = 0x00;
constexpr std::uint8_t kPaddingLeaf = 0x01;
constexpr std::uint8_t kInnerNode = 0x02;

// Fixed cost of every redacted message: tag, n, cover count, root signature, signer key.
constexpr std::size_t kFixedOverhead = 1 + 4 + 4 + 64 + 32;
constexpr std::size_t kCoverEntrySize = 4 + kSeedSize;
constexpr std::size_t kRedactedSlotSize = 1 + 32;

Seed child_seed(const Seed& parent, std::uint8_t child_index) {
    auto d = Hasher().add(parent).add_u8(child_index).add("seed").finish();
    Seed out{};
    std::copy_n(d.begin(), kSeedSize, out.begin());
    return out;
}

Digest leaf_nonce(const Seed& leaf_seed) { return Hasher().add(leaf_seed).add("nonce").finish(); }

Digest content_leaf(const Digest& nonce, std::uint32_t index, ByteView chunk) {
    return Hasher()
        .add_u8(kContentLeaf)
        .add(nonce)
        .add_u32(index)
        .add_u32(static_cast<std::uint32_t>(chunk.size()))
        .add(chunk)
        .finish();
}

Digest padding_leaf(std::uint32_t index) { return Hasher().add_u8(kPaddingLeaf).add_u32(index).finish(); }

Digest inner_node(const Digest& left, const Digest& right) {
    return Hasher().add_u8(kInnerNode).add(left).add(right).finish();
}

int level_of(std::uint32_t position) {
    int level = 0;
    while (position > 1) {
        position >>= 1;
        ++level;
    }
    return level;
}

struct LeafRange {
    std::uint32_t lo;
    std::uint32_t hi;
};

// Leaf interval [lo, hi) under `position` in a tree of the given depth.
LeafRange leaf_range(std::uint32_t position, int depth) {
    int shift = depth - level_of(position);
    std::uint32_t first = position << shift;
    std::uint32_t leaves = 1u << depth;
    return {first - leaves, first - leaves + (1u << shift)};
}

bool is_ancestor_or_self(std::uint32_t ancestor, std::uint32_t node) {
    while (node > ancestor)
        node >>= 1;
    return node == ancestor;
}

// Seed of `node`, derived downward from `ancestor` whose seed is known.
Seed derive_down(std::uint32_t ancestor, const Seed& seed, std::uint32_t node) {
    int steps = level_of(node) - level_of(ancestor);
    Seed s = seed;
    for (int i = steps - 1; i >= 0; --i)
        s = child_seed(s, static_cast<std::uint8_t>((node >> i) & 1u));
    return s;
}

using SeedLookup = std::function<std::optional<Seed>(std::uint32_t)>;

// Maximal subtrees whose real leaves are all present, in left-to-right order. Falls back
// to smaller subtrees when a seed is unavailable for the larger one.
void build_cover(std::uint32_t position, int depth, std::uint32_t n, const std::vector<bool>& present,
                 const SeedLookup& lookup, std::vector<CoverEntry>& out) {
    auto [lo, hi] = leaf_range(position, depth);
    std::uint32_t real_hi = std::min(hi, n);
    if (lo >= real_hi)
        return;
    bool all = true;
    bool any = false;
    for (std::uint32_t i = lo; i < real_hi; ++i) {
        all = all && present[i];
        any = any || present[i];
    }
    if (!any)
        return;
    if (all) {
        if (auto seed = lookup(position)) {
            out.push_back({position, *seed});
            return;
        }
        if (hi - lo == 1)
            throw Error(Errc::NonceUnavailable, "no seed for leaf " + std::to_string(lo));
    }
    build_cover(2 * position, depth, n, present, lookup, out);
    build_cover(2 * position + 1, depth, n, present, lookup, out);
}

Digest fold_tree(std::vector<Digest> level) {
    while (level.size() > 1) {
        std::vector<Digest> next(level.size() / 2);
        for (std::size_t i = 0; i < next.size(); ++i)
            next[i] = inner_node(level[2 * i], level[2 * i + 1]);
        level = std::move(next);
    }
    return level.front();
}

std::vector<Digest> all_nonces(const Seed& root_seed, int depth, std::uint32_t n) {
    std::vector<Seed> level{root_seed};
    for (int d = 0; d < depth; ++d) {
        std::vector<Seed> next;
        next.reserve(level.size() * 2);
        for (const auto& s : level) {
            next.push_back(child_seed(s, 0));
            next.push_back(child_seed(s, 1));
        }
        level = std::move(next);
    }
    std::vector<Digest> nonces(n);
    for (std::uint32_t i = 0; i < n; ++i)
        nonces[i] = leaf_nonce(level[i]);
    return nonces;
}

// Expand a cover entry into the seeds of its real leaves.
void expand_entry(const CoverEntry& e, int depth, std::uint32_t n, std::vector<std::optional<Digest>>& nonces) {
    auto [lo, hi] = leaf_range(e.position, depth);
    std::vector<Seed> level{e.seed};
    for (int d = level_of(e.position); d < depth; ++d) {
        std::vector<Seed> next;
        next.reserve(level.size() * 2);
        for (const auto& s : level) {
            next.push_back(child_seed(s, 0));
            next.push_back(child_seed(s, 1));
        }
        level = std::move(next);
    }
    for (std::uint32_t i = lo; i < std::min(hi, n); ++i)
        nonces[i] = leaf_nonce(level[i - lo]);
}

bool well_formed(const ChunkedMessage& msg) {
    if (msg.chunks.empty() || msg.chunks.size() > kMaxChunks)
        return false;
    return std::all_of(msg.chunks.begin(), msg.chunks.end(),
                       [](const Bytes& c) { return !c.empty() && c.size() <= kMaxChunkSize; });
}

bool valid_tag(std::uint8_t tag) { return tag <= static_cast<std::uint8_t>(FieldTag::Description); }

RedactedMessage redact_impl(const RedactedMessage& in, const std::set<std::uint32_t>& to_redact,
                            const SeedLookup& lookup) {
    int depth = tree_depth(in.n);
    RedactedMessage out = in;
    std::vector<bool> present(in.n);
    for (std::uint32_t i = 0; i < in.n; ++i)
        present[i] = std::holds_alternative<Present>(in.slots[i]);

    for (auto idx : to_redact) {
        if (idx >= in.n)
            throw Error(Errc::IndexOutOfRange, "chunk index " + std::to_string(idx));
        if (!present[idx])
            throw Error(Errc::AlreadyRedacted, "chunk index " + std::to_string(idx));
        std::uint32_t leaf = (1u << depth) + idx;
        auto seed = lookup(leaf);
        if (!seed)
            throw Error(Errc::NonceUnavailable, "chunk index " + std::to_string(idx));
        const auto& chunk = std::get<Present>(in.slots[idx]).chunk;
        out.slots[idx] = Redacted{content_leaf(leaf_nonce(*seed), idx, chunk)};
        present[idx] = false;
    }
    out.seed_cover.clear();
    build_cover(1, depth, in.n, present, lookup, out.seed_cover);
    return out;
}

} // namespace

std::string_view to_string(FieldTag tag) {
    switch (tag) {
    case FieldTag::Location: return "Location";
    case FieldTag::Picture: return "Picture";
    case FieldTag::Description: return "Description";
    }
    return "Invalid";
}

std::set<std::uint32_t> RedactedMessage::redacted_indices() const {
    std::set<std::uint32_t> out;
    for (std::uint32_t i = 0; i < slots.size(); ++i)
        if (std::holds_alternative<Redacted>(slots[i]))
            out.insert(i);
    return out;
}

std::uint8_t tree_depth(std::size_t n) {
    std::uint8_t d = 1;
    while ((std::size_t{1} << d) < n)
        ++d;
    return d;
}

void validate(const ChunkedMessage& msg) {
    if (msg.chunks.empty())
        throw Error(Errc::EmptyMessage, "message has no chunks");
    if (msg.chunks.size() > kMaxChunks)
        throw Error(Errc::TooManyChunks, std::to_string(msg.chunks.size()) + " chunks");
    for (std::size_t i = 0; i < msg.chunks.size(); ++i) {
        if (msg.chunks[i].empty())
            throw Error(Errc::EmptyMessage, "chunk " + std::to_string(i) + " is empty");
        if (msg.chunks[i].size() > kMaxChunkSize)
            throw Error(Errc::ChunkTooLarge, "chunk " + std::to_string(i));
    }
}

Digest signed_binding(const Digest& root, std::uint32_t n, FieldTag tag, const Digest& context) {
    return Hasher().add(root).add_u32(n).add_u8(static_cast<std::uint8_t>(tag)).add(context).finish();
}

std::vector<Digest> leaf_commitments(const ChunkedMessage& msg, const RedactableSignature& sig) {
    auto n = static_cast<std::uint32_t>(msg.chunks.size());
    auto nonces = all_nonces(sig.root_seed, tree_depth(n), n);
    std::vector<Digest> out(n);
    for (std::uint32_t i = 0; i < n; ++i)
        out[i] = content_leaf(nonces[i], i, msg.chunks[i]);
    return out;
}

Digest merkle_root(const ChunkedMessage& msg, const RedactableSignature& sig) {
    auto leaves = leaf_commitments(msg, sig);
    auto width = std::uint32_t{1} << tree_depth(leaves.size());
    for (auto i = static_cast<std::uint32_t>(leaves.size()); i < width; ++i)
        leaves.push_back(padding_leaf(i));
    return fold_tree(std::move(leaves));
}

RedactableSignature sign_redactable(const SigningKey& sk, const ChunkedMessage& msg,
                                    std::optional<Seed> root_seed) {
    validate(msg);
    RedactableSignature sig;
    sig.n = static_cast<std::uint32_t>(msg.chunks.size());
    sig.depth = tree_depth(sig.n);
    if (root_seed) {
        sig.root_seed = *root_seed;
    } else {
        auto r = random_bytes(kSeedSize);
        std::copy(r.begin(), r.end(), sig.root_seed.begin());
    }
    sig.signer_pk = sk.public_key();
    sig.root_signature = sk.sign(signed_binding(merkle_root(msg, sig), sig.n, msg.field_tag, msg.context));
    return sig;
}

bool verify_full(const PublicKey& pk, const ChunkedMessage& msg, const RedactableSignature& sig) {
    if (!well_formed(msg) || sig.n != msg.chunks.size() || sig.depth != tree_depth(sig.n) ||
        sig.signer_pk != pk)
        return false;
    auto binding = signed_binding(merkle_root(msg, sig), sig.n, msg.field_tag, msg.context);
    return verify_signature(pk, binding, sig.root_signature);
}

RedactedMessage redact(const ChunkedMessage& msg, const RedactableSignature& sig,
                       const std::set<std::uint32_t>& to_redact) {
    validate(msg);
    if (sig.n != msg.chunks.size())
        throw Error(Errc::Malformed, "signature does not match message length");
    RedactedMessage full;
    full.field_tag = msg.field_tag;
    full.n = sig.n;
    full.root_signature = sig.root_signature;
    full.signer_pk = sig.signer_pk;
    full.context = msg.context;
    for (const auto& c : msg.chunks)
        full.slots.emplace_back(Present{c});
    SeedLookup from_root = [&](std::uint32_t pos) -> std::optional<Seed> {
        return derive_down(1, sig.root_seed, pos);
    };
    return redact_impl(full, to_redact, from_root);
}

RedactedMessage redact(const RedactedMessage& msg, const std::set<std::uint32_t>& to_redact) {
    if (msg.slots.size() != msg.n || msg.n == 0 || msg.n > kMaxChunks)
        throw Error(Errc::Malformed, "slot count does not match n");
    SeedLookup from_cover = [&](std::uint32_t pos) -> std::optional<Seed> {
        for (const auto& e : msg.seed_cover)
            if (is_ancestor_or_self(e.position, pos))
                return derive_down(e.position, e.seed, pos);
        return std::nullopt;
    };
    return redact_impl(msg, to_redact, from_cover);
}

std::optional<Digest> recompute_root(const RedactedMessage& msg) {
    if (msg.n == 0 || msg.n > kMaxChunks || msg.slots.size() != msg.n || !valid_tag(static_cast<std::uint8_t>(msg.field_tag)))
        return std::nullopt;
    int depth = tree_depth(msg.n);
    std::uint32_t width = 1u << depth;

    std::vector<std::optional<Digest>> nonces(msg.n);
    std::vector<bool> covered(msg.n, false);
    for (const auto& e : msg.seed_cover) {
        if (e.position == 0 || e.position >= 2 * width)
            return std::nullopt;
        auto [lo, hi] = leaf_range(e.position, depth);
        if (lo >= msg.n)
            return std::nullopt;
        for (std::uint32_t i = lo; i < std::min(hi, msg.n); ++i) {
            if (covered[i])
                return std::nullopt;
            covered[i] = true;
        }
        expand_entry(e, depth, msg.n, nonces);
    }

    std::vector<Digest> leaves(width);
    for (std::uint32_t i = 0; i < msg.n; ++i) {
        if (const auto* p = std::get_if<Present>(&msg.slots[i])) {
            if (!covered[i] || p->chunk.empty() || p->chunk.size() > kMaxChunkSize)
                return std::nullopt;
            leaves[i] = content_leaf(*nonces[i], i, p->chunk);
        } else {
            if (covered[i])
                return std::nullopt;
            leaves[i] = std::get<Redacted>(msg.slots[i]).commitment;
        }
    }
    for (std::uint32_t i = msg.n; i < width; ++i)
        leaves[i] = padding_leaf(i);
    return fold_tree(std::move(leaves));
}

bool verify_redacted(const RedactedMessage& msg) {
    auto root = recompute_root(msg);
    if (!root)
        return false;
    return verify_signature(msg.signer_pk, signed_binding(*root, msg.n, msg.field_tag, msg.context),
                            msg.root_signature);
}

std::size_t overhead_bytes(const RedactedMessage& msg) {
    std::size_t redacted = 0;
    for (const auto& s : msg.slots)
        redacted += std::holds_alternative<Redacted>(s) ? 1 : 0;
    return kFixedOverhead + kCoverEntrySize * msg.seed_cover.size() + kRedactedSlotSize * redacted;
}

std::size_t max_cover_entries(std::size_t n, std::size_t k) {
    if (n == 0 || n > kMaxChunks || k > n)
        throw Error(Errc::IndexOutOfRange, "need 0 <= k <= n <= 4096");
    int depth = tree_depth(n);
    // best[j]: largest canonical cover inside a subtree when j of its real leaves are redacted.
    std::function<std::vector<std::size_t>(std::uint32_t)> solve = [&](std::uint32_t position) {
        auto [lo, hi] = leaf_range(position, depth);
        std::size_t real = lo < n ? std::min<std::size_t>(hi, n) - lo : 0;
        if (real == 0)
            return std::vector<std::size_t>{0};
        if (hi - lo == 1)
            return std::vector<std::size_t>{1, 0};
        auto left = solve(2 * position);
        auto right = solve(2 * position + 1);
        std::vector<std::size_t> best(real + 1, 0);
        for (std::size_t a = 0; a < left.size(); ++a)
            for (std::size_t b = 0; b < right.size(); ++b)
                best[a + b] = std::max(best[a + b], left[a] + right[b]);
        best[0] = 1;
        return best;
    };
    return solve(1)[k];
}

std::size_t signature_overhead(std::size_t n, std::size_t k) {
    return kFixedOverhead + kCoverEntrySize * max_cover_entries(n, k) + kRedactedSlotSize * k;
}

void encode_to(ByteWriter& w, const RedactedMessage& msg) {
    w.u8(static_cast<std::uint8_t>(msg.field_tag)).u32(msg.n);
    for (const auto& s : msg.slots) {
        if (const auto* p = std::get_if<Present>(&s)) {
            w.u8(0).blob(p->chunk);
        } else {
            w.u8(1).raw(std::get<Redacted>(s).commitment);
        }
    }
    w.u32(static_cast<std::uint32_t>(msg.seed_cover.size()));
    for (const auto& e : msg.seed_cover)
        w.u32(e.position).raw(e.seed);
    w.raw(msg.root_signature.bytes).raw(msg.signer_pk.bytes);
}

Bytes encode(const RedactedMessage& msg) {
    ByteWriter w;
    encode_to(w, msg);
    return std::move(w).take();
}

RedactedMessage decode_from(ByteReader& r, const Digest& context) {
    RedactedMessage msg;
    auto tag = r.u8();
    if (!valid_tag(tag))
        throw Error(Errc::Malformed, "unknown field tag");
    msg.field_tag = static_cast<FieldTag>(tag);
    msg.n = r.u32();
    if (msg.n == 0 || msg.n > kMaxChunks)
        throw Error(Errc::Malformed, "chunk count out of range");
    msg.slots.reserve(msg.n);
    for (std::uint32_t i = 0; i < msg.n; ++i) {
        auto kind = r.u8();
        if (kind == 0) {
            auto c = r.blob(kMaxChunkSize);
            msg.slots.emplace_back(Present{Bytes(c.begin(), c.end())});
        } else if (kind == 1) {
            msg.slots.emplace_back(Redacted{r.fixed<32>()});
        } else {
            throw Error(Errc::Malformed, "unknown slot kind");
        }
    }
    auto cover = r.u32();
    if (cover > 2 * kMaxChunks)
        throw Error(Errc::Malformed, "cover too large");
    for (std::uint32_t i = 0; i < cover; ++i) {
        CoverEntry e;
        e.position = r.u32();
        e.seed = r.fixed<kSeedSize>();
        msg.seed_cover.push_back(e);
    }
    msg.root_signature.bytes = r.fixed<64>();
    msg.signer_pk.bytes = r.fixed<32>();
    msg.context = context;
    return msg;
}

RedactedMessage decode_redacted(ByteView bytes, const Digest& context) {
    ByteReader r(bytes);
    auto msg = decode_from(r, context);
    r.expect_end();
    return msg;
}

Bytes encode(const RedactableSignature& sig) {
    ByteWriter w;
    w.raw(sig.root_signature.bytes).u32(sig.n).u8(sig.depth).raw(sig.root_seed).raw(sig.signer_pk.bytes);
    return std::move(w).take();
}

RedactableSignature decode_signature(ByteView bytes) {
    ByteReader r(bytes);
    RedactableSignature sig;
    sig.root_signature.bytes = r.fixed<64>();
    sig.n = r.u32();
    sig.depth = r.u8();
    sig.root_seed = r.fixed<kSeedSize>();
    sig.signer_pk.bytes = r.fixed<32>();
    r.expect_end();
    if (sig.n == 0 || sig.n > kMaxChunks || sig.depth != tree_depth(sig.n))
        throw Error(Errc::Malformed, "inconsistent signature header");
    return sig;
}

} // namespace acrp::rss
