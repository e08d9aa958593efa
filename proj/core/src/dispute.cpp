#include "acrp/dispute.hpp"

namespace acrp::ledger {

DisputeResult verify_dispute(const ReportBundle& original, const ReportId& announced,
                             const FieldCommitments& on_chain, const RedactedFields& published) {
    DisputeResult out;
    ReportId id;
    try {
        id = original.id();
    } catch (const Error& e) {
        return {DisputeVerdict::HashMismatch, {}, e.what()};
    }
    if (id != announced)
        return {DisputeVerdict::HashMismatch, {}, "original does not hash to the announced report id"};
    if (commitments(original) != on_chain)
        return {DisputeVerdict::HashMismatch, {}, "original signatures differ from the committed ones"};

    auto msgs = field_messages(original.report, original.granularity);
    for (std::size_t f = 0; f < msgs.size(); ++f) {
        const auto& chunks = msgs[f].chunks;
        const auto& pub = published[f];
        auto field = std::string(rss::to_string(msgs[f].field_tag));
        if (pub.field_tag != msgs[f].field_tag || pub.slots.size() != chunks.size())
            return {DisputeVerdict::AlteredContent, {}, field + ": published shape differs from original"};
        auto leaves = rss::leaf_commitments(msgs[f], original.signatures[f]);
        for (std::uint32_t i = 0; i < chunks.size(); ++i) {
            if (const auto* p = std::get_if<rss::Present>(&pub.slots[i])) {
                if (p->chunk != chunks[i])
                    return {DisputeVerdict::AlteredContent, {}, field + " chunk " + std::to_string(i) + " altered"};
            } else if (std::get<rss::Redacted>(pub.slots[i]).commitment != leaves[i]) {
                return {DisputeVerdict::AlteredContent, {},
                        field + " chunk " + std::to_string(i) + " replaced, not removed"};
            } else {
                out.diff[f].insert(i);
            }
        }
    }
    return out;
}

} // namespace acrp::ledger
