#include "acrp/community.hpp"

#include <algorithm>

namespace acrp::community {

using ledger::is_live_public;

std::vector<DuplicateCandidate> find_duplicates(const ledger::LedgerState& state, const ReportId& id,
                                                double threshold_m) {
    const auto* self = state.find(id);
    if (!self)
        throw Error(Errc::UnknownReport, id.hex());
    std::vector<DuplicateCandidate> out;
    if (!is_live_public(self->phase) || !self->location)
        return out;
    for (const auto& [other_id, other] : state.reports()) {
        if (other_id == id || !is_live_public(other.phase) || !other.location || other.type != self->type)
            continue;
        double d = haversine_m(*self->location, *other.location);
        if (d <= threshold_m)
            out.push_back({id, other_id, d, true});
    }
    std::sort(out.begin(), out.end(), [](const DuplicateCandidate& x, const DuplicateCandidate& y) {
        if (x.distance_m != y.distance_m)
            return x.distance_m < y.distance_m;
        return x.report_b < y.report_b;
    });
    return out;
}

std::vector<PriorityScore> priority_ranking(const ledger::LedgerState& state) {
    struct Row {
        PriorityScore score;
        std::uint64_t announce_height;
    };
    std::vector<Row> rows;
    for (const auto& [id, rec] : state.reports())
        if (is_live_public(rec.phase))
            rows.push_back({{id, rec.score()}, rec.announce_height});
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.score.score != b.score.score)
            return a.score.score > b.score.score;
        if (a.announce_height != b.announce_height)
            return a.announce_height < b.announce_height;
        return a.score.report_id < b.score.report_id;
    });
    std::vector<PriorityScore> out;
    out.reserve(rows.size());
    for (auto& r : rows)
        out.push_back(r.score);
    return out;
}

std::uint64_t total_live_score(const ledger::LedgerState& state) {
    std::uint64_t total = 0;
    for (const auto& [id, rec] : state.reports())
        if (is_live_public(rec.phase))
            total += rec.score();
    return total;
}

} // namespace acrp::community
