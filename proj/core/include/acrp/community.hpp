#pragma once

#include <vector>

#include "acrp/ledger_state.hpp"

namespace acrp::community {

inline constexpr double kDefaultDuplicateThresholdM = 50.0;

struct DuplicateCandidate {
    ReportId report_a;
    ReportId report_b;
    double distance_m = 0;
    bool same_type = false;
};

/// Open published reports of the same type within `threshold_m` of `id`, nearest first,
/// ties by report id. Throws UnknownReport.
std::vector<DuplicateCandidate> find_duplicates(const ledger::LedgerState& state, const ReportId& id,
                                                double threshold_m = kDefaultDuplicateThresholdM);

struct PriorityScore {
    ReportId report_id;
    std::uint64_t score = 0;
};

/// Open published reports by score (own votes plus merged-in votes) descending, then oldest announce.
std::vector<PriorityScore> priority_ranking(const ledger::LedgerState& state);

/// Sum of scores over open published reports; invariant under merges.
std::uint64_t total_live_score(const ledger::LedgerState& state);

} // namespace acrp::community
