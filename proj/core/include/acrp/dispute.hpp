#pragma once

#include <array>
#include <set>
#include <string>

#include "acrp/bundle.hpp"
#include "acrp/transaction.hpp"

namespace acrp::ledger {

struct DisputeResult {
    DisputeVerdict verdict = DisputeVerdict::Consistent;
    /// Redacted chunk indices per field (L, P, D); meaningful for Consistent verdicts.
    std::array<std::set<std::uint32_t>, 3> diff;
    std::string detail;
};

/// Checks a published redaction against the citizen's original. HashMismatch when the original
/// is not the announced/committed report; AlteredContent when any published slot is not the
/// original chunk or the original chunk's commitment.
DisputeResult verify_dispute(const ReportBundle& original, const ReportId& announced,
                             const FieldCommitments& on_chain, const RedactedFields& published);

} // namespace acrp::ledger
