#include "acrp/error.hpp"

namespace acrp {

std::string_view to_string(Errc code) {
    switch (code) {
    case Errc::Malformed: return "Malformed";
    case Errc::EmptyMessage: return "EmptyMessage";
    case Errc::ChunkTooLarge: return "ChunkTooLarge";
    case Errc::TooManyChunks: return "TooManyChunks";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::AlreadyRedacted: return "AlreadyRedacted";
    case Errc::NonceUnavailable: return "NonceUnavailable";
    case Errc::GridTooFine: return "GridTooFine";
    case Errc::RegionOutOfBounds: return "RegionOutOfBounds";
    case Errc::OverlappingRegions: return "OverlappingRegions";
    case Errc::SchemeMismatch: return "SchemeMismatch";
    case Errc::InvalidImage: return "InvalidImage";
    case Errc::InvalidReport: return "InvalidReport";
    case Errc::NoResponsibleAuthority: return "NoResponsibleAuthority";
    case Errc::EmptyRegistry: return "EmptyRegistry";
    case Errc::NotOurTurn: return "NotOurTurn";
    case Errc::TimeoutNotReached: return "TimeoutNotReached";
    case Errc::WrongPhase: return "WrongPhase";
    case Errc::UnknownReport: return "UnknownReport";
    case Errc::TooLarge: return "TooLarge";
    case Errc::IntegrityError: return "IntegrityError";
    case Errc::Io: return "Io";
    }
    return "Unknown";
}

} // namespace acrp
