#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace acrp {

enum class Errc {
    // encoding
    Malformed,
    // redactable signatures
    EmptyMessage,
    ChunkTooLarge,
    TooManyChunks,
    IndexOutOfRange,
    AlreadyRedacted,
    NonceUnavailable,
    // chunking
    GridTooFine,
    RegionOutOfBounds,
    OverlappingRegions,
    SchemeMismatch,
    InvalidImage,
    // report core
    InvalidReport,
    NoResponsibleAuthority,
    EmptyRegistry,
    // ledger
    NotOurTurn,
    TimeoutNotReached,
    WrongPhase,
    UnknownReport,
    // storage
    TooLarge,
    IntegrityError,
    Io,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    explicit Error(Errc code) : std::runtime_error(std::string(to_string(code))), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace acrp
