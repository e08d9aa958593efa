#pragma once

#include "acrp/chunking.hpp"

namespace acrp::gateway {

/// PNG (any colour type/bit depth libpng can convert) -> RGB8. Throws InvalidImage.
chunking::ImageDescriptor decode_png(ByteView png);
/// RGB8 -> 8-bit RGB PNG.
Bytes encode_png(const chunking::ImageDescriptor& img);

} // namespace acrp::gateway
