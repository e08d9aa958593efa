#include "acrp/gateway/png_codec.hpp"

#include <png.h>


namespace acrp::gateway {

chunking::ImageDescriptor decode_png(ByteView png) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, png.data(), png.size()))
        throw Error(Errc::InvalidImage, std::string("png: ") + image.message);
    image.format = PNG_FORMAT_RGB;
    if (image.width == 0 || image.height == 0 || std::uint64_t{image.width} * image.height > (1ull << 26)) {
        png_image_free(&image);
        throw Error(Errc::InvalidImage, "png dimensions out of range");
    }
    chunking::ImageDescriptor out;
    out.width = image.width;
    out.height = image.height;
    out.data.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, out.data.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw Error(Errc::InvalidImage, "png: " + msg);
    }
    return out;
}

Bytes encode_png(const chunking::ImageDescriptor& img) {
    img.validate();
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = img.width;
    image.height = img.height;
    image.format = PNG_FORMAT_RGB;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.data.data(), 0, nullptr))
        throw Error(Errc::InvalidImage, std::string("png: ") + image.message);
    Bytes out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.data.data(), 0, nullptr))
        throw Error(Errc::InvalidImage, std::string("png: ") + image.message);
    out.resize(size);
    return out;
}

} // namespace acrp::gateway
