// RGB PNG read/write through libpng's simplified API
#pragma once

#include <mochi/perception/frame.hpp>

#include <png.h>

#include <cstring>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace mochi::io {

class ImageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline perception::Frame read_png(const std::filesystem::path &path) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
        throw ImageError(path.string() + ": " + image.message);
    }
    image.format = PNG_FORMAT_RGB;
    perception::Frame frame(static_cast<int>(image.width), static_cast<int>(image.height));
    if (!png_image_finish_read(&image, nullptr, frame.pixels.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw ImageError(path.string() + ": " + msg);
    }
    return frame;
}

inline void write_png(const std::filesystem::path &path, const perception::Frame &frame) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(frame.width);
    image.height = static_cast<png_uint_32>(frame.height);
    image.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&image, path.c_str(), 0, frame.pixels.data(), 0, nullptr)) {
        throw ImageError(path.string() + ": " + image.message);
    }
}

} // namespace mochi::io
