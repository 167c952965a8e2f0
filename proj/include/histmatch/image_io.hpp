#ifndef HISTMATCH_IMAGE_IO_HPP
#define HISTMATCH_IMAGE_IO_HPP

#include <png.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "histmatch/error.hpp"
#include "histmatch/image.hpp"

namespace histmatch {

namespace detail {

inline ImageBuffer from_interleaved(const std::vector<unsigned char>& rgb, int w, int h) {
    ImageBuffer img;
    img.width = w;
    img.height = h;
    const std::size_t n = img.pixel_count();
    for (auto& plane : img.planes)
        plane.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        img.planes[0][i] = rgb[3 * i + 0];
        img.planes[1][i] = rgb[3 * i + 1];
        img.planes[2][i] = rgb[3 * i + 2];
    }
    return img;
}

inline std::vector<unsigned char> to_interleaved(const ImageBuffer& img) {
    const std::size_t n = img.pixel_count();
    std::vector<unsigned char> rgb(3 * n);
    for (std::size_t i = 0; i < n; ++i) {
        rgb[3 * i + 0] = img.planes[0][i];
        rgb[3 * i + 1] = img.planes[1][i];
        rgb[3 * i + 2] = img.planes[2][i];
    }
    return rgb;
}

inline ImageBuffer decode_png(const std::filesystem::path& path) {
    FILE* fp = std::fopen(path.string().c_str(), "rb");
    if (!fp)
        throw DecodeError("cannot open image " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png)
            png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw DecodeError("libpng init failed for " + path.string());
    }

    std::vector<unsigned char> rgb;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw DecodeError("corrupt PNG: " + path.string());
    }

    png_init_io(png, fp);
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);

    // Normalize everything to 8-bit RGB.
    if (color == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (depth == 16)
        png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    if (w == 0 || h == 0) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw DecodeError("zero-sized PNG: " + path.string());
    }

    rgb.resize(static_cast<std::size_t>(w) * h * 3);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y)
        rows[y] = rgb.data() + static_cast<std::size_t>(y) * w * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);

    return from_interleaved(rgb, static_cast<int>(w), static_cast<int>(h));
}

inline int ppm_next_int(std::istream& in, const std::filesystem::path& path) {
    // Skips whitespace and '#' comments between header tokens.
    while (true) {
        const int c = in.peek();
        if (c == EOF)
            throw DecodeError("truncated PPM header: " + path.string());
        if (c == '#') {
            std::string line;
            std::getline(in, line);
            continue;
        }
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        break;
    }
    int value = 0;
    if (!(in >> value))
        throw DecodeError("bad PPM header: " + path.string());
    return value;
}

inline ImageBuffer decode_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DecodeError("cannot open image " + path.string());
    char magic[2] = {};
    in.read(magic, 2);
    if (in.gcount() != 2 || magic[0] != 'P' || magic[1] != '6')
        throw DecodeError("not a P6 PPM: " + path.string());
    const int w = ppm_next_int(in, path);
    const int h = ppm_next_int(in, path);
    const int maxval = ppm_next_int(in, path);
    if (w <= 0 || h <= 0)
        throw DecodeError("zero-sized PPM: " + path.string());
    if (maxval != 255)
        throw DecodeError("unsupported PPM maxval " + std::to_string(maxval) + ": " + path.string());
    in.get(); // single whitespace after maxval
    std::vector<unsigned char> rgb(static_cast<std::size_t>(w) * h * 3);
    in.read(reinterpret_cast<char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
    if (static_cast<std::size_t>(in.gcount()) != rgb.size())
        throw DecodeError("truncated PPM data: " + path.string());
    return from_interleaved(rgb, w, h);
}

} // namespace detail

/// Decode an 8-bit RGB image (PNG or binary PPM), sniffing by magic bytes.
/// Grayscale, palette and alpha PNG variants are expanded/stripped to RGB.
inline ImageBuffer decode_image(const std::filesystem::path& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe)
        throw DecodeError("cannot open image " + path.string());
    unsigned char magic[8] = {};
    probe.read(reinterpret_cast<char*>(magic), 8);
    probe.close();
    static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (std::memcmp(magic, png_sig, 8) == 0)
        return detail::decode_png(path);
    if (magic[0] == 'P' && magic[1] == '6')
        return detail::decode_ppm(path);
    throw DecodeError("unrecognized image format: " + path.string());
}

/// Write `img` as an 8-bit RGB PNG. Fixed encoder settings keep the output
/// bytes reproducible for identical pixel data.
inline void encode_png(const ImageBuffer& img, const std::filesystem::path& path) {
    check_image(img);
    FILE* fp = std::fopen(path.string().c_str(), "wb");
    if (!fp)
        throw IoError("cannot write " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png)
            png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw IoError("libpng init failed for " + path.string());
    }

    std::vector<unsigned char> rgb = detail::to_interleaved(img);
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = rgb.data() + static_cast<std::size_t>(y) * img.width * 3;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw IoError("PNG write failed: " + path.string());
    }

    png_init_io(png, fp);
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

/// Write `img` as a binary P6 PPM (handy for small fixtures).
inline void encode_ppm(const ImageBuffer& img, const std::filesystem::path& path) {
    check_image(img);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    const std::vector<unsigned char> rgb = detail::to_interleaved(img);
    out.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
    if (!out)
        throw IoError("short write: " + path.string());
}

} // namespace histmatch

#endif // HISTMATCH_IMAGE_IO_HPP
