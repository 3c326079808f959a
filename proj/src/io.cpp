#include "fdif/io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

namespace fdif {

namespace {

bool has_suffix(const std::string& s, const std::string& suf) {
    if (s.size() < suf.size()) return false;
    std::string tail = s.substr(s.size() - suf.size());
    std::transform(tail.begin(), tail.end(), tail.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return tail == suf;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

int pgm_token(std::FILE* f) {
    // Next integer token, skipping whitespace and '#' comments.
    int c = std::fgetc(f);
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = std::fgetc(f);
        } else if (!std::isspace(c)) {
            break;
        }
        if (c != EOF) c = std::fgetc(f);
    }
    if (c == EOF || !std::isdigit(c)) return -1;
    int v = 0;
    while (c != EOF && std::isdigit(c)) {
        v = v * 10 + (c - '0');
        c = std::fgetc(f);
    }
    return v;
}

RawImage read_pgm(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw IoError("cannot open file: " + path);
    char magic[3] = {};
    if (std::fread(magic, 1, 2, f.get()) != 2 || magic[0] != 'P' || magic[1] != '5')
        throw IoError("not a binary PGM (P5) file: " + path);
    const int w = pgm_token(f.get());
    const int h = pgm_token(f.get());
    const int maxval = pgm_token(f.get());
    if (w < 1 || h < 1) throw IoError("bad PGM header in " + path);
    if (maxval != 255)
        throw IoError("unsupported bit depth (maxval " + std::to_string(maxval) +
                      ", want 255) in " + path);
    RawImage raw;
    raw.width = w;
    raw.height = h;
    raw.pixels.resize(static_cast<size_t>(w) * h);
    if (std::fread(raw.pixels.data(), 1, raw.pixels.size(), f.get()) != raw.pixels.size())
        throw IoError("truncated PGM pixel data in " + path);
    return raw;
}

void write_pgm(const RawImage& raw, const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw IoError("cannot open file for writing: " + path);
    std::fprintf(f.get(), "P5\n%d %d\n255\n", raw.width, raw.height);
    if (std::fwrite(raw.pixels.data(), 1, raw.pixels.size(), f.get()) != raw.pixels.size())
        throw IoError("failed while writing " + path);
}

RawImage read_png(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw IoError("cannot open file: " + path);
    png_byte header[8];
    if (std::fread(header, 1, 8, f.get()) != 8 || png_sig_cmp(header, 0, 8))
        throw IoError("not a PNG file: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng init failed for " + path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("corrupt PNG data in " + path);
    }
    png_init_io(png, f.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    if (depth == 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("unsupported bit depth (16-bit) in " + path);
    }
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int channels = png_get_channels(png, info);
    std::vector<png_byte> rowbuf(static_cast<size_t>(w) * channels);
    RawImage raw;
    raw.width = static_cast<int>(w);
    raw.height = static_cast<int>(h);
    raw.pixels.resize(static_cast<size_t>(w) * h);
    for (png_uint_32 y = 0; y < h; ++y) {
        png_read_row(png, rowbuf.data(), nullptr);
        for (png_uint_32 x = 0; x < w; ++x) {
            if (channels >= 3) {
                const double lum = 0.299 * rowbuf[x * channels] +
                                   0.587 * rowbuf[x * channels + 1] +
                                   0.114 * rowbuf[x * channels + 2];
                raw.pixels[static_cast<size_t>(y) * w + x] =
                    static_cast<std::uint8_t>(std::lround(std::min(255.0, lum)));
            } else {
                raw.pixels[static_cast<size_t>(y) * w + x] = rowbuf[x * channels];
            }
        }
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return raw;
}

void write_png(const RawImage& raw, const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw IoError("cannot open file for writing: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng init failed for " + path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed while writing " + path);
    }
    png_init_io(png, f.get());
    png_set_IHDR(png, info, raw.width, raw.height, 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < raw.height; ++y)
        png_write_row(png, const_cast<png_bytep>(raw.pixels.data() +
                                                 static_cast<size_t>(y) * raw.width));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

RawImage quantize(const Image& img) {
    RawImage raw;
    raw.width = img.width;
    raw.height = img.height;
    raw.pixels.resize(img.size());
    for (size_t i = 0; i < img.data.size(); ++i) {
        const double v = std::clamp(img.data[i], 0.0, 1.0);
        raw.pixels[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
    return raw;
}

Image from_raw(const RawImage& raw) {
    Image img(raw.width, raw.height);
    for (size_t i = 0; i < raw.pixels.size(); ++i)
        img.data[i] = raw.pixels[i] / 255.0;
    return img;
}

Image read_image(const std::string& path) {
    if (has_suffix(path, ".pgm")) return from_raw(read_pgm(path));
    if (has_suffix(path, ".png")) return from_raw(read_png(path));
    throw IoError("unsupported image format (want .pgm or .png): " + path);
}

void write_image(const Image& img, const std::string& path) {
    if (has_suffix(path, ".pgm"))
        write_pgm(quantize(img), path);
    else if (has_suffix(path, ".png"))
        write_png(quantize(img), path);
    else
        throw IoError("unsupported output format (want .pgm or .png): " + path);
}

BinaryMap to_binary(const Image& img, double t) {
    BinaryMap map(img.width, img.height);
    for (size_t i = 0; i < img.data.size(); ++i) map.bits[i] = img.data[i] > t ? 1 : 0;
    return map;
}

Image from_binary(const BinaryMap& map) {
    Image img(map.width, map.height);
    for (size_t i = 0; i < map.bits.size(); ++i) img.data[i] = map.bits[i] ? 1.0 : 0.0;
    return img;
}

}  // namespace fdif
