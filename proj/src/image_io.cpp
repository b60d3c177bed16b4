#include "elproc/image_io.hpp"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

#include "elproc/error.hpp"

namespace elproc {

namespace {

ImageFormat format_from_extension(const std::string& path) {
    const auto dot = path.find_last_of('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == "pgm") return ImageFormat::kPgm;
    if (ext == "png") return ImageFormat::kPng;
    if (ext == "jpg" || ext == "jpeg") return ImageFormat::kJpeg;
    if (ext == "pbm") return ImageFormat::kPgm;  // handled by binary I/O
    throw IoError("cannot infer image format from path: " + path);
}

int skip_pnm_whitespace(std::istream& in) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            in.unget();
            break;
        }
        c = in.get();
    }
    return c;
}

long read_pnm_int(std::istream& in) {
    skip_pnm_whitespace(in);
    long v = 0;
    if (!(in >> v)) throw IoError("malformed PNM header");
    return v;
}

GrayImage load_pgm(std::istream& in, bool ascii) {
    const long w = read_pnm_int(in);
    const long h = read_pnm_int(in);
    const long maxval = read_pnm_int(in);
    if (w <= 0 || h <= 0) throw IoError("PGM with zero dimension");
    if (maxval <= 0 || maxval > 65535) throw IoError("unsupported PGM maxval");
    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    if (ascii) {
        for (double& p : img.pixels) {
            long v = 0;
            if (!(in >> v)) throw IoError("truncated P2 payload");
            p = static_cast<double>(v);
        }
    } else {
        in.get();  // single whitespace after maxval
        const int bytes = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> buf(img.size() * bytes);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (static_cast<size_t>(in.gcount()) != buf.size()) throw IoError("truncated P5 payload");
        for (size_t i = 0; i < img.size(); ++i) {
            img.pixels[i] = bytes == 1
                                ? buf[i]
                                : static_cast<double>((buf[2 * i] << 8) | buf[2 * i + 1]);
        }
    }
    return img;
}

struct PngReadCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngReadCloser() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

GrayImage load_png(const std::string& path) {
    PngReadCloser ctx;
    ctx.fp = std::fopen(path.c_str(), "rb");
    if (!ctx.fp) throw IoError("cannot open file: " + path);
    ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png) throw IoError("png init failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) throw IoError("png init failed");
    if (setjmp(png_jmpbuf(ctx.png))) throw IoError("png decode failed: " + path);

    png_init_io(ctx.png, ctx.fp);
    png_read_info(ctx.png, ctx.info);

    const png_uint_32 w = png_get_image_width(ctx.png, ctx.info);
    const png_uint_32 h = png_get_image_height(ctx.png, ctx.info);
    const int color = png_get_color_type(ctx.png, ctx.info);
    int depth = png_get_bit_depth(ctx.png, ctx.info);
    if (w == 0 || h == 0) throw IoError("PNG with zero dimension");

    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(ctx.png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(ctx.png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(ctx.png);
    if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA ||
        color == PNG_COLOR_TYPE_PALETTE) {
        // ITU-R 601 luma, computed at full precision by libpng.
        png_set_rgb_to_gray_fixed(ctx.png, 1, -1, -1);
    }
    png_read_update_info(ctx.png, ctx.info);
    depth = png_get_bit_depth(ctx.png, ctx.info);

    const size_t rowbytes = png_get_rowbytes(ctx.png, ctx.info);
    std::vector<unsigned char> data(rowbytes * h);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = data.data() + y * rowbytes;
    png_read_image(ctx.png, rows.data());

    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    for (png_uint_32 y = 0; y < h; ++y) {
        const unsigned char* row = rows[y];
        for (png_uint_32 x = 0; x < w; ++x) {
            img.at(static_cast<int>(x), static_cast<int>(y)) =
                depth == 16 ? static_cast<double>((row[2 * x] << 8) | row[2 * x + 1])
                            : static_cast<double>(row[x]);
        }
    }
    return img;
}

struct JpegErrorMgr {
    jpeg_error_mgr base;
    std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    std::longjmp(mgr->jump, 1);
}

GrayImage load_jpeg(const std::string& path) {
    FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw IoError("cannot open file: " + path);
    jpeg_decompress_struct cinfo;
    JpegErrorMgr err;
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        std::fclose(fp);
        throw IoError("jpeg decode failed: " + path);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, fp);
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_GRAYSCALE;
    jpeg_start_decompress(&cinfo);

    GrayImage img(static_cast<int>(cinfo.output_width), static_cast<int>(cinfo.output_height));
    if (img.empty()) {
        jpeg_destroy_decompress(&cinfo);
        std::fclose(fp);
        throw IoError("JPEG with zero dimension");
    }
    std::vector<unsigned char> row(cinfo.output_width);
    unsigned char* rowptr = row.data();
    while (cinfo.output_scanline < cinfo.output_height) {
        const int y = static_cast<int>(cinfo.output_scanline);
        jpeg_read_scanlines(&cinfo, &rowptr, 1);
        for (int x = 0; x < img.width; ++x) img.at(x, y) = row[x];
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    std::fclose(fp);
    return img;
}

// Quantize for saving: round values already inside [0, maxval], otherwise
// rescale the full range onto [0, maxval] first.
std::vector<uint32_t> quantize(const GrayImage& img, int maxval) {
    auto [mn, mx] = min_max(img);
    GrayImage tmp;
    const GrayImage* src = &img;
    if (mn < 0.0 || mx > static_cast<double>(maxval)) {
        tmp = rescale(img, 0.0, static_cast<double>(maxval));
        src = &tmp;
    }
    std::vector<uint32_t> out(img.size());
    for (size_t i = 0; i < out.size(); ++i) {
        const double v = std::clamp(src->pixels[i], 0.0, static_cast<double>(maxval));
        out[i] = static_cast<uint32_t>(std::lround(v));
    }
    return out;
}

void save_pgm(const GrayImage& img, const std::string& path, bool ascii, int bit_depth) {
    const int maxval = bit_depth == 16 ? 65535 : 255;
    const auto q = quantize(img, maxval);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out << (ascii ? "P2" : "P5") << "\n" << img.width << " " << img.height << "\n" << maxval << "\n";
    if (ascii) {
        for (size_t i = 0; i < q.size(); ++i)
            out << q[i] << ((i + 1) % img.width == 0 ? '\n' : ' ');
    } else {
        std::vector<unsigned char> buf;
        buf.reserve(q.size() * (maxval > 255 ? 2 : 1));
        for (uint32_t v : q) {
            if (maxval > 255) buf.push_back(static_cast<unsigned char>(v >> 8));
            buf.push_back(static_cast<unsigned char>(v & 0xff));
        }
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    }
    if (!out) throw IoError("write failed: " + path);
}

struct PngWriteCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngWriteCloser() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
    }
};

void save_png(const GrayImage& img, const std::string& path, int bit_depth) {
    const int maxval = bit_depth == 16 ? 65535 : 255;
    const auto q = quantize(img, maxval);
    PngWriteCloser ctx;
    ctx.fp = std::fopen(path.c_str(), "wb");
    if (!ctx.fp) throw IoError("cannot open file for writing: " + path);
    ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png) throw IoError("png init failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) throw IoError("png init failed");
    if (setjmp(png_jmpbuf(ctx.png))) throw IoError("png encode failed: " + path);

    png_init_io(ctx.png, ctx.fp);
    png_set_IHDR(ctx.png, ctx.info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), bit_depth, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(ctx.png, ctx.info);

    const int bytes = bit_depth == 16 ? 2 : 1;
    std::vector<unsigned char> row(static_cast<size_t>(img.width) * bytes);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const uint32_t v = q[static_cast<size_t>(y) * img.width + x];
            if (bytes == 2) {
                row[2 * x] = static_cast<unsigned char>(v >> 8);
                row[2 * x + 1] = static_cast<unsigned char>(v & 0xff);
            } else {
                row[x] = static_cast<unsigned char>(v);
            }
        }
        png_write_row(ctx.png, row.data());
    }
    png_write_end(ctx.png, nullptr);
}

}  // namespace

GrayImage load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    unsigned char magic[2] = {0, 0};
    in.read(reinterpret_cast<char*>(magic), 2);
    if (in.gcount() != 2) throw IoError("file too short: " + path);
    in.seekg(0);
    if (magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5')) {
        in.ignore(2);
        return load_pgm(in, magic[1] == '2');
    }
    if (magic[0] == 0x89 && magic[1] == 'P') return load_png(path);
    if (magic[0] == 0xff && magic[1] == 0xd8) return load_jpeg(path);
    throw IoError("unsupported image format: " + path);
}

void save_image(const GrayImage& img, const std::string& path, ImageFormat format,
                int bit_depth) {
    if (path.empty()) throw IoError("empty output path");
    if (img.empty()) throw IoError("cannot save empty image");
    if (bit_depth != 8 && bit_depth != 16) throw IoError("bit depth must be 8 or 16");
    if (format == ImageFormat::kAuto) format = format_from_extension(path);
    switch (format) {
        case ImageFormat::kPgm: save_pgm(img, path, false, bit_depth); break;
        case ImageFormat::kPgmAscii: save_pgm(img, path, true, bit_depth); break;
        case ImageFormat::kPng: save_png(img, path, bit_depth); break;
        case ImageFormat::kJpeg: throw IoError("JPEG output is not supported; use PNG or PGM");
        case ImageFormat::kAuto: break;
    }
}

void save_binary(const BinaryImage& img, const std::string& path) {
    if (path.empty()) throw IoError("empty output path");
    const auto dot = path.find_last_of('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == "pbm") {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot open file for writing: " + path);
        out << "P4\n" << img.width << " " << img.height << "\n";
        const int stride = (img.width + 7) / 8;
        std::vector<unsigned char> row(stride);
        for (int y = 0; y < img.height; ++y) {
            std::fill(row.begin(), row.end(), 0);
            for (int x = 0; x < img.width; ++x)
                if (img.get(x, y)) row[x / 8] |= static_cast<unsigned char>(0x80 >> (x % 8));
            out.write(reinterpret_cast<const char*>(row.data()), stride);
        }
        return;
    }
    GrayImage g(img.width, img.height);
    for (size_t i = 0; i < img.mask.size(); ++i) g.pixels[i] = img.mask[i] ? 255.0 : 0.0;
    save_image(g, path, ImageFormat::kAuto, 8);
}

BinaryImage load_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    char m0 = 0, m1 = 0;
    in.get(m0).get(m1);
    if (m0 == 'P' && m1 == '4') {
        const long w = read_pnm_int(in);
        const long h = read_pnm_int(in);
        if (w <= 0 || h <= 0) throw IoError("PBM with zero dimension");
        in.get();
        BinaryImage img(static_cast<int>(w), static_cast<int>(h));
        const int stride = (img.width + 7) / 8;
        std::vector<unsigned char> row(stride);
        for (int y = 0; y < img.height; ++y) {
            in.read(reinterpret_cast<char*>(row.data()), stride);
            if (in.gcount() != stride) throw IoError("truncated P4 payload");
            for (int x = 0; x < img.width; ++x)
                img.set(x, y, (row[x / 8] >> (7 - x % 8)) & 1);
        }
        return img;
    }
    in.close();
    const GrayImage g = load_image(path);
    BinaryImage img(g.width, g.height);
    for (size_t i = 0; i < g.pixels.size(); ++i) img.mask[i] = g.pixels[i] > 127.0 ? 1 : 0;
    return img;
}

}  // namespace elproc
