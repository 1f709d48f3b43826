#include "trussketch/image_io.hpp"

#include <zlib.h>

#include <array>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace trussketch::raster {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return data;
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::uint32_t be32(const unsigned char* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) |
           std::uint32_t(p[3]);
}

void put_be32(std::string& s, std::uint32_t v) {
    s.push_back(static_cast<char>((v >> 24) & 0xff));
    s.push_back(static_cast<char>((v >> 16) & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
    s.push_back(static_cast<char>(v & 0xff));
}

void put_le16(std::string& s, std::uint16_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_le32(std::string& s, std::uint32_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
    s.push_back(static_cast<char>((v >> 16) & 0xff));
    s.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t le32(const unsigned char* p) {
    return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
           (std::uint32_t(p[3]) << 24);
}

std::uint16_t le16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::string zlib_compress(const std::string& raw) {
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::string out(bound, '\0');
    if (compress2(reinterpret_cast<Bytef*>(out.data()), &bound,
                  reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()),
                  Z_BEST_COMPRESSION) != Z_OK)
        throw std::runtime_error("zlib compression failed");
    out.resize(bound);
    return out;
}

std::string zlib_decompress(const unsigned char* data, std::size_t size, std::size_t expected) {
    std::string out(expected, '\0');
    uLongf dest_len = static_cast<uLongf>(expected);
    int rc = uncompress(reinterpret_cast<Bytef*>(out.data()), &dest_len, data,
                        static_cast<uLong>(size));
    if (rc != Z_OK) throw std::runtime_error("png: corrupt compressed data");
    out.resize(dest_len);
    return out;
}

void append_chunk(std::string& png, const char type[4], const std::string& payload) {
    put_be32(png, static_cast<std::uint32_t>(payload.size()));
    std::string block(type, 4);
    block += payload;
    png += block;
    std::uint32_t crc = static_cast<std::uint32_t>(
        crc32(0, reinterpret_cast<const Bytef*>(block.data()), static_cast<uInt>(block.size())));
    put_be32(png, crc);
}

std::string encode_png_raw(int width, int height, int channels,
                           const std::vector<std::uint8_t>& pixels) {
    std::string raw;
    std::size_t stride = static_cast<std::size_t>(width) * channels;
    raw.reserve((stride + 1) * height);
    for (int y = 0; y < height; ++y) {
        raw.push_back('\0');  // filter type 0
        raw.append(reinterpret_cast<const char*>(pixels.data() + y * stride), stride);
    }

    std::string png("\x89PNG\r\n\x1a\n", 8);
    std::string ihdr;
    put_be32(ihdr, static_cast<std::uint32_t>(width));
    put_be32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);                                  // bit depth
    ihdr.push_back(channels == 1 ? '\0' : '\x02');      // gray / rgb
    ihdr.push_back('\0');                               // compression
    ihdr.push_back('\0');                               // filter
    ihdr.push_back('\0');                               // no interlace
    append_chunk(png, "IHDR", ihdr);
    append_chunk(png, "IDAT", zlib_compress(raw));
    append_chunk(png, "IEND", "");
    return png;
}

int paeth(int a, int b, int c) {
    int p = a + b - c;
    int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

RgbImage decode_png(const std::string& file) {
    const auto* u = reinterpret_cast<const unsigned char*>(file.data());
    if (file.size() < 8 || std::memcmp(u, "\x89PNG\r\n\x1a\n", 8) != 0)
        throw std::runtime_error("png: bad signature");

    std::uint32_t width = 0, height = 0;
    int bit_depth = 0, color_type = 0, interlace = 0;
    std::string idat;
    std::vector<std::array<std::uint8_t, 3>> palette;
    std::size_t pos = 8;
    while (pos + 8 <= file.size()) {
        std::uint32_t len = be32(u + pos);
        std::string type(file, pos + 4, 4);
        if (pos + 12 + len > file.size()) throw std::runtime_error("png: truncated chunk");
        const unsigned char* payload = u + pos + 8;
        if (type == "IHDR") {
            width = be32(payload);
            height = be32(payload + 4);
            bit_depth = payload[8];
            color_type = payload[9];
            interlace = payload[12];
        } else if (type == "PLTE") {
            for (std::uint32_t i = 0; i + 2 < len; i += 3)
                palette.push_back({payload[i], payload[i + 1], payload[i + 2]});
        } else if (type == "IDAT") {
            idat.append(reinterpret_cast<const char*>(payload), len);
        } else if (type == "IEND") {
            break;
        }
        pos += 12 + len;
    }
    if (width == 0 || height == 0) throw std::runtime_error("png: missing IHDR");
    if (bit_depth != 8) throw std::runtime_error("png: only 8-bit depth supported");
    if (interlace != 0) throw std::runtime_error("png: interlaced images not supported");

    int channels;
    switch (color_type) {
        case 0: channels = 1; break;  // gray
        case 2: channels = 3; break;  // rgb
        case 3: channels = 1; break;  // palette index
        case 4: channels = 2; break;  // gray + alpha
        case 6: channels = 4; break;  // rgba
        default: throw std::runtime_error("png: unsupported color type");
    }

    std::size_t stride = static_cast<std::size_t>(width) * channels;
    std::string raw = zlib_decompress(reinterpret_cast<const unsigned char*>(idat.data()),
                                      idat.size(), (stride + 1) * height);
    if (raw.size() != (stride + 1) * height) throw std::runtime_error("png: size mismatch");

    // Undo per-scanline filters in place.
    std::vector<std::uint8_t> img(stride * height, 0);
    auto* r = reinterpret_cast<unsigned char*>(raw.data());
    for (std::uint32_t y = 0; y < height; ++y) {
        int filter = r[y * (stride + 1)];
        const unsigned char* src = r + y * (stride + 1) + 1;
        std::uint8_t* dst = img.data() + y * stride;
        const std::uint8_t* prev = y > 0 ? img.data() + (y - 1) * stride : nullptr;
        for (std::size_t i = 0; i < stride; ++i) {
            int a = i >= static_cast<std::size_t>(channels) ? dst[i - channels] : 0;
            int b = prev ? prev[i] : 0;
            int c = (prev && i >= static_cast<std::size_t>(channels)) ? prev[i - channels] : 0;
            int v = src[i];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: v += paeth(a, b, c); break;
                default: throw std::runtime_error("png: bad filter type");
            }
            dst[i] = static_cast<std::uint8_t>(v & 0xff);
        }
    }

    RgbImage out(static_cast<int>(width), static_cast<int>(height));
    for (std::uint32_t y = 0; y < height; ++y) {
        for (std::uint32_t x = 0; x < width; ++x) {
            const std::uint8_t* p = img.data() + y * stride + static_cast<std::size_t>(x) * channels;
            std::uint8_t rgb[3];
            switch (color_type) {
                case 0: rgb[0] = rgb[1] = rgb[2] = p[0]; break;
                case 2: rgb[0] = p[0]; rgb[1] = p[1]; rgb[2] = p[2]; break;
                case 3: {
                    if (p[0] >= palette.size()) throw std::runtime_error("png: palette overflow");
                    auto& e = palette[p[0]];
                    rgb[0] = e[0]; rgb[1] = e[1]; rgb[2] = e[2];
                    break;
                }
                case 4: rgb[0] = rgb[1] = rgb[2] = p[0]; break;
                case 6: rgb[0] = p[0]; rgb[1] = p[1]; rgb[2] = p[2]; break;
            }
            out.set(static_cast<int>(x), static_cast<int>(y), rgb[0], rgb[1], rgb[2]);
        }
    }
    return out;
}

RgbImage decode_bmp(const std::string& file) {
    const auto* u = reinterpret_cast<const unsigned char*>(file.data());
    if (file.size() < 54 || u[0] != 'B' || u[1] != 'M') throw std::runtime_error("bmp: bad signature");
    std::uint32_t data_offset = le32(u + 10);
    std::uint32_t header_size = le32(u + 14);
    if (header_size < 40) throw std::runtime_error("bmp: unsupported header");
    std::int32_t width = static_cast<std::int32_t>(le32(u + 18));
    std::int32_t height = static_cast<std::int32_t>(le32(u + 22));
    std::uint16_t bpp = le16(u + 28);
    std::uint32_t compression = le32(u + 30);
    if (compression != 0) throw std::runtime_error("bmp: compressed files not supported");
    if (width <= 0) throw std::runtime_error("bmp: bad width");
    bool top_down = height < 0;
    std::int32_t abs_h = top_down ? -height : height;

    std::vector<std::array<std::uint8_t, 3>> palette;
    if (bpp == 8) {
        std::uint32_t colors = le32(u + 46);
        if (colors == 0) colors = 256;
        std::size_t pal_off = 14 + header_size;
        for (std::uint32_t i = 0; i < colors; ++i) {
            const unsigned char* e = u + pal_off + 4 * i;
            palette.push_back({e[2], e[1], e[0]});  // stored BGR
        }
    } else if (bpp != 24 && bpp != 32) {
        throw std::runtime_error("bmp: only 8/24/32 bpp supported");
    }

    std::size_t row_bytes = ((static_cast<std::size_t>(width) * bpp + 31) / 32) * 4;
    RgbImage out(width, abs_h);
    for (std::int32_t row = 0; row < abs_h; ++row) {
        std::int32_t y = top_down ? row : abs_h - 1 - row;
        const unsigned char* src = u + data_offset + row_bytes * row;
        if (data_offset + row_bytes * (row + 1) > file.size())
            throw std::runtime_error("bmp: truncated pixel data");
        for (std::int32_t x = 0; x < width; ++x) {
            if (bpp == 8) {
                std::uint8_t idx = src[x];
                if (idx >= palette.size()) throw std::runtime_error("bmp: palette overflow");
                auto& e = palette[idx];
                out.set(x, y, e[0], e[1], e[2]);
            } else {
                const unsigned char* p = src + x * (bpp / 8);
                out.set(x, y, p[2], p[1], p[0]);
            }
        }
    }
    return out;
}

}  // namespace

std::uint8_t rgb_to_luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    double y = 0.299 * r + 0.587 * g + 0.114 * b;
    return static_cast<std::uint8_t>(y + 0.5);
}

RgbImage load_image_rgb(const std::string& path) {
    std::string file = read_file(path);
    if (file.size() >= 8 && std::memcmp(file.data(), "\x89PNG", 4) == 0) return decode_png(file);
    if (file.size() >= 2 && file[0] == 'B' && file[1] == 'M') return decode_bmp(file);
    throw std::runtime_error("unsupported image format (expected PNG or BMP): " + path);
}

GrayImage load_image_gray(const std::string& path) {
    RgbImage rgb = load_image_rgb(path);
    GrayImage out(rgb.width, rgb.height);
    for (int y = 0; y < rgb.height; ++y)
        for (int x = 0; x < rgb.width; ++x) {
            const auto* p = rgb.px(x, y);
            out.at(x, y) = rgb_to_luma(p[0], p[1], p[2]);
        }
    return out;
}

std::string encode_png(const RgbImage& img) { return encode_png_raw(img.width, img.height, 3, img.data); }

std::string encode_png(const GrayImage& img) { return encode_png_raw(img.width, img.height, 1, img.data); }

void save_png(const std::string& path, const GrayImage& img) { write_file(path, encode_png(img)); }

void save_png(const std::string& path, const RgbImage& img) { write_file(path, encode_png(img)); }

void save_bmp(const std::string& path, const RgbImage& img) {
    std::size_t row_bytes = ((static_cast<std::size_t>(img.width) * 24 + 31) / 32) * 4;
    std::uint32_t data_size = static_cast<std::uint32_t>(row_bytes * img.height);
    std::string s;
    s += "BM";
    put_le32(s, 54 + data_size);
    put_le32(s, 0);
    put_le32(s, 54);
    put_le32(s, 40);
    put_le32(s, static_cast<std::uint32_t>(img.width));
    put_le32(s, static_cast<std::uint32_t>(img.height));
    put_le16(s, 1);
    put_le16(s, 24);
    put_le32(s, 0);
    put_le32(s, data_size);
    put_le32(s, 2835);
    put_le32(s, 2835);
    put_le32(s, 0);
    put_le32(s, 0);
    std::string row(row_bytes, '\0');
    for (int y = img.height - 1; y >= 0; --y) {
        std::fill(row.begin(), row.end(), '\0');
        for (int x = 0; x < img.width; ++x) {
            const auto* p = img.px(x, y);
            row[3 * x] = static_cast<char>(p[2]);
            row[3 * x + 1] = static_cast<char>(p[1]);
            row[3 * x + 2] = static_cast<char>(p[0]);
        }
        s += row;
    }
    write_file(path, s);
}

}  // namespace trussketch::raster
