#include "rocap/image.hpp"

#include <zlib.h>

#include <array>
#include <cstring>
#include <fstream>

namespace rocap {

namespace {

void check_dims(int width, int height, int channels) {
  if (width <= 0 || height <= 0 || (channels != 1 && channels != 3)) {
    throw DataError("image must have positive size and 1 or 3 channels");
  }
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) {
    throw IoError("write failed for " + path.string());
  }
}

// ---- PNM (P5/P6) ----

void write_pnm(const Image& img, const std::filesystem::path& path) {
  std::string header = (img.channels == 3 ? "P6\n" : "P5\n") + std::to_string(img.width) + " " +
                       std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> buf(header.begin(), header.end());
  buf.insert(buf.end(), img.data.begin(), img.data.end());
  write_file(path, buf.data(), buf.size());
}

Image read_pnm(const std::vector<std::uint8_t>& bytes) {
  std::size_t pos = 2;
  const int channels = bytes[1] == '6' ? 3 : 1;
  auto next_int = [&]() {
    while (pos < bytes.size() && (std::isspace(bytes[pos]) || bytes[pos] == '#')) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        ++pos;
      }
    }
    int v = 0;
    bool any = false;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos] - '0');
      ++pos;
      any = true;
    }
    if (!any) {
      throw DataError("malformed PNM header");
    }
    return v;
  };
  Image img;
  img.channels = channels;
  img.width = next_int();
  img.height = next_int();
  const int maxval = next_int();
  if (maxval != 255) {
    throw DataError("only 8-bit PNM is supported");
  }
  ++pos;  // single whitespace after maxval
  check_dims(img.width, img.height, channels);
  const std::size_t need = img.pixel_count() * static_cast<std::size_t>(channels);
  if (bytes.size() < pos + need) {
    throw DataError("PNM payload truncated");
  }
  img.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                  bytes.begin() + static_cast<std::ptrdiff_t>(pos + need));
  return img;
}

// ---- PNG (8-bit gray / RGB, non-interlaced) ----

void push_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) |
         std::uint32_t(p[3]);
}

void push_chunk(std::vector<std::uint8_t>& out, const char type[4],
                const std::vector<std::uint8_t>& payload) {
  push_u32(out, static_cast<std::uint32_t>(payload.size()));
  const std::size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), payload.begin(), payload.end());
  const auto crc = crc32(0L, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start));
  push_u32(out, static_cast<std::uint32_t>(crc));
}

void write_png(const Image& img, const std::filesystem::path& path) {
  const std::size_t stride = static_cast<std::size_t>(img.width) * img.channels;
  std::vector<std::uint8_t> raw;
  raw.reserve((stride + 1) * static_cast<std::size_t>(img.height));
  for (int y = 0; y < img.height; ++y) {
    raw.push_back(0);  // filter: none
    const std::uint8_t* row = img.data.data() + static_cast<std::size_t>(y) * stride;
    raw.insert(raw.end(), row, row + stride);
  }

  uLongf comp_size = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> comp(comp_size);
  if (compress2(comp.data(), &comp_size, raw.data(), static_cast<uLong>(raw.size()),
                Z_DEFAULT_COMPRESSION) != Z_OK) {
    throw IoError("zlib compression failed");
  }
  comp.resize(comp_size);

  std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<std::uint8_t> ihdr;
  push_u32(ihdr, static_cast<std::uint32_t>(img.width));
  push_u32(ihdr, static_cast<std::uint32_t>(img.height));
  ihdr.push_back(8);                                   // bit depth
  ihdr.push_back(img.channels == 3 ? 2 : 0);           // color type
  ihdr.push_back(0);                                   // compression
  ihdr.push_back(0);                                   // filter
  ihdr.push_back(0);                                   // interlace
  push_chunk(out, "IHDR", ihdr);
  push_chunk(out, "IDAT", comp);
  push_chunk(out, "IEND", {});
  write_file(path, out.data(), out.size());
}

int paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

Image read_png(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8 + 25) {
    throw DataError("PNG file truncated");
  }
  std::size_t pos = 8;
  Image img;
  int bpp = 0;  // bytes per pixel
  std::vector<std::uint8_t> idat;
  bool saw_ihdr = false;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t len = get_u32(&bytes[pos]);
    if (pos + 12 + len > bytes.size()) {
      throw DataError("PNG chunk truncated");
    }
    const char* type = reinterpret_cast<const char*>(&bytes[pos + 4]);
    const std::uint8_t* payload = &bytes[pos + 8];
    if (std::memcmp(type, "IHDR", 4) == 0) {
      img.width = static_cast<int>(get_u32(payload));
      img.height = static_cast<int>(get_u32(payload + 4));
      const int depth = payload[8], color = payload[9], interlace = payload[12];
      if (depth != 8 || (color != 0 && color != 2) || interlace != 0) {
        throw DataError("unsupported PNG variant (need 8-bit gray/RGB, non-interlaced)");
      }
      img.channels = color == 2 ? 3 : 1;
      bpp = img.channels;
      saw_ihdr = true;
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), payload, payload + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      break;
    }
    pos += 12 + len;
  }
  if (!saw_ihdr || idat.empty()) {
    throw DataError("PNG missing IHDR or IDAT");
  }
  check_dims(img.width, img.height, img.channels);

  const std::size_t stride = static_cast<std::size_t>(img.width) * bpp;
  std::vector<std::uint8_t> raw((stride + 1) * static_cast<std::size_t>(img.height));
  uLongf raw_size = static_cast<uLongf>(raw.size());
  if (uncompress(raw.data(), &raw_size, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
      raw_size != raw.size()) {
    throw DataError("PNG inflate failed");
  }

  img.data.resize(stride * static_cast<std::size_t>(img.height));
  for (int y = 0; y < img.height; ++y) {
    const std::uint8_t filter = raw[static_cast<std::size_t>(y) * (stride + 1)];
    const std::uint8_t* src = &raw[static_cast<std::size_t>(y) * (stride + 1) + 1];
    std::uint8_t* dst = &img.data[static_cast<std::size_t>(y) * stride];
    const std::uint8_t* prev = y > 0 ? &img.data[static_cast<std::size_t>(y - 1) * stride] : nullptr;
    for (std::size_t x = 0; x < stride; ++x) {
      const int a = x >= static_cast<std::size_t>(bpp) ? dst[x - bpp] : 0;
      const int b = prev ? prev[x] : 0;
      const int c = (prev && x >= static_cast<std::size_t>(bpp)) ? prev[x - bpp] : 0;
      int v = src[x];
      switch (filter) {
        case 0: break;
        case 1: v += a; break;
        case 2: v += b; break;
        case 3: v += (a + b) / 2; break;
        case 4: v += paeth(a, b, c); break;
        default: throw DataError("unknown PNG filter type");
      }
      dst[x] = static_cast<std::uint8_t>(v & 0xff);
    }
  }
  return img;
}

}  // namespace

Image Image::rgb(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  check_dims(width, height, 3);
  Image img;
  img.width = width;
  img.height = height;
  img.channels = 3;
  img.data.resize(img.pixel_count() * 3);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    img.data[i * 3] = r;
    img.data[i * 3 + 1] = g;
    img.data[i * 3 + 2] = b;
  }
  return img;
}

Image Image::gray(int width, int height, std::uint8_t value) {
  check_dims(width, height, 1);
  Image img;
  img.width = width;
  img.height = height;
  img.channels = 1;
  img.data.assign(img.pixel_count(), value);
  return img;
}

void write_image(const Image& img, const std::filesystem::path& path) {
  check_dims(img.width, img.height, img.channels);
  if (img.data.size() != img.pixel_count() * static_cast<std::size_t>(img.channels)) {
    throw DataError("image buffer size does not match dimensions");
  }
  const std::string ext = path.extension().string();
  if (ext == ".png") {
    write_png(img, path);
  } else if (ext == ".ppm") {
    if (img.channels != 3) {
      throw DataError("PPM requires an RGB image");
    }
    write_pnm(img, path);
  } else if (ext == ".pgm") {
    if (img.channels != 1) {
      throw DataError("PGM requires a grayscale image");
    }
    write_pnm(img, path);
  } else {
    throw DataError("unsupported image extension '" + ext + "' (use .ppm/.pgm/.png)");
  }
}

Image read_image(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  if (bytes.size() >= 8 && bytes[0] == 0x89 && bytes[1] == 'P') {
    return read_png(bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
    return read_pnm(bytes);
  }
  throw DataError("unrecognized image format in " + path.string());
}

}  // namespace rocap
