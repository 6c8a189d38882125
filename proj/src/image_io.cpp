#include "salfuse/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "salfuse/error.hpp"

namespace salfuse {

namespace fs = std::filesystem;

namespace {

std::string lower_ext(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

unsigned char to_byte(float v) {
  return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

RasterImage read_png(const fs::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open " + path.string());

  unsigned char sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw IoError(path.string() + ": not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng initialization failed");
  }
  std::vector<unsigned char> pixels;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(path.string() + ": corrupt PNG data");
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);

  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  pixels.resize(stride * height);
  rows.resize(height);
  for (png_uint_32 r = 0; r < height; ++r) rows[r] = pixels.data() + r * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (channels != 1 && channels != 3) {
    throw IoError(path.string() + ": unsupported PNG channel layout");
  }
  std::vector<float> data(static_cast<std::size_t>(width) * height * channels);
  for (png_uint_32 r = 0; r < height; ++r)
    for (std::size_t i = 0; i < static_cast<std::size_t>(width) * channels; ++i)
      data[r * static_cast<std::size_t>(width) * channels + i] = pixels[r * stride + i] / 255.0f;
  return RasterImage(static_cast<int>(height), static_cast<int>(width), channels,
                     std::move(data));
}

void write_png(const fs::path& path, const RasterImage& img) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng initialization failed");
  }
  const int channels = img.channels();
  std::vector<unsigned char> bytes(img.data().size());
  std::transform(img.data().begin(), img.data().end(), bytes.begin(), to_byte);
  std::vector<png_bytep> rows(img.height());
  for (int r = 0; r < img.height(); ++r)
    rows[r] = bytes.data() + static_cast<std::size_t>(r) * img.width() * channels;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, img.width(), img.height(), 8,
               channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string pnm_token(std::istream& in) {
  std::string tok;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string skip;
      std::getline(in, skip);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(c);
  }
  return tok;
}

RasterImage read_pnm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string magic = pnm_token(in);
  int channels = 0;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw IoError(path.string() + ": unsupported PNM variant '" + magic + "'");
  }
  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(pnm_token(in));
    height = std::stoi(pnm_token(in));
    maxval = std::stoi(pnm_token(in));
  } catch (const std::exception&) {
    throw IoError(path.string() + ": malformed PNM header");
  }
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255) {
    throw IoError(path.string() + ": unsupported PNM dimensions or maxval");
  }
  std::vector<unsigned char> bytes(static_cast<std::size_t>(width) * height * channels);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw IoError(path.string() + ": truncated PNM data");
  }
  std::vector<float> data(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i)
    data[i] = std::min(1.0f, static_cast<float>(bytes[i]) / static_cast<float>(maxval));
  return RasterImage(height, width, channels, std::move(data));
}

void write_pnm(const fs::path& path, const RasterImage& img, int channels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << (channels == 1 ? "P5" : "P6") << "\n"
      << img.width() << " " << img.height() << "\n255\n";
  std::vector<unsigned char> bytes;
  bytes.reserve(img.pixel_count() * channels);
  if (channels == img.channels()) {
    for (float v : img.data()) bytes.push_back(to_byte(v));
  } else if (channels == 1) {
    const GrayMap lum = rgb_to_luminance(img);
    for (double v : lum.data()) bytes.push_back(to_byte(static_cast<float>(v)));
  } else {
    for (float v : img.data())
      for (int k = 0; k < 3; ++k) bytes.push_back(to_byte(v));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

bool is_supported_image(const fs::path& path) {
  const std::string ext = lower_ext(path);
  return ext == ".png" || ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

RasterImage read_image(const fs::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return read_pnm(path);
  throw IoError(path.string() + ": unsupported image extension");
}

void write_image(const fs::path& path, const RasterImage& img) {
  if (img.channels() != 1 && img.channels() != 3) {
    throw InvalidInput("can only encode 1- or 3-channel images");
  }
  const std::string ext = lower_ext(path);
  if (ext == ".png") {
    write_png(path, img);
  } else if (ext == ".pgm") {
    write_pnm(path, img, 1);
  } else if (ext == ".ppm") {
    write_pnm(path, img, 3);
  } else if (ext == ".pnm") {
    write_pnm(path, img, img.channels());
  } else {
    throw IoError(path.string() + ": unsupported image extension");
  }
}

void write_map(const fs::path& path, const GrayMap& map) {
  write_image(path, to_raster(map));
}

}  // namespace salfuse
