#include "mixncut/image.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "mixncut/error.hpp"

namespace mixncut {

AppearanceImage::AppearanceImage(std::size_t width, std::size_t height,
                                 std::size_t dim, std::vector<double> data)
    : width_(width), height_(height), dim_(dim), data_(std::move(data)) {
  require(width_ >= 1 && height_ >= 1, Errc::zero_size_image,
          "image width and height must be at least 1");
  require(dim_ >= 1, Errc::invalid_argument, "appearance dimension must be >= 1");
  require(data_.size() == width_ * height_ * dim_, Errc::size_mismatch,
          "image data length must equal width * height * dim");
}

AppearanceImage AppearanceImage::filled(std::size_t width, std::size_t height,
                                        std::size_t dim, double value) {
  return AppearanceImage(width, height, dim,
                         std::vector<double>(width * height * dim, value));
}

double AppearanceImage::squared_distance(std::size_t i,
                                         std::size_t j) const noexcept {
  const double* a = data_.data() + i * dim_;
  const double* b = data_.data() + j * dim_;
  double sum = 0.0;
  for (std::size_t c = 0; c < dim_; ++c) {
    const double d = a[c] - b[c];
    sum += d * d;
  }
  return sum;
}

PixelLocation index_to_location(std::size_t j, std::size_t width,
                                std::size_t height) {
  require(j < width * height, Errc::out_of_range, "pixel index out of range");
  return {j / width, j % width};
}

PixelLocation index_to_location(std::size_t j, const AppearanceImage& image) {
  return index_to_location(j, image.width(), image.height());
}

std::size_t location_to_index(PixelLocation loc, std::size_t width,
                              std::size_t height) {
  require(loc.row < height && loc.col < width, Errc::out_of_range,
          "pixel location out of range");
  return loc.row * width + loc.col;
}

std::size_t location_to_index(PixelLocation loc, const AppearanceImage& image) {
  return location_to_index(loc, image.width(), image.height());
}

// ---------------------------------------------------------------------------
// Reading

namespace {

std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::unreadable_file, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) fail(Errc::unreadable_file, "cannot read " + path.string());
  return bytes;
}

class PnmReader {
 public:
  PnmReader(const std::vector<unsigned char>& bytes, std::string name)
      : bytes_(bytes), name_(std::move(name)) {}

  AppearanceImage read() {
    const char kind = static_cast<char>(bytes_[1]);
    pos_ = 2;
    const bool ascii = kind == '2' || kind == '3';
    const std::size_t dim = (kind == '3' || kind == '6') ? 3 : 1;
    const unsigned long width = header_number();
    const unsigned long height = header_number();
    const unsigned long maxval = header_number();
    if (width == 0 || height == 0)
      fail(Errc::zero_size_image, name_ + ": zero-size image");
    if (maxval == 0 || maxval > 65535)
      fail(Errc::malformed_image, name_ + ": bad maxval");
    if (!ascii) {
      if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
        fail(Errc::malformed_image, name_ + ": missing raster separator");
      ++pos_;
    }
    const std::size_t count = width * height * dim;
    const double scale = 255.0 / static_cast<double>(maxval);
    std::vector<double> data(count);
    for (std::size_t k = 0; k < count; ++k) {
      unsigned long v;
      if (ascii) {
        v = header_number();
      } else if (maxval < 256) {
        if (pos_ >= bytes_.size())
          fail(Errc::malformed_image, name_ + ": truncated raster");
        v = bytes_[pos_++];
      } else {
        if (pos_ + 1 >= bytes_.size())
          fail(Errc::malformed_image, name_ + ": truncated raster");
        v = (static_cast<unsigned long>(bytes_[pos_]) << 8) | bytes_[pos_ + 1];
        pos_ += 2;
      }
      if (v > maxval) fail(Errc::malformed_image, name_ + ": sample > maxval");
      data[k] = maxval == 255 ? static_cast<double>(v)
                              : static_cast<double>(v) * scale;
    }
    return AppearanceImage(width, height, dim, std::move(data));
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  unsigned long header_number() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_]))
      fail(Errc::malformed_image, name_ + ": expected a number");
    unsigned long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > std::numeric_limits<std::uint32_t>::max())
        fail(Errc::malformed_image, name_ + ": number too large");
      ++pos_;
    }
    return v;
  }

  const std::vector<unsigned char>& bytes_;
  std::string name_;
  std::size_t pos_ = 0;
};

struct PngSource {
  const std::vector<unsigned char>* bytes;
  std::size_t offset;
};

void png_read_memory(png_structp png, png_bytep out, png_size_t count) {
  auto* src = static_cast<PngSource*>(png_get_io_ptr(png));
  if (src->offset + count > src->bytes->size())
    png_error(png, "unexpected end of file");
  std::memcpy(out, src->bytes->data() + src->offset, count);
  src->offset += count;
}

void png_raise(png_structp png, png_const_charp message) {
  *static_cast<std::string*>(png_get_error_ptr(png)) = message;
  png_longjmp(png, 1);
}

void png_quiet(png_structp, png_const_charp) {}

// Low-level reader: palettes and sub-byte depths are expanded, alpha is
// stripped without compositing, 16-bit samples are scaled exactly to
// [0, 255], and no gamma conversion is applied.
AppearanceImage read_png(const std::vector<unsigned char>& bytes,
                         const std::string& name) {
  std::string error;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error,
                                           png_raise, png_quiet);
  if (!png) fail(Errc::malformed_image, name + ": libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  PngSource src{&bytes, 0};
  // Everything with a destructor lives outside the setjmp region.
  std::vector<double> data;
  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;
  png_uint_32 width = 0, height = 0;
  volatile std::size_t dim = 1;
  volatile bool zero_size = false;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(Errc::malformed_image, name + ": " + error);
  }
  png_set_read_fn(png, &src, png_read_memory);
  png_read_info(png, info);
  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  if (width == 0 || height == 0) {
    zero_size = true;
  } else {
    const int color_type = png_get_color_type(png, info);
    png_set_expand(png);
    png_set_strip_alpha(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);
    const int channels = png_get_channels(png, info);
    const int depth = png_get_bit_depth(png, info);
    dim = static_cast<std::size_t>(channels);
    const std::size_t row_bytes = png_get_rowbytes(png, info);
    buffer.resize(row_bytes * height);
    rows.resize(height);
    for (png_uint_32 r = 0; r < height; ++r) rows[r] = buffer.data() + r * row_bytes;
    png_read_image(png, rows.data());
    const std::size_t count = std::size_t{width} * height * dim;
    data.resize(count);
    if (depth == 16) {
      for (std::size_t k = 0; k < count; ++k) {
        const unsigned v = (unsigned{buffer[2 * k]} << 8) | buffer[2 * k + 1];
        data[k] = v * 255.0 / 65535.0;
      }
    } else {
      for (std::size_t k = 0; k < count; ++k) data[k] = buffer[k];
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (zero_size) fail(Errc::zero_size_image, name + ": zero-size image");
  require(dim == 1 || dim == 3, Errc::unsupported_format,
          name + ": unexpected PNG channel layout");
  return AppearanceImage(width, height, dim, std::move(data));
}

}  // namespace

AppearanceImage load_image(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  const std::string name = path.string();
  static constexpr std::array<unsigned char, 8> kPngMagic{
      0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= kPngMagic.size() &&
      std::equal(kPngMagic.begin(), kPngMagic.end(), bytes.begin()))
    return read_png(bytes, name);
  if (bytes.size() >= 2 && bytes[0] == 'P' &&
      (bytes[1] == '2' || bytes[1] == '3' || bytes[1] == '5' ||
       bytes[1] == '6'))
    return PnmReader(bytes, name).read();
  fail(Errc::unsupported_format, name + ": not a PGM/PPM/PNG file");
}

// ---------------------------------------------------------------------------
// Writing

Raster8 to_raster(const AppearanceImage& image) {
  require(image.dim() == 1 || image.dim() == 3, Errc::invalid_argument,
          "only dim 1 or dim 3 images can be rasterized");
  Raster8 r{image.width(), image.height(), image.dim(), {}};
  r.pixels.resize(image.data().size());
  std::transform(image.data().begin(), image.data().end(), r.pixels.begin(),
                 [](double v) {
                   return static_cast<std::uint8_t>(
                       std::clamp(std::lround(v), 0L, 255L));
                 });
  return r;
}

void save_png(const std::filesystem::path& path, const Raster8& raster) {
  require(raster.channels == 1 || raster.channels == 3, Errc::invalid_argument,
          "PNG output supports 1 or 3 channels");
  require(raster.pixels.size() ==
              raster.width * raster.height * raster.channels,
          Errc::size_mismatch, "raster size mismatch");
  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(raster.width);
  png.height = static_cast<png_uint_32>(raster.height);
  png.format = raster.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&png, path.string().c_str(), 0,
                               raster.pixels.data(), 0, nullptr))
    fail(Errc::write_failed, path.string() + ": " + png.message);
}

void save_png(const std::filesystem::path& path, const AppearanceImage& image) {
  save_png(path, to_raster(image));
}

void save_pnm(const std::filesystem::path& path, const AppearanceImage& image) {
  const Raster8 r = to_raster(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::write_failed, "cannot open " + path.string());
  out << (r.channels == 3 ? "P6" : "P5") << '\n'
      << r.width << ' ' << r.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(r.pixels.data()),
            static_cast<std::streamsize>(r.pixels.size()));
  if (!out) fail(Errc::write_failed, "cannot write " + path.string());
}

Raster8 render_scalar_field(std::span<const double> values, std::size_t width,
                            std::size_t height) {
  require(values.size() == width * height, Errc::size_mismatch,
          "field size must equal width * height");
  Raster8 r{width, height, 1, std::vector<std::uint8_t>(values.size(), 0)};
  if (values.empty()) return r;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return r;
  for (std::size_t k = 0; k < values.size(); ++k)
    r.pixels[k] = static_cast<std::uint8_t>(
        std::lround(255.0 * (values[k] - *lo) / range));
  return r;
}

AppearanceImage to_grayscale(const AppearanceImage& image) {
  if (image.dim() == 1) return image;
  std::vector<double> gray(image.pixel_count());
  for (std::size_t j = 0; j < gray.size(); ++j) {
    double sum = 0.0;
    for (double v : image.pixel(j)) sum += v;
    gray[j] = sum / static_cast<double>(image.dim());
  }
  return AppearanceImage(image.width(), image.height(), 1, std::move(gray));
}

}  // namespace mixncut
