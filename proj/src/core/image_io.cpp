#include "panosr/core/image_io.hpp"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <vector>

#include "panosr/core/image.hpp"

namespace panosr {

namespace {

inline unsigned quantize(double v, unsigned maxval) {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<unsigned>(std::lround(c * maxval));
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

Tensor read_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw std::runtime_error("read_png: cannot open " + path);

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("read_png: init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error("read_png: init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("read_png: decode failed for " + path);
  }

  png_init_io(png, fp.get());
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  int bit_depth = png_get_bit_depth(png, info);
  int color_type = png_get_color_type(png, info);

  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  if (bit_depth == 16) png_set_swap(png);  // wire format is big-endian
  png_read_update_info(png, info);

  bit_depth = png_get_bit_depth(png, info);
  const int channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("read_png: unsupported channel count");
  }

  const std::size_t stride = png_get_rowbytes(png, info);
  std::vector<unsigned char> rows(stride * h);
  std::vector<png_bytep> row_ptrs(h);
  for (png_uint_32 y = 0; y < h; ++y) row_ptrs[y] = rows.data() + y * stride;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  Tensor out({channels, static_cast<std::int64_t>(h),
              static_cast<std::int64_t>(w)});
  const double scale = bit_depth == 16 ? 1.0 / 65535.0 : 1.0 / 255.0;
  for (png_uint_32 y = 0; y < h; ++y) {
    const unsigned char* row = rows.data() + y * stride;
    for (png_uint_32 x = 0; x < w; ++x) {
      for (int c = 0; c < channels; ++c) {
        double v;
        if (bit_depth == 16) {
          const auto* p16 = reinterpret_cast<const std::uint16_t*>(row);
          v = p16[x * channels + c] * scale;
        } else {
          v = row[x * channels + c] * scale;
        }
        out.at(c, y, x) = v;
      }
    }
  }
  return out;
}

void write_png(const std::string& path, const Tensor& chw, int bit_depth) {
  require_chw(chw, "write_png");
  const auto channels = chw.dim(0);
  if (channels != 1 && channels != 3)
    throw std::invalid_argument("write_png: channels must be 1 or 3");
  if (bit_depth != 8 && bit_depth != 16)
    throw std::invalid_argument("write_png: bit depth must be 8 or 16");
  const auto h = chw.dim(1);
  const auto w = chw.dim(2);

  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("write_png: cannot open " + path);

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("write_png: init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("write_png: init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("write_png: encode failed for " + path);
  }

  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(w),
               static_cast<png_uint_32>(h), bit_depth,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  const unsigned maxval = bit_depth == 16 ? 65535u : 255u;
  const std::size_t bytes_per_px =
      static_cast<std::size_t>(channels) * (bit_depth / 8);
  std::vector<unsigned char> row(bytes_per_px * static_cast<std::size_t>(w));
  for (std::int64_t y = 0; y < h; ++y) {
    for (std::int64_t x = 0; x < w; ++x) {
      for (std::int64_t c = 0; c < channels; ++c) {
        const unsigned q = quantize(chw.at(c, y, x), maxval);
        if (bit_depth == 16) {
          // big-endian per the PNG spec
          row[(x * channels + c) * 2] = static_cast<unsigned char>(q >> 8);
          row[(x * channels + c) * 2 + 1] = static_cast<unsigned char>(q & 0xff);
        } else {
          row[x * channels + c] = static_cast<unsigned char>(q);
        }
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

namespace {

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  std::longjmp(mgr->jump, 1);
}

}  // namespace

Tensor jpeg_roundtrip_raster(const Tensor& chw, int quality) {
  require_chw(chw, "jpeg_roundtrip");
  if (quality < 1 || quality > 100)
    throw std::invalid_argument("jpeg_roundtrip: quality must be in [1,100]");
  const auto channels = chw.dim(0);
  if (channels != 1 && channels != 3)
    throw std::invalid_argument("jpeg_roundtrip: channels must be 1 or 3");
  const auto h = chw.dim(1);
  const auto w = chw.dim(2);

  // Pack to interleaved 8-bit.
  std::vector<unsigned char> raw(static_cast<std::size_t>(channels * h * w));
  for (std::int64_t y = 0; y < h; ++y)
    for (std::int64_t x = 0; x < w; ++x)
      for (std::int64_t c = 0; c < channels; ++c)
        raw[(y * w + x) * channels + c] =
            static_cast<unsigned char>(quantize(chw.at(c, y, x), 255u));

  // Encode.
  JpegErrorMgr err{};
  unsigned char* buf = nullptr;
  unsigned long buf_size = 0;
  {
    jpeg_compress_struct cinfo{};
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = jpeg_error_exit;
    if (setjmp(err.jump)) {
      jpeg_destroy_compress(&cinfo);
      if (buf) std::free(buf);
      throw std::runtime_error("jpeg_roundtrip: encode failed");
    }
    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, &buf, &buf_size);
    cinfo.image_width = static_cast<JDIMENSION>(w);
    cinfo.image_height = static_cast<JDIMENSION>(h);
    cinfo.input_components = static_cast<int>(channels);
    cinfo.in_color_space = channels == 1 ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    // 4:4:4; default chroma subsampling would dominate the error at high q
    for (int c = 0; c < cinfo.num_components; ++c) {
      cinfo.comp_info[c].h_samp_factor = 1;
      cinfo.comp_info[c].v_samp_factor = 1;
    }
    jpeg_start_compress(&cinfo, TRUE);
    while (cinfo.next_scanline < cinfo.image_height) {
      JSAMPROW row = raw.data() +
                     static_cast<std::size_t>(cinfo.next_scanline) * w * channels;
      jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
  }

  // Decode.
  Tensor out({channels, h, w});
  {
    jpeg_decompress_struct dinfo{};
    dinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = jpeg_error_exit;
    if (setjmp(err.jump)) {
      jpeg_destroy_decompress(&dinfo);
      std::free(buf);
      throw std::runtime_error("jpeg_roundtrip: decode failed");
    }
    jpeg_create_decompress(&dinfo);
    jpeg_mem_src(&dinfo, buf, buf_size);
    jpeg_read_header(&dinfo, TRUE);
    dinfo.out_color_space = channels == 1 ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_start_decompress(&dinfo);
    std::vector<unsigned char> row(static_cast<std::size_t>(w * channels));
    while (dinfo.output_scanline < dinfo.output_height) {
      const std::int64_t y = dinfo.output_scanline;
      JSAMPROW rp = row.data();
      jpeg_read_scanlines(&dinfo, &rp, 1);
      for (std::int64_t x = 0; x < w; ++x)
        for (std::int64_t c = 0; c < channels; ++c)
          out.at(c, y, x) = row[x * channels + c] / 255.0;
    }
    jpeg_finish_decompress(&dinfo);
    jpeg_destroy_decompress(&dinfo);
  }
  std::free(buf);
  return out;
}

}  // namespace panosr
