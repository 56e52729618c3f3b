// Copyright 2026 The gbatlas Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "gba/io/raster_io.hpp"

#include <tiffio.h>

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <limits>
#include <memory>
#include <mutex>
#include <string>

#include <fmt/format.h>

#include "gba/error.hpp"

namespace gba::io {

namespace {

constexpr ttag_t kTagPixelScale = 33550;
constexpr ttag_t kTagTiepoint = 33922;
constexpr ttag_t kTagGeoKeys = 34735;
constexpr ttag_t kTagGdalNodata = 42113;

char kNameScale[] = "ModelPixelScaleTag";
char kNameTiepoint[] = "ModelTiepointTag";
char kNameGeoKeys[] = "GeoKeyDirectoryTag";
char kNameNodata[] = "GDALNoDataValue";

const TIFFFieldInfo kGeoFields[] = {
    {kTagPixelScale, TIFF_VARIABLE, TIFF_VARIABLE, TIFF_DOUBLE, FIELD_CUSTOM, 1, 1,
     kNameScale},
    {kTagTiepoint, TIFF_VARIABLE, TIFF_VARIABLE, TIFF_DOUBLE, FIELD_CUSTOM, 1, 1,
     kNameTiepoint},
    {kTagGeoKeys, TIFF_VARIABLE, TIFF_VARIABLE, TIFF_SHORT, FIELD_CUSTOM, 1, 1,
     kNameGeoKeys},
    {kTagGdalNodata, -1, -1, TIFF_ASCII, FIELD_CUSTOM, 1, 0, kNameNodata},
};

TIFFExtendProc g_parent_extender = nullptr;
thread_local std::string t_last_error;

void extend_tags(TIFF* tif) {
  TIFFMergeFieldInfo(tif, kGeoFields, sizeof(kGeoFields) / sizeof(kGeoFields[0]));
  if (g_parent_extender) g_parent_extender(tif);
}

void on_error(const char* module, const char* fmt_str, va_list ap) {
  char buf[512];
  std::vsnprintf(buf, sizeof(buf), fmt_str, ap);
  t_last_error = module ? std::string(module) + ": " + buf : std::string(buf);
}

void on_warning(const char*, const char*, va_list) {}

void init_libtiff() {
  static std::once_flag once;
  std::call_once(once, [] {
    g_parent_extender = TIFFSetTagExtender(extend_tags);
    TIFFSetErrorHandler(on_error);
    TIFFSetWarningHandler(on_warning);
  });
}

struct TiffCloser {
  void operator()(TIFF* t) const { TIFFClose(t); }
};
using TiffPtr = std::unique_ptr<TIFF, TiffCloser>;

TiffPtr open_tiff(const std::filesystem::path& path, const char* mode) {
  init_libtiff();
  t_last_error.clear();
  TIFF* t = TIFFOpen(path.string().c_str(), mode);
  if (!t) {
    throw IoError(fmt::format("cannot open {}: {}", path.string(),
                              t_last_error.empty() ? "unknown error" : t_last_error));
  }
  return TiffPtr(t);
}

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
  throw IoError(fmt::format("{}: {}{}", path.string(), what,
                            t_last_error.empty() ? "" : " (" + t_last_error + ")"));
}

struct TypeInfo {
  int bits;
  int format;  // SAMPLEFORMAT_*
};

TypeInfo type_info(SampleType t) {
  switch (t) {
    case SampleType::UInt8: return {8, SAMPLEFORMAT_UINT};
    case SampleType::Int16: return {16, SAMPLEFORMAT_INT};
    case SampleType::UInt16: return {16, SAMPLEFORMAT_UINT};
    case SampleType::Int32: return {32, SAMPLEFORMAT_INT};
    case SampleType::Float32: return {32, SAMPLEFORMAT_IEEEFP};
    case SampleType::Float64: return {64, SAMPLEFORMAT_IEEEFP};
  }
  return {64, SAMPLEFORMAT_IEEEFP};
}

std::optional<SampleType> sample_type_of(int bits, int format) {
  for (SampleType t : {SampleType::UInt8, SampleType::Int16, SampleType::UInt16,
                       SampleType::Int32, SampleType::Float32, SampleType::Float64}) {
    const TypeInfo i = type_info(t);
    if (i.bits == bits && i.format == format) return t;
  }
  return std::nullopt;
}

template <typename T>
bool representable(double v) {
  if constexpr (std::is_floating_point_v<T>) {
    if (std::isnan(v) || std::isinf(v)) return true;
    return std::abs(v) <= static_cast<double>(std::numeric_limits<T>::max());
  } else {
    return std::isfinite(v) && v == std::trunc(v) &&
           v >= static_cast<double>(std::numeric_limits<T>::lowest()) &&
           v <= static_cast<double>(std::numeric_limits<T>::max());
  }
}

template <typename T>
void pack(const RasterGrid& band, int tx, int ty, int ts, std::vector<unsigned char>& buf) {
  buf.assign(static_cast<std::size_t>(ts) * ts * sizeof(T), 0);
  auto* out = reinterpret_cast<T*>(buf.data());
  const T fill = representable<T>(band.nodata()) ? static_cast<T>(band.nodata()) : T{};
  for (int r = 0; r < ts; ++r) {
    for (int c = 0; c < ts; ++c) {
      const int row = ty + r;
      const int col = tx + c;
      out[static_cast<std::size_t>(r) * ts + c] =
          (row < band.height() && col < band.width()) ? static_cast<T>(band.at(row, col))
                                                      : fill;
    }
  }
}

template <typename T>
void check_band(const RasterGrid& band, const std::filesystem::path& path) {
  if (!representable<T>(band.nodata())) {
    throw ValidationError(fmt::format("{}: nodata {} does not fit the sample type",
                                      path.string(), band.nodata()));
  }
  for (double v : band.values()) {
    if (!representable<T>(v)) {
      throw ValidationError(
          fmt::format("{}: value {} does not fit the sample type", path.string(), v));
    }
  }
}

template <typename F>
void dispatch(SampleType t, F&& f) {
  switch (t) {
    case SampleType::UInt8: f(std::uint8_t{}); break;
    case SampleType::Int16: f(std::int16_t{}); break;
    case SampleType::UInt16: f(std::uint16_t{}); break;
    case SampleType::Int32: f(std::int32_t{}); break;
    case SampleType::Float32: f(float{}); break;
    case SampleType::Float64: f(double{}); break;
  }
}

std::string format_nodata(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{}", v);
}

double parse_nodata(const char* s) {
  std::string t(s);
  t.erase(std::remove_if(t.begin(), t.end(), [](unsigned char c) { return std::isspace(c); }),
          t.end());
  if (t == "nan" || t == "NaN" || t == "NAN") return std::numeric_limits<double>::quiet_NaN();
  try {
    return std::stod(t);
  } catch (const std::exception&) {
    throw IoError("unparseable nodata value '" + t + "'");
  }
}

// "gba:semantic=HeightMeters;crs=Planar"
std::string describe(const RasterGrid& r) {
  return fmt::format("gba:semantic={};crs={}", to_string(r.semantic()),
                     to_string(r.spec().crs));
}

std::optional<std::string> description_value(const std::string& desc, const std::string& key) {
  if (desc.rfind("gba:", 0) != 0) return std::nullopt;
  std::size_t pos = 4;
  while (pos <= desc.size()) {
    std::size_t end = desc.find(';', pos);
    if (end == std::string::npos) end = desc.size();
    const std::string item = desc.substr(pos, end - pos);
    const auto eq = item.find('=');
    if (eq != std::string::npos && item.substr(0, eq) == key) return item.substr(eq + 1);
    pos = end + 1;
  }
  return std::nullopt;
}

}  // namespace

SampleType default_sample_type(Semantic s) {
  return (s == Semantic::BinaryMask || s == Semantic::LandCoverClass) ? SampleType::UInt8
                                                                      : SampleType::Float64;
}

void write_raster(const std::filesystem::path& path, const RasterGrid& raster,
                  const RasterWriteOptions& opts) {
  write_raster_bands(path, std::span<const RasterGrid>(&raster, 1), opts);
}

void write_raster_bands(const std::filesystem::path& path, std::span<const RasterGrid> bands,
                        const RasterWriteOptions& opts) {
  if (bands.empty()) throw ValidationError("no bands to write");
  if (opts.tile_size < 16 || opts.tile_size % 16 != 0) {
    throw ValidationError("tile size must be a positive multiple of 16");
  }
  const RasterGrid& first = bands.front();
  for (const RasterGrid& b : bands) {
    if (!(b.spec() == first.spec()) || b.semantic() != first.semantic() ||
        !(b.nodata() == first.nodata() || (std::isnan(b.nodata()) && std::isnan(first.nodata())))) {
      throw GridMismatch("bands differ in grid, semantic or nodata");
    }
  }
  const SampleType st = opts.sample_type.value_or(default_sample_type(first.semantic()));
  for (const RasterGrid& b : bands) {
    dispatch(st, [&](auto tag) { check_band<decltype(tag)>(b, path); });
  }

  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  TiffPtr tif = open_tiff(path, "w");
  TIFF* t = tif.get();
  const GridSpec& g = first.spec();
  const TypeInfo ti = type_info(st);
  const auto nbands = static_cast<std::uint16_t>(bands.size());
  TIFFSetField(t, TIFFTAG_IMAGEWIDTH, static_cast<std::uint32_t>(g.width));
  TIFFSetField(t, TIFFTAG_IMAGELENGTH, static_cast<std::uint32_t>(g.height));
  TIFFSetField(t, TIFFTAG_SAMPLESPERPIXEL, nbands);
  TIFFSetField(t, TIFFTAG_BITSPERSAMPLE, static_cast<std::uint16_t>(ti.bits));
  TIFFSetField(t, TIFFTAG_SAMPLEFORMAT, static_cast<std::uint16_t>(ti.format));
  TIFFSetField(t, TIFFTAG_PLANARCONFIG, PLANARCONFIG_SEPARATE);
  TIFFSetField(t, TIFFTAG_PHOTOMETRIC, PHOTOMETRIC_MINISBLACK);
  if (nbands > 1) {
    std::vector<std::uint16_t> extra(nbands - 1, EXTRASAMPLE_UNSPECIFIED);
    TIFFSetField(t, TIFFTAG_EXTRASAMPLES, static_cast<std::uint16_t>(extra.size()),
                 extra.data());
  }
  TIFFSetField(t, TIFFTAG_COMPRESSION, opts.compression == Compression::Deflate
                                           ? COMPRESSION_ADOBE_DEFLATE
                                           : COMPRESSION_NONE);
  if (opts.compression == Compression::Deflate) {
    TIFFSetField(t, TIFFTAG_PREDICTOR, PREDICTOR_NONE);
  }
  TIFFSetField(t, TIFFTAG_TILEWIDTH, static_cast<std::uint32_t>(opts.tile_size));
  TIFFSetField(t, TIFFTAG_TILELENGTH, static_cast<std::uint32_t>(opts.tile_size));
  const std::string desc = describe(first);
  TIFFSetField(t, TIFFTAG_IMAGEDESCRIPTION, desc.c_str());

  double scale[3] = {g.pixel_w, g.pixel_h, 0.0};
  double tie[6] = {0.0, 0.0, 0.0, g.origin_x, g.origin_y, 0.0};
  TIFFSetField(t, kTagPixelScale, 3, scale);
  TIFFSetField(t, kTagTiepoint, 6, tie);
  std::vector<std::uint16_t> keys = {1, 1, 0, 0};
  auto key = [&](std::uint16_t id, std::uint16_t value) {
    keys.insert(keys.end(), {id, 0, 1, value});
    ++keys[3];
  };
  if (g.crs == Crs::Geographic) {
    key(1024, 2);     // GTModelType: geographic
    key(1025, 1);     // GTRasterType: pixel is area
    key(2048, 4326);  // GeographicType: WGS 84
  } else {
    key(1024, 1);      // projected
    key(1025, 1);
    key(3072, 32767);  // user-defined projection
  }
  TIFFSetField(t, kTagGeoKeys, static_cast<std::uint16_t>(keys.size()), keys.data());
  const std::string nodata = format_nodata(first.nodata());
  TIFFSetField(t, kTagGdalNodata, nodata.c_str());

  std::vector<unsigned char> buf;
  const int ts = opts.tile_size;
  for (std::uint16_t s = 0; s < nbands; ++s) {
    for (int ty = 0; ty < g.height; ty += ts) {
      for (int tx = 0; tx < g.width; tx += ts) {
        dispatch(st, [&](auto tag) { pack<decltype(tag)>(bands[s], tx, ty, ts, buf); });
        if (TIFFWriteTile(t, buf.data(), static_cast<std::uint32_t>(tx),
                          static_cast<std::uint32_t>(ty), 0, s) < 0) {
          fail(path, "tile write failed");
        }
      }
    }
  }
  if (!TIFFWriteDirectory(t)) fail(path, "directory write failed");
}

namespace {

template <typename T>
void unpack(const unsigned char* data, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    T v;
    std::memcpy(&v, data + i * sizeof(T), sizeof(T));
    out[i] = static_cast<double>(v);
  }
}

void unpack_any(SampleType st, const unsigned char* data, std::size_t n, double* out) {
  dispatch(st, [&](auto tag) { unpack<decltype(tag)>(data, n, out); });
}

}  // namespace

std::vector<RasterGrid> read_raster_bands(const std::filesystem::path& path,
                                          std::optional<Semantic> semantic) {
  TiffPtr tif = open_tiff(path, "r");
  TIFF* t = tif.get();
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint16_t spp = 1;
  std::uint16_t bits = 8;
  std::uint16_t format = SAMPLEFORMAT_UINT;
  std::uint16_t planar = PLANARCONFIG_CONTIG;
  TIFFGetField(t, TIFFTAG_IMAGEWIDTH, &width);
  TIFFGetField(t, TIFFTAG_IMAGELENGTH, &height);
  TIFFGetFieldDefaulted(t, TIFFTAG_SAMPLESPERPIXEL, &spp);
  TIFFGetFieldDefaulted(t, TIFFTAG_BITSPERSAMPLE, &bits);
  TIFFGetFieldDefaulted(t, TIFFTAG_SAMPLEFORMAT, &format);
  TIFFGetFieldDefaulted(t, TIFFTAG_PLANARCONFIG, &planar);
  const auto st = sample_type_of(bits, format);
  if (!st) fail(path, fmt::format("unsupported sample layout ({} bits, format {})", bits, format));
  if (width == 0 || height == 0 || spp == 0) fail(path, "empty image");

  std::uint16_t n_scale = 0;
  double* scale = nullptr;
  std::uint16_t n_tie = 0;
  double* tie = nullptr;
  if (!TIFFGetField(t, kTagPixelScale, &n_scale, &scale) || n_scale < 2 ||
      !TIFFGetField(t, kTagTiepoint, &n_tie, &tie) || n_tie < 6) {
    fail(path, "missing georeferencing (pixel scale / tiepoint)");
  }
  GridSpec spec;
  spec.pixel_w = scale[0];
  spec.pixel_h = scale[1];
  spec.origin_x = tie[3] - tie[0] * scale[0];
  spec.origin_y = tie[4] + tie[1] * scale[1];
  spec.width = static_cast<int>(width);
  spec.height = static_cast<int>(height);

  std::string desc;
  char* d = nullptr;
  if (TIFFGetField(t, TIFFTAG_IMAGEDESCRIPTION, &d) && d) desc = d;
  if (auto c = description_value(desc, "crs")) {
    spec.crs = crs_from_string(*c);
  } else {
    std::uint16_t n_keys = 0;
    std::uint16_t* keys = nullptr;
    spec.crs = Crs::Planar;
    if (TIFFGetField(t, kTagGeoKeys, &n_keys, &keys) && n_keys >= 4) {
      for (std::size_t k = 0; k < keys[3] && 4 * k + 7 < n_keys; ++k) {
        const std::uint16_t* e = keys + 4 * (k + 1);
        if (e[0] == 1024 && e[1] == 0 && e[3] == 2) spec.crs = Crs::Geographic;
      }
    }
  }
  try {
    spec.validate();
  } catch (const ValidationError& e) {
    fail(path, e.what());
  }
  Semantic sem = Semantic::HeightMeters;
  if (semantic) {
    sem = *semantic;
  } else if (auto s = description_value(desc, "semantic")) {
    sem = semantic_from_string(*s);
  }
  double nodata = 0.0;
  char* nd = nullptr;
  if (TIFFGetField(t, kTagGdalNodata, &nd) && nd) nodata = parse_nodata(nd);

  std::vector<std::vector<double>> vals(spp, std::vector<double>(spec.size()));
  if (TIFFIsTiled(t)) {
    std::uint32_t tw = 0;
    std::uint32_t th = 0;
    TIFFGetField(t, TIFFTAG_TILEWIDTH, &tw);
    TIFFGetField(t, TIFFTAG_TILELENGTH, &th);
    std::vector<unsigned char> buf(static_cast<std::size_t>(TIFFTileSize(t)));
    std::vector<double> conv;
    const std::uint16_t planes = planar == PLANARCONFIG_SEPARATE ? spp : 1;
    const std::size_t per_px = planar == PLANARCONFIG_SEPARATE ? 1 : spp;
    for (std::uint16_t s = 0; s < planes; ++s) {
      for (std::uint32_t ty = 0; ty < height; ty += th) {
        for (std::uint32_t tx = 0; tx < width; tx += tw) {
          if (TIFFReadTile(t, buf.data(), tx, ty, 0, s) < 0) fail(path, "tile read failed");
          conv.resize(static_cast<std::size_t>(tw) * th * per_px);
          unpack_any(*st, buf.data(), conv.size(), conv.data());
          for (std::uint32_t r = 0; r < th && ty + r < height; ++r) {
            for (std::uint32_t c = 0; c < tw && tx + c < width; ++c) {
              const std::size_t dst = static_cast<std::size_t>(ty + r) * width + tx + c;
              const std::size_t src = (static_cast<std::size_t>(r) * tw + c) * per_px;
              for (std::size_t b = 0; b < per_px; ++b) vals[s + b][dst] = conv[src + b];
            }
          }
        }
      }
    }
  } else {
    std::vector<unsigned char> buf(static_cast<std::size_t>(TIFFScanlineSize(t)));
    std::vector<double> conv;
    const std::uint16_t planes = planar == PLANARCONFIG_SEPARATE ? spp : 1;
    const std::size_t per_px = planar == PLANARCONFIG_SEPARATE ? 1 : spp;
    for (std::uint16_t s = 0; s < planes; ++s) {
      for (std::uint32_t row = 0; row < height; ++row) {
        if (TIFFReadScanline(t, buf.data(), row, s) < 0) fail(path, "scanline read failed");
        conv.resize(static_cast<std::size_t>(width) * per_px);
        unpack_any(*st, buf.data(), conv.size(), conv.data());
        for (std::uint32_t c = 0; c < width; ++c) {
          for (std::size_t b = 0; b < per_px; ++b) {
            vals[s + b][static_cast<std::size_t>(row) * width + c] = conv[c * per_px + b];
          }
        }
      }
    }
  }

  std::vector<RasterGrid> out;
  out.reserve(spp);
  for (auto& v : vals) out.emplace_back(spec, sem, nodata, std::move(v));
  return out;
}

RasterGrid read_raster(const std::filesystem::path& path, std::optional<Semantic> semantic) {
  auto bands = read_raster_bands(path, semantic);
  if (bands.size() != 1) {
    throw IoError(fmt::format("{}: expected one band, found {}", path.string(), bands.size()));
  }
  return std::move(bands.front());
}

}  // namespace gba::io
