#include "rwprop/nifti.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include <spdlog/spdlog.h>

namespace rwprop::nifti {

namespace {

// Header field byte offsets.
constexpr std::size_t kOffSizeofHdr = 0;
constexpr std::size_t kOffRegular = 38;
constexpr std::size_t kOffDim = 40;
constexpr std::size_t kOffDatatype = 70;
constexpr std::size_t kOffBitpix = 72;
constexpr std::size_t kOffPixdim = 76;
constexpr std::size_t kOffVoxOffset = 108;
constexpr std::size_t kOffSclSlope = 112;
constexpr std::size_t kOffSclInter = 116;
constexpr std::size_t kOffXyztUnits = 123;
constexpr std::size_t kOffQformCode = 252;
constexpr std::size_t kOffSformCode = 254;
constexpr std::size_t kOffQoffset = 268;
constexpr std::size_t kOffSrowX = 280;
constexpr std::size_t kOffSrowY = 296;
constexpr std::size_t kOffSrowZ = 312;
constexpr std::size_t kOffMagic = 344;

template <typename T>
void put(std::span<std::uint8_t> buf, std::size_t off, T value) {
  using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
                               std::conditional_t<sizeof(T) == 2, std::uint16_t,
                                                  std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
  auto bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[off + i] = static_cast<std::uint8_t>((bits >> (8 * i)) & 0xFF);
}

template <typename T>
T get(std::span<const std::uint8_t> buf, std::size_t off) {
  using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
                               std::conditional_t<sizeof(T) == 2, std::uint16_t,
                                                  std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(static_cast<U>(buf[off + i]) << (8 * i));
  return std::bit_cast<T>(bits);
}

std::int16_t expected_bitpix(std::int16_t datatype) {
  switch (datatype) {
    case kUint8: return 8;
    case kInt16: return 16;
    case kUint16: return 16;
    case kFloat32: return 32;
    default: return 0;
  }
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct RawImage {
  Header header;
  Grid grid;
  std::vector<double> values;  // unscaled stored values
};

Grid grid_from(const Header& h) {
  Grid g;
  g.dims = h.dims();
  for (int a = 0; a < 3; ++a) {
    const double s = std::fabs(static_cast<double>(h.pixdim[a + 1]));
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw Error(ErrorCode::InvalidArgument, "non-positive voxel spacing in pixdim");
    }
    g.spacing[a] = s;
  }
  if (h.sform_code > 0) {
    g.origin = {h.srow_x[3], h.srow_y[3], h.srow_z[3]};
  } else if (h.qform_code > 0) {
    g.origin = {h.qoffset[0], h.qoffset[1], h.qoffset[2]};
  }
  return g;
}

RawImage read_raw(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  if (bytes.size() >= 2 && bytes[0] == 0x1F && bytes[1] == 0x8B) {
    throw Error(ErrorCode::BadMagic, path.string() + ": compressed NIfTI is not supported");
  }
  if (bytes.size() < static_cast<std::size_t>(kHeaderSize)) {
    throw Error(ErrorCode::TruncatedFile, path.string() + ": shorter than a NIfTI-1 header");
  }
  RawImage raw;
  raw.header = decode_header(std::span(bytes).first(kHeaderSize));
  validate(raw.header);
  raw.grid = grid_from(raw.header);

  const std::size_t offset = static_cast<std::size_t>(raw.header.vox_offset);
  const std::size_t n = raw.grid.voxel_count();
  const std::size_t need = offset + n * raw.header.bytes_per_voxel();
  if (bytes.size() < need) {
    throw Error(ErrorCode::TruncatedFile, path.string() + ": expected " + std::to_string(need) + " bytes, found " +
                                              std::to_string(bytes.size()));
  }

  std::span<const std::uint8_t> data(bytes.data() + offset, bytes.size() - offset);
  raw.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (raw.header.datatype) {
      case kUint8: raw.values[i] = data[i]; break;
      case kInt16: raw.values[i] = get<std::int16_t>(data, 2 * i); break;
      case kUint16: raw.values[i] = get<std::uint16_t>(data, 2 * i); break;
      case kFloat32: raw.values[i] = get<float>(data, 4 * i); break;
      default: break;
    }
  }
  return raw;
}

void write_file(const std::filesystem::path& path, const Header& h, std::span<const std::uint8_t> payload) {
  if (path.empty()) throw Error(ErrorCode::IoFailure, "empty output path");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  const auto header = encode_header(h);
  const std::array<char, 4> pad{};
  out.write(reinterpret_cast<const char*>(header.data()), header.size());
  out.write(pad.data(), pad.size());
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write to " + path.string() + " failed");
}

Header canonical_header(const Grid& g, std::int16_t datatype) {
  constexpr auto kMax = static_cast<std::size_t>(std::numeric_limits<std::int16_t>::max());
  if (g.dims.x > kMax || g.dims.y > kMax || g.dims.z > kMax) {
    throw Error(ErrorCode::InvalidArgument, "dims " + to_string(g.dims) + " do not fit NIfTI-1 int16 fields");
  }
  Header h;
  h.dim = {3,
           static_cast<std::int16_t>(g.dims.x),
           static_cast<std::int16_t>(g.dims.y),
           static_cast<std::int16_t>(g.dims.z),
           1, 1, 1, 1};
  h.datatype = datatype;
  h.bitpix = expected_bitpix(datatype);
  h.pixdim = {1.0f, static_cast<float>(g.spacing[0]), static_cast<float>(g.spacing[1]),
              static_cast<float>(g.spacing[2]), 0, 0, 0, 0};
  h.srow_x = {static_cast<float>(g.spacing[0]), 0, 0, static_cast<float>(g.origin[0])};
  h.srow_y = {0, static_cast<float>(g.spacing[1]), 0, static_cast<float>(g.origin[1])};
  h.srow_z = {0, 0, static_cast<float>(g.spacing[2]), static_cast<float>(g.origin[2])};
  return h;
}

template <typename Stored, typename T>
std::vector<std::uint8_t> pack(std::span<const T> values) {
  std::vector<std::uint8_t> out(values.size() * sizeof(Stored));
  for (std::size_t i = 0; i < values.size(); ++i) put<Stored>(out, i * sizeof(Stored), static_cast<Stored>(values[i]));
  return out;
}

}  // namespace

Dims Header::dims() const {
  return {static_cast<std::size_t>(dim[1]), static_cast<std::size_t>(dim[2]), static_cast<std::size_t>(dim[3])};
}

std::size_t Header::bytes_per_voxel() const { return static_cast<std::size_t>(bitpix / 8); }

void validate(const Header& h) {
  if (h.sizeof_hdr != kHeaderSize) {
    throw Error(ErrorCode::BadMagic, "sizeof_hdr is " + std::to_string(h.sizeof_hdr) +
                                         " (only little-endian NIfTI-1 is supported)");
  }
  if (h.magic != std::array<char, 4>{'n', '+', '1', '\0'}) {
    throw Error(ErrorCode::BadMagic, "magic is not \"n+1\" (single-file NIfTI-1 required)");
  }
  if (h.vox_offset < static_cast<float>(kDataOffset)) {
    throw Error(ErrorCode::BadMagic, "vox_offset " + std::to_string(h.vox_offset) + " is below 352");
  }
  const std::int16_t bitpix = expected_bitpix(h.datatype);
  if (bitpix == 0) throw Error(ErrorCode::UnsupportedDatatype, "datatype " + std::to_string(h.datatype));
  if (bitpix != h.bitpix) {
    throw Error(ErrorCode::UnsupportedDatatype, "bitpix " + std::to_string(h.bitpix) + " inconsistent with datatype " +
                                                    std::to_string(h.datatype));
  }
  if (h.dim[0] != 3) throw Error(ErrorCode::DimMismatch, "dim[0] is " + std::to_string(h.dim[0]) + ", expected 3");
  for (int a = 1; a <= 3; ++a) {
    if (h.dim[a] < 1) throw Error(ErrorCode::DimMismatch, "dim[" + std::to_string(a) + "] must be >= 1");
  }
}

std::array<std::uint8_t, kHeaderSize> encode_header(const Header& h) {
  std::array<std::uint8_t, kHeaderSize> buf{};
  std::span<std::uint8_t> b(buf);
  put(b, kOffSizeofHdr, h.sizeof_hdr);
  buf[kOffRegular] = 'r';
  for (int i = 0; i < 8; ++i) put(b, kOffDim + 2 * i, h.dim[i]);
  put(b, kOffDatatype, h.datatype);
  put(b, kOffBitpix, h.bitpix);
  for (int i = 0; i < 8; ++i) put(b, kOffPixdim + 4 * i, h.pixdim[i]);
  put(b, kOffVoxOffset, h.vox_offset);
  put(b, kOffSclSlope, h.scl_slope);
  put(b, kOffSclInter, h.scl_inter);
  buf[kOffXyztUnits] = h.xyzt_units;
  put(b, kOffQformCode, h.qform_code);
  put(b, kOffSformCode, h.sform_code);
  for (int i = 0; i < 3; ++i) put(b, kOffQoffset + 4 * i, h.qoffset[i]);
  for (int i = 0; i < 4; ++i) {
    put(b, kOffSrowX + 4 * i, h.srow_x[i]);
    put(b, kOffSrowY + 4 * i, h.srow_y[i]);
    put(b, kOffSrowZ + 4 * i, h.srow_z[i]);
  }
  std::memcpy(buf.data() + kOffMagic, h.magic.data(), 4);
  return buf;
}

Header decode_header(std::span<const std::uint8_t> b) {
  if (b.size() < static_cast<std::size_t>(kHeaderSize)) throw Error(ErrorCode::TruncatedFile, "short header");
  Header h;
  h.sizeof_hdr = get<std::int32_t>(b, kOffSizeofHdr);
  for (int i = 0; i < 8; ++i) h.dim[i] = get<std::int16_t>(b, kOffDim + 2 * i);
  h.datatype = get<std::int16_t>(b, kOffDatatype);
  h.bitpix = get<std::int16_t>(b, kOffBitpix);
  for (int i = 0; i < 8; ++i) h.pixdim[i] = get<float>(b, kOffPixdim + 4 * i);
  h.vox_offset = get<float>(b, kOffVoxOffset);
  h.scl_slope = get<float>(b, kOffSclSlope);
  h.scl_inter = get<float>(b, kOffSclInter);
  h.xyzt_units = b[kOffXyztUnits];
  h.qform_code = get<std::int16_t>(b, kOffQformCode);
  h.sform_code = get<std::int16_t>(b, kOffSformCode);
  for (int i = 0; i < 3; ++i) h.qoffset[i] = get<float>(b, kOffQoffset + 4 * i);
  for (int i = 0; i < 4; ++i) {
    h.srow_x[i] = get<float>(b, kOffSrowX + 4 * i);
    h.srow_y[i] = get<float>(b, kOffSrowY + 4 * i);
    h.srow_z[i] = get<float>(b, kOffSrowZ + 4 * i);
  }
  std::memcpy(h.magic.data(), b.data() + kOffMagic, 4);
  return h;
}

Header read_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::array<std::uint8_t, kHeaderSize> buf{};
  in.read(reinterpret_cast<char*>(buf.data()), buf.size());
  if (in.gcount() >= 2 && buf[0] == 0x1F && buf[1] == 0x8B) {
    throw Error(ErrorCode::BadMagic, path.string() + ": compressed NIfTI is not supported");
  }
  if (in.gcount() != kHeaderSize) throw Error(ErrorCode::TruncatedFile, path.string() + ": short header");
  Header h = decode_header(buf);
  validate(h);
  return h;
}

namespace {

ImageVolume read_floating(const std::filesystem::path& path, ElementKind kind) {
  RawImage raw = read_raw(path);
  const float slope = raw.header.scl_slope;
  if (slope != 0.0f && std::isfinite(slope)) {
    const double inter = std::isfinite(raw.header.scl_inter) ? raw.header.scl_inter : 0.0;
    for (auto& x : raw.values) x = x * static_cast<double>(slope) + inter;
  }
  return ImageVolume(raw.grid, kind, std::move(raw.values));
}

}  // namespace

ImageVolume read_intensity(const std::filesystem::path& path) { return read_floating(path, ElementKind::Intensity); }

ImageVolume read_probability(const std::filesystem::path& path) {
  return read_floating(path, ElementKind::Probability);
}

LabelVolume read_labels(const std::filesystem::path& path) {
  RawImage raw = read_raw(path);
  std::vector<LabelId> out(raw.values.size());
  for (std::size_t i = 0; i < raw.values.size(); ++i) {
    const double v = raw.values[i];
    if (!(v >= 0.0) || v > 65535.0 || v != std::floor(v)) {
      throw Error(ErrorCode::InvalidArgument, path.string() + ": label value " + std::to_string(v) +
                                                  " is not an unsigned 16-bit integer");
    }
    out[i] = static_cast<LabelId>(v);
  }
  return LabelVolume(raw.grid, ElementKind::Label, std::move(out));
}

MaskVolume read_mask(const std::filesystem::path& path) {
  RawImage raw = read_raw(path);
  std::vector<std::uint8_t> out(raw.values.size());
  for (std::size_t i = 0; i < raw.values.size(); ++i) out[i] = raw.values[i] != 0.0 ? 1 : 0;
  return MaskVolume(raw.grid, ElementKind::Mask, std::move(out));
}

void write_volume(const ImageVolume& v, const std::filesystem::path& path) {
  const Header h = canonical_header(v.grid(), kFloat32);
  write_file(path, h, pack<float>(v.data()));
}

void write_volume(const LabelVolume& v, const std::filesystem::path& path) {
  const Header h = canonical_header(v.grid(), kUint16);
  write_file(path, h, pack<std::uint16_t>(v.data()));
}

void write_volume(const MaskVolume& v, const std::filesystem::path& path) {
  const Header h = canonical_header(v.grid(), kUint8);
  write_file(path, h, pack<std::uint8_t>(v.data()));
}

MultiLabelAnnotation read_annotation(std::span<const std::filesystem::path> paths, const LabelSet& labels) {
  if (paths.size() != labels.size()) {
    throw Error(ErrorCode::PathCountMismatch, std::to_string(paths.size()) + " annotation files for " +
                                                   std::to_string(labels.size()) + " labels");
  }
  std::vector<MaskVolume> masks;
  masks.reserve(paths.size());
  for (const auto& p : paths) {
    masks.push_back(read_mask(p));
    const auto& first = masks.front();
    const auto& last = masks.back();
    require_same_dims(first, last, "annotation " + p.string());
    if (first.grid() != last.grid()) {
      spdlog::warn("annotation {} has a different voxel-to-world transform than {}", p.string(), paths[0].string());
    }
  }
  return MultiLabelAnnotation(labels, std::move(masks));
}

}  // namespace rwprop::nifti
