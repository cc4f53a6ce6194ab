#include "dqe/nifti.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>

namespace dqe {

namespace {

// nifti_1_header, 348 bytes
#pragma pack(push, 1)
struct Nifti1Header {
  int32_t sizeof_hdr;
  char data_type[10];
  char db_name[18];
  int32_t extents;
  int16_t session_error;
  char regular;
  char dim_info;
  int16_t dim[8];
  float intent_p1, intent_p2, intent_p3;
  int16_t intent_code;
  int16_t datatype;
  int16_t bitpix;
  int16_t slice_start;
  float pixdim[8];
  float vox_offset;
  float scl_slope;
  float scl_inter;
  int16_t slice_end;
  char slice_code;
  char xyzt_units;
  float cal_max, cal_min;
  float slice_duration;
  float toffset;
  int32_t glmax, glmin;
  char descrip[80];
  char aux_file[24];
  int16_t qform_code;
  int16_t sform_code;
  float quatern_b, quatern_c, quatern_d;
  float qoffset_x, qoffset_y, qoffset_z;
  float srow_x[4];
  float srow_y[4];
  float srow_z[4];
  char intent_name[16];
  char magic[4];
};
#pragma pack(pop)
static_assert(sizeof(Nifti1Header) == 348, "nifti header layout");

constexpr int16_t DT_UINT8 = 2;
constexpr int16_t DT_INT16 = 4;
constexpr int16_t DT_INT32 = 8;
constexpr int16_t DT_FLOAT32 = 16;
constexpr int16_t DT_FLOAT64 = 64;
constexpr int16_t DT_INT8 = 256;
constexpr int16_t DT_UINT16 = 512;
constexpr int16_t DT_UINT32 = 768;

template <class T>
void swap_bytes(T& v) {
  auto* p = reinterpret_cast<unsigned char*>(&v);
  for (size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(p[i], p[sizeof(T) - 1 - i]);
}

void swap_header(Nifti1Header& h) {
  swap_bytes(h.sizeof_hdr);
  for (auto& d : h.dim) swap_bytes(d);
  swap_bytes(h.datatype);
  swap_bytes(h.bitpix);
  for (auto& p : h.pixdim) swap_bytes(p);
  swap_bytes(h.vox_offset);
  swap_bytes(h.scl_slope);
  swap_bytes(h.scl_inter);
  swap_bytes(h.qform_code);
  swap_bytes(h.sform_code);
  swap_bytes(h.quatern_b);
  swap_bytes(h.quatern_c);
  swap_bytes(h.quatern_d);
  for (auto& v : h.srow_x) swap_bytes(v);
  for (auto& v : h.srow_y) swap_bytes(v);
  for (auto& v : h.srow_z) swap_bytes(v);
}

// Map anatomical axes (sagittal, coronal, axial) onto voxel axes by the
// dominant component of each direction-matrix column; greedy so the result
// is always a permutation.
std::array<int, 3> axis_map_from_direction(const double d[3][3]) {
  std::array<int, 3> map{0, 1, 2};
  bool any = false;
  for (int i = 0; i < 3 && !any; ++i)
    for (int j = 0; j < 3; ++j)
      if (std::abs(d[i][j]) > 1e-12) any = true;
  if (!any) return map;

  bool anat_used[3] = {false, false, false};
  bool vox_used[3] = {false, false, false};
  for (int pick = 0; pick < 3; ++pick) {
    double best = -1;
    int bi = -1, bj = -1;
    for (int i = 0; i < 3; ++i) {
      if (anat_used[i]) continue;
      for (int j = 0; j < 3; ++j) {
        if (vox_used[j]) continue;
        if (std::abs(d[i][j]) > best) {
          best = std::abs(d[i][j]);
          bi = i;
          bj = j;
        }
      }
    }
    anat_used[bi] = true;
    vox_used[bj] = true;
    map[static_cast<size_t>(bi)] = bj;
  }
  return map;
}

struct GzFileCloser {
  void operator()(gzFile f) const {
    if (f) gzclose(f);
  }
};

void gz_read_exact(gzFile f, void* buf, size_t n, const std::string& path) {
  size_t got = 0;
  auto* p = static_cast<unsigned char*>(buf);
  while (got < n) {
    const unsigned chunk = static_cast<unsigned>(std::min<size_t>(n - got, 1u << 28));
    const int r = gzread(f, p + got, chunk);
    if (r <= 0) throw IOFailure("truncated or unreadable NIfTI file: " + path);
    got += static_cast<size_t>(r);
  }
}

}  // namespace

NiftiVolume read_nifti(const std::string& path) {
  if (!std::filesystem::exists(path)) throw FileNotFound("no such file: " + path);
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) throw IOFailure("cannot open: " + path);
  std::unique_ptr<gzFile_s, GzFileCloser> guard(f);

  Nifti1Header h{};
  gz_read_exact(f, &h, sizeof(h), path);

  bool swapped = false;
  if (h.sizeof_hdr != 348) {
    swap_header(h);
    swapped = true;
    if (h.sizeof_hdr != 348) throw IOFailure("not a NIfTI-1 file (bad sizeof_hdr): " + path);
  }
  if (std::strncmp(h.magic, "n+1", 3) != 0) {
    if (std::strncmp(h.magic, "ni1", 3) == 0)
      throw IOFailure("two-file NIfTI (.hdr/.img) not supported: " + path);
    throw IOFailure("not a single-file NIfTI-1 volume: " + path);
  }
  if (h.dim[0] < 3 || h.dim[0] > 7) throw IOFailure("expected a 3D volume: " + path);
  for (int i = 4; i <= h.dim[0]; ++i)
    if (h.dim[i] > 1) throw IOFailure("4D volumes not supported: " + path);
  if (h.dim[1] < 1 || h.dim[2] < 1 || h.dim[3] < 1)
    throw IOFailure("degenerate volume dimensions: " + path);

  NiftiVolume vol;
  vol.nx = h.dim[1];
  vol.ny = h.dim[2];
  vol.nz = h.dim[3];
  vol.sx = h.pixdim[1] > 0 ? h.pixdim[1] : 1.0;
  vol.sy = h.pixdim[2] > 0 ? h.pixdim[2] : 1.0;
  vol.sz = h.pixdim[3] > 0 ? h.pixdim[3] : 1.0;

  // orientation: prefer sform, fall back to qform
  if (h.sform_code > 0) {
    const double d[3][3] = {{h.srow_x[0], h.srow_x[1], h.srow_x[2]},
                            {h.srow_y[0], h.srow_y[1], h.srow_y[2]},
                            {h.srow_z[0], h.srow_z[1], h.srow_z[2]}};
    vol.axis_map = axis_map_from_direction(d);
  } else if (h.qform_code > 0) {
    const double b = h.quatern_b, c = h.quatern_c, dd = h.quatern_d;
    double a2 = 1.0 - (b * b + c * c + dd * dd);
    const double a = a2 > 0 ? std::sqrt(a2) : 0.0;
    const double qfac = (h.pixdim[0] < 0) ? -1.0 : 1.0;
    const double r[3][3] = {
        {a * a + b * b - c * c - dd * dd, 2 * (b * c - a * dd), qfac * 2 * (b * dd + a * c)},
        {2 * (b * c + a * dd), a * a + c * c - b * b - dd * dd, qfac * 2 * (c * dd - a * b)},
        {2 * (b * dd - a * c), 2 * (c * dd + a * b), qfac * (a * a + dd * dd - b * b - c * c)}};
    vol.axis_map = axis_map_from_direction(r);
  }

  const size_t nvox = static_cast<size_t>(vol.nx) * vol.ny * vol.nz;
  const long offset = static_cast<long>(h.vox_offset);
  if (offset > static_cast<long>(sizeof(h))) {
    std::vector<char> skip(static_cast<size_t>(offset) - sizeof(h));
    gz_read_exact(f, skip.data(), skip.size(), path);
  }

  const double slope = (h.scl_slope != 0.0f) ? h.scl_slope : 1.0;
  const double inter = (h.scl_slope != 0.0f) ? h.scl_inter : 0.0;
  vol.data.resize(nvox);

  auto load_as = [&](auto tag) {
    using U = decltype(tag);
    std::vector<U> raw(nvox);
    gz_read_exact(f, raw.data(), nvox * sizeof(U), path);
    if (swapped && sizeof(U) > 1)
      for (auto& v : raw) swap_bytes(v);
    for (size_t i = 0; i < nvox; ++i)
      vol.data[i] = static_cast<float>(static_cast<double>(raw[i]) * slope + inter);
  };

  switch (h.datatype) {
    case DT_UINT8: load_as(uint8_t{}); break;
    case DT_INT8: load_as(int8_t{}); break;
    case DT_INT16: load_as(int16_t{}); break;
    case DT_UINT16: load_as(uint16_t{}); break;
    case DT_INT32: load_as(int32_t{}); break;
    case DT_UINT32: load_as(uint32_t{}); break;
    case DT_FLOAT32: load_as(float{}); break;
    case DT_FLOAT64: load_as(double{}); break;
    default:
      throw IOFailure("unsupported NIfTI datatype " + std::to_string(h.datatype) + ": " + path);
  }
  return vol;
}

namespace {

Nifti1Header make_header(int16_t datatype, int16_t bitpix, int nx, int ny, int nz, double sx,
                         double sy, double sz) {
  Nifti1Header h{};
  h.sizeof_hdr = 348;
  h.regular = 'r';
  h.dim[0] = 3;
  h.dim[1] = static_cast<int16_t>(nx);
  h.dim[2] = static_cast<int16_t>(ny);
  h.dim[3] = static_cast<int16_t>(nz);
  for (int i = 4; i < 8; ++i) h.dim[i] = 1;
  h.datatype = datatype;
  h.bitpix = bitpix;
  h.pixdim[0] = 1.0f;
  h.pixdim[1] = static_cast<float>(sx);
  h.pixdim[2] = static_cast<float>(sy);
  h.pixdim[3] = static_cast<float>(sz);
  h.vox_offset = 352.0f;
  h.scl_slope = 1.0f;
  h.scl_inter = 0.0f;
  h.xyzt_units = 2;  // millimeters
  h.sform_code = 1;
  h.srow_x[0] = static_cast<float>(sx);
  h.srow_y[1] = static_cast<float>(sy);
  h.srow_z[2] = static_cast<float>(sz);
  std::memcpy(h.magic, "n+1", 4);
  return h;
}

void write_blob(const std::string& path, const Nifti1Header& h, const void* payload, size_t bytes) {
  const std::string tmp = path + ".tmp";
  const char zeros[4] = {0, 0, 0, 0};
  const bool gz = path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
  if (gz) {
    gzFile f = gzopen(tmp.c_str(), "wb");
    if (!f) throw IOFailure("cannot create: " + tmp);
    bool ok = gzwrite(f, &h, sizeof(h)) == static_cast<int>(sizeof(h)) &&
              gzwrite(f, zeros, 4) == 4 &&
              gzwrite(f, payload, static_cast<unsigned>(bytes)) == static_cast<int>(bytes);
    ok = (gzclose(f) == Z_OK) && ok;
    if (!ok) {
      std::remove(tmp.c_str());
      throw IOFailure("write failed: " + path);
    }
  } else {
    std::FILE* f = std::fopen(tmp.c_str(), "wb");
    if (!f) throw IOFailure("cannot create: " + tmp);
    bool ok = std::fwrite(&h, 1, sizeof(h), f) == sizeof(h) && std::fwrite(zeros, 1, 4, f) == 4 &&
              std::fwrite(payload, 1, bytes, f) == bytes;
    ok = (std::fclose(f) == 0) && ok;
    if (!ok) {
      std::remove(tmp.c_str());
      throw IOFailure("write failed: " + path);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IOFailure("cannot move into place: " + path);
  }
}

}  // namespace

void write_nifti(const std::string& path, const float* data, int nx, int ny, int nz, double sx,
                 double sy, double sz) {
  const auto h = make_header(DT_FLOAT32, 32, nx, ny, nz, sx, sy, sz);
  write_blob(path, h, data, static_cast<size_t>(nx) * ny * nz * sizeof(float));
}

void write_nifti_u8(const std::string& path, const uint8_t* data, int nx, int ny, int nz, double sx,
                    double sy, double sz) {
  const auto h = make_header(DT_UINT8, 8, nx, ny, nz, sx, sy, sz);
  write_blob(path, h, data, static_cast<size_t>(nx) * ny * nz);
}

}  // namespace dqe
