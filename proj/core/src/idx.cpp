#include "ntklab/idx.hpp"

#include <cstdint>
#include <fstream>

#include "ntklab/errors.hpp"

namespace ntklab {
namespace {

std::uint32_t read_be32(std::ifstream& f, const std::string& path, std::size_t offset) {
  unsigned char buf[4];
  f.read(reinterpret_cast<char*>(buf), 4);
  if (!f) {
    throw FormatError(path + ": truncated header at byte offset " + std::to_string(offset));
  }
  return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
         (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

}  // namespace

IdxData load_idx(const std::string& path_images, const std::string& path_labels) {
  std::ifstream fi(path_images, std::ios::binary);
  if (!fi) throw FormatError(path_images + ": cannot open");
  std::ifstream fl(path_labels, std::ios::binary);
  if (!fl) throw FormatError(path_labels + ": cannot open");

  const std::uint32_t magic_img = read_be32(fi, path_images, 0);
  if (magic_img != 2051) {
    throw FormatError(path_images + ": bad magic at byte offset 0 (expected 2051, got " +
                      std::to_string(magic_img) + ")");
  }
  const std::uint32_t n_img = read_be32(fi, path_images, 4);
  const std::uint32_t rows = read_be32(fi, path_images, 8);
  const std::uint32_t cols = read_be32(fi, path_images, 12);

  const std::uint32_t magic_lab = read_be32(fl, path_labels, 0);
  if (magic_lab != 2049) {
    throw FormatError(path_labels + ": bad magic at byte offset 0 (expected 2049, got " +
                      std::to_string(magic_lab) + ")");
  }
  const std::uint32_t n_lab = read_be32(fl, path_labels, 4);
  if (n_img != n_lab) {
    throw FormatError("image/label count mismatch: " + std::to_string(n_img) + " vs " +
                      std::to_string(n_lab));
  }
  if (n_img == 0) throw FormatError(path_images + ": empty dataset");

  const std::size_t pixels = std::size_t(rows) * cols;
  IdxData out;
  out.images.resize(n_img, pixels);
  out.labels.resize(n_img);

  std::vector<unsigned char> buf(pixels);
  for (std::uint32_t i = 0; i < n_img; ++i) {
    fi.read(reinterpret_cast<char*>(buf.data()), std::streamsize(pixels));
    if (!fi) {
      throw FormatError(path_images + ": truncated payload at byte offset " +
                        std::to_string(16 + std::size_t(i) * pixels));
    }
    double norm2 = 0.0;
    for (std::size_t p = 0; p < pixels; ++p) {
      const double v = buf[p] / 255.0;
      out.images(i, p) = v;
      norm2 += v * v;
    }
    if (norm2 == 0.0) {
      throw FormatError(path_images + ": all-zero image " + std::to_string(i) +
                        " cannot be normalized");
    }
    out.images.row(i) /= std::sqrt(norm2);
  }
  for (std::uint32_t i = 0; i < n_lab; ++i) {
    unsigned char lab;
    fl.read(reinterpret_cast<char*>(&lab), 1);
    if (!fl) {
      throw FormatError(path_labels + ": truncated payload at byte offset " +
                        std::to_string(8 + std::size_t(i)));
    }
    out.labels[i] = lab;
  }
  return out;
}

}  // namespace ntklab
