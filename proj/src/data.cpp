#include "snsm/data.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>

#include "snsm/rng.hpp"

namespace snsm {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;

std::uint32_t read_be32(const std::vector<std::uint8_t>& buf, std::size_t offset) {
  return (static_cast<std::uint32_t>(buf[offset]) << 24) |
         (static_cast<std::uint32_t>(buf[offset + 1]) << 16) |
         (static_cast<std::uint32_t>(buf[offset + 2]) << 8) |
         static_cast<std::uint32_t>(buf[offset + 3]);
}

void write_be32(std::ofstream& out, std::uint32_t v) {
  const std::uint8_t bytes[4] = {
      static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16),
      static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

}  // namespace

ImageSet load_idx(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  if (buf.size() < 16) {
    throw ParseError(path.string() + ": truncated header at offset " +
                     std::to_string(buf.size()));
  }
  const std::uint32_t magic = read_be32(buf, 0);
  if (magic != kImageMagic) {
    throw ParseError(path.string() + ": wrong magic at offset 0 (got 0x" +
                     [&] {
                       char hex[16];
                       std::snprintf(hex, sizeof hex, "%08x", magic);
                       return std::string(hex);
                     }() +
                     ", want 0x00000803)");
  }
  ImageSet set;
  set.count = read_be32(buf, 4);
  set.rows = read_be32(buf, 8);
  set.cols = read_be32(buf, 12);
  const std::uint64_t payload = static_cast<std::uint64_t>(set.count) * set.rows * set.cols;
  if (set.rows != 0 && set.cols != 0 &&
      (payload / set.rows / set.cols != set.count ||
       payload > std::numeric_limits<std::uint32_t>::max())) {
    throw ParseError(path.string() + ": dimension overflow in header at offset 4");
  }
  if (buf.size() - 16 != payload) {
    throw ParseError(path.string() + ": payload is " +
                     std::to_string(buf.size() - 16) + " bytes at offset 16, header declares " +
                     std::to_string(payload));
  }
  set.pixels.assign(buf.begin() + 16, buf.end());
  return set;
}

void write_idx(const ImageSet& images, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  write_be32(out, kImageMagic);
  write_be32(out, images.count);
  write_be32(out, images.rows);
  write_be32(out, images.cols);
  out.write(reinterpret_cast<const char*>(images.pixels.data()),
            static_cast<std::streamsize>(images.pixels.size()));
  if (!out) throw ParseError("short write to " + path.string());
}

ImageSet take_images(const ImageSet& images, std::uint32_t count) {
  if (count == 0 || count >= images.count) return images;
  ImageSet out = images;
  out.count = count;
  out.pixels.resize(static_cast<std::size_t>(count) * images.rows * images.cols);
  return out;
}

Dataset to_samples(const ImageSet& images, double scale) {
  if (!(scale > 0.0)) throw InvalidStateError("to_samples: scale must be positive");
  if (images.count == 0) throw InvalidStateError("to_samples: empty image set");
  const Index n = static_cast<Index>(images.rows) * images.cols;
  Dataset data;
  data.X.resize(images.count, n);
  for (std::uint32_t img = 0; img < images.count; ++img) {
    const std::uint8_t* src = images.pixels.data() + static_cast<std::size_t>(img) * n;
    for (Index j = 0; j < n; ++j) {
      data.X(img, j) = static_cast<double>(src[j]) * scale;
    }
  }
  return data;
}

Dataset sample_patches(const ImageSet& images, int patch, int count,
                       std::uint64_t seed) {
  if (images.count == 0) throw InvalidStateError("sample_patches: empty image set");
  if (patch < 1 || static_cast<std::uint32_t>(patch) > images.rows ||
      static_cast<std::uint32_t>(patch) > images.cols) {
    throw InvalidStateError("sample_patches: patch size exceeds image dimensions");
  }
  if (count < 1) throw InvalidStateError("sample_patches: count must be >= 1");

  auto gen = rng::make_engine(seed);
  const std::uint32_t row_span = images.rows - patch + 1;
  const std::uint32_t col_span = images.cols - patch + 1;
  const std::size_t stride = static_cast<std::size_t>(images.rows) * images.cols;

  Dataset data;
  data.X.resize(count, static_cast<Index>(patch) * patch);
  for (int s = 0; s < count; ++s) {
    const auto img = rng::uniform_index(gen, images.count);
    const auto r0 = rng::uniform_index(gen, row_span);
    const auto c0 = rng::uniform_index(gen, col_span);
    const std::uint8_t* base = images.pixels.data() + img * stride;
    Index j = 0;
    for (int r = 0; r < patch; ++r) {
      const std::uint8_t* row = base + (r0 + r) * images.cols + c0;
      for (int c = 0; c < patch; ++c) data.X(s, j++) = static_cast<double>(row[c]);
    }
  }
  return data;
}

Dataset zca_whiten(const Dataset& data, double epsilon) {
  data.validate();
  if (!(epsilon >= 0.0)) throw InvalidStateError("zca_whiten: negative epsilon");
  const Index T = data.size();
  const Index n = data.dim();
  if (T <= n) {
    std::cerr << "warning: zca_whiten with T = " << T << " <= n = " << n
              << " samples; covariance is rank-deficient\n";
  }
  const Eigen::RowVectorXd mean = data.X.colwise().mean();
  Matrix centered = data.X.rowwise() - mean;
  const Matrix cov = centered.transpose() * centered / static_cast<double>(T);
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov + epsilon * Matrix::Identity(n, n));
  if (es.info() != Eigen::Success) {
    throw Error("zca_whiten: eigendecomposition failed");
  }
  const Vector inv_sqrt = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().cwiseInverse();
  if (!inv_sqrt.allFinite()) {
    throw Error("zca_whiten: zero eigenvalue with epsilon = 0");
  }
  const Matrix transform =
      es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
  Dataset out;
  out.X = centered * transform;
  return out;
}

double ring_angle(int t, int T) {
  return 2.0 * M_PI * static_cast<double>(t) / static_cast<double>(T);
}

Dataset gen_ring_manifold(int T, int n, double width, std::uint64_t seed) {
  if (T < 8 || n < 8) throw InvalidStateError("gen_ring_manifold: need T >= 8 and n >= 8");
  if (!(width > 0.0)) throw InvalidStateError("gen_ring_manifold: width must be positive");

  auto gen = rng::make_engine(seed);
  Vector centers(n);
  for (Index i = 0; i < n; ++i) centers(i) = rng::uniform(gen, 0.0, 2.0 * M_PI);

  Dataset data;
  data.X.resize(T, n);
  for (int t = 0; t < T; ++t) {
    const double theta = ring_angle(t, T);
    for (Index i = 0; i < n; ++i) {
      double d = std::abs(theta - centers(i));
      d = std::min(d, 2.0 * M_PI - d);
      data.X(t, i) = std::exp(-d * d / (2.0 * width * width));
    }
  }
  return unit_normalize(data);
}

Dataset unit_normalize(const Dataset& data) {
  data.validate();
  Dataset out = data;
  for (Index t = 0; t < out.size(); ++t) {
    const double norm = out.X.row(t).norm();
    if (norm == 0.0) {
      throw InvalidStateError("unit_normalize: zero-norm sample at index " +
                              std::to_string(t));
    }
    out.X.row(t) /= norm;
  }
  return out;
}

}  // namespace snsm
