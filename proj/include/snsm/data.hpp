#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "snsm/types.hpp"

namespace snsm {

/// Stack of equally sized 8-bit grayscale images, row-major per image.
struct ImageSet {
  std::uint32_t count = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols bytes
};

/// Parses an IDX image file: big-endian magic 0x00000803 (unsigned byte,
/// 3 dimensions), then count/rows/cols as 32-bit big-endian integers, then
/// the raw payload. Rejects any other magic; errors name the byte offset.
ImageSet load_idx(const std::filesystem::path& path);

/// Inverse of load_idx; load_idx(write_idx(s)) round-trips byte-exactly.
void write_idx(const ImageSet& images, const std::filesystem::path& path);

/// Keeps the first `count` images. count = 0 keeps everything.
ImageSet take_images(const ImageSet& images, std::uint32_t count);

/// Flattens each image row-major into a sample and multiplies by `scale`.
Dataset to_samples(const ImageSet& images, double scale = 1.0 / 255.0);

/// Draws `count` square patches at uniformly random (image, row, col)
/// offsets with a seeded generator; patches are flattened row-major with raw
/// byte values.
Dataset sample_patches(const ImageSet& images, int patch, int count,
                       std::uint64_t seed);

/// Centers each dimension and applies (C + eps I)^(-1/2) computed by
/// symmetric eigendecomposition; the output's empirical covariance is close
/// to identity. Warns when T <= n.
Dataset zca_whiten(const Dataset& data, double epsilon);

/// Synthetic 1-D ring manifold: T points at angles 2 pi t / T, featurized by
/// Gaussian bumps exp(-d(theta, phi_i)^2 / (2 width^2)) over n random center
/// angles (circular distance d), then unit-normalized. Pairwise similarities
/// decay smoothly with angular distance.
Dataset gen_ring_manifold(int T, int n, double width, std::uint64_t seed);

/// Scales every sample to unit Euclidean norm; errors name the index of any
/// zero-norm sample.
Dataset unit_normalize(const Dataset& data);

/// Angle (radians, in [0, 2 pi)) of ring sample t out of T.
double ring_angle(int t, int T);

}  // namespace snsm
