#include "snsm/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>

namespace snsm::io {

namespace {

void write_u32_le(std::ofstream& out, std::uint32_t v) {
  const std::uint8_t bytes[4] = {
      static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
      static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 24)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t read_u32_le(std::ifstream& in, const std::string& what) {
  std::uint8_t bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
    throw ParseError("state file: truncated reading " + what);
  }
  return static_cast<std::uint32_t>(bytes[0]) |
         (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

void write_doubles_le(std::ofstream& out, const double* data, std::size_t count) {
  static_assert(sizeof(double) == 8);
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(data),
              static_cast<std::streamsize>(count * 8));
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      std::uint64_t bits;
      std::memcpy(&bits, data + i, 8);
      std::uint8_t bytes[8];
      for (int b = 0; b < 8; ++b) bytes[b] = static_cast<std::uint8_t>(bits >> (8 * b));
      out.write(reinterpret_cast<const char*>(bytes), 8);
    }
  }
}

void read_doubles_le(std::ifstream& in, double* data, std::size_t count,
                     const std::string& what) {
  if constexpr (std::endian::native == std::endian::little) {
    if (!in.read(reinterpret_cast<char*>(data),
                 static_cast<std::streamsize>(count * 8))) {
      throw ParseError("state file: truncated reading " + what);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      std::uint8_t bytes[8];
      if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
        throw ParseError("state file: truncated reading " + what);
      }
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
      std::memcpy(data + i, &bits, 8);
    }
  }
}

constexpr std::uint32_t kStateVersion = 1;

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void save_state(const SynapticState& state, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write("SNSM", 4);
  write_u32_le(out, kStateVersion);
  write_u32_le(out, static_cast<std::uint32_t>(state.k()));
  write_u32_le(out, static_cast<std::uint32_t>(state.n()));
  // Eigen defaults to column-major storage; emit row-major explicitly.
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMat W = state.W;
  const RowMat M = state.M;
  write_doubles_le(out, W.data(), static_cast<std::size_t>(W.size()));
  write_doubles_le(out, M.data(), static_cast<std::size_t>(M.size()));
  write_doubles_le(out, state.b.data(), static_cast<std::size_t>(state.b.size()));
  if (!out) throw Error("short write to " + path.string());
}

SynapticState load_state(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "SNSM", 4) != 0) {
    throw ParseError("state file " + path.string() + ": bad magic, want \"SNSM\"");
  }
  const std::uint32_t version = read_u32_le(in, "version");
  if (version != kStateVersion) {
    throw ParseError("state file " + path.string() + ": unsupported version " +
                     std::to_string(version));
  }
  const std::uint32_t k = read_u32_le(in, "k");
  const std::uint32_t n = read_u32_le(in, "n");
  if (k == 0 || n == 0) {
    throw ParseError("state file " + path.string() + ": zero dimension in header");
  }
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMat W(k, n), M(k, k);
  SynapticState state;
  state.b.resize(k);
  read_doubles_le(in, W.data(), static_cast<std::size_t>(W.size()), "W");
  read_doubles_le(in, M.data(), static_cast<std::size_t>(M.size()), "M");
  read_doubles_le(in, state.b.data(), static_cast<std::size_t>(state.b.size()), "b");
  char extra;
  if (in.read(&extra, 1)) {
    throw ParseError("state file " + path.string() + ": trailing bytes after b");
  }
  state.W = W;
  state.M = M;
  return state;
}

void write_train_log(const TrainLog& log, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << "step,nsm_cost,active_fraction,eta\n";
  for (const auto& cp : log.checkpoints) {
    out << cp.step << ',' << format_double(cp.nsm_cost) << ','
        << format_double(cp.active_fraction) << ',' << format_double(cp.eta) << '\n';
  }
  if (!out) throw Error("short write to " + path.string());
}

void write_feature_grid(const Matrix& W, int rows, int cols,
                        const std::filesystem::path& path) {
  const Index k = W.rows();
  if (k == 0) throw InvalidStateError("write_feature_grid: empty W");
  if (rows < 1 || cols < 1 ||
      static_cast<Index>(rows) * cols != W.cols()) {
    throw DimensionError("write_feature_grid: rows*cols != W.cols()");
  }
  const int grid_cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(k))));
  const int grid_rows = static_cast<int>((k + grid_cols - 1) / grid_cols);
  const int width = grid_cols * cols + (grid_cols - 1);
  const int height = grid_rows * rows + (grid_rows - 1);

  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height, 0);
  for (Index unit = 0; unit < k; ++unit) {
    const int gr = static_cast<int>(unit) / grid_cols;
    const int gc = static_cast<int>(unit) % grid_cols;
    const int y0 = gr * (rows + 1);
    const int x0 = gc * (cols + 1);
    const double lo = W.row(unit).minCoeff();
    const double hi = W.row(unit).maxCoeff();
    const double span = hi - lo;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double v = W(unit, static_cast<Index>(r) * cols + c);
        const std::uint8_t px =
            span > 0.0 ? static_cast<std::uint8_t>(std::lround((v - lo) / span * 255.0))
                       : std::uint8_t{128};
        pixels[static_cast<std::size_t>(y0 + r) * width + x0 + c] = px;
      }
    }
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
  if (!out) throw Error("short write to " + path.string());
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  data.validate();
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  for (Index j = 0; j < data.dim(); ++j) {
    if (j) out << ',';
    out << 'x' << j;
  }
  out << '\n';
  for (Index t = 0; t < data.size(); ++t) {
    for (Index j = 0; j < data.dim(); ++j) {
      if (j) out << ',';
      out << format_double(data.X(t, j));
    }
    out << '\n';
  }
  if (!out) throw Error("short write to " + path.string());
}

void write_spike_raster(const SpikeRecord& record,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << "unit_index,spike_time\n";
  for (std::size_t i = 0; i < record.spike_times.size(); ++i) {
    for (const double t : record.spike_times[i]) {
      out << i << ',' << format_double(t) << '\n';
    }
  }
  if (!out) throw Error("short write to " + path.string());
}

}  // namespace snsm::io
