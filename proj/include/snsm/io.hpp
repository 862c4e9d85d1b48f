#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "snsm/learning.hpp"
#include "snsm/snn.hpp"
#include "snsm/types.hpp"

namespace snsm::io {

// Shortest decimal form that parses back to the same double, locale-free.
std::string format_double(double v);

// Binary state container: "SNSM" magic, u32 version/k/n (little-endian),
// then W, M, b as row-major little-endian doubles.  Round-trips byte-exactly.
void save_state(const SynapticState& state, const std::filesystem::path& path);
SynapticState load_state(const std::filesystem::path& path);

void write_train_log(const TrainLog& log, const std::filesystem::path& path);

// Tiles the rows of W (reshaped rows x cols) into a grid with 1-pixel
// separators; each tile min-max scaled to [0,255].  Binary PGM, maxval 255.
void write_feature_grid(const Matrix& W, int rows, int cols,
                        const std::filesystem::path& path);

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);

void write_spike_raster(const SpikeRecord& record,
                        const std::filesystem::path& path);

}  // namespace snsm::io
