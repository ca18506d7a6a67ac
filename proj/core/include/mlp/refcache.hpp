#pragma once

// On-disk cache for serial reference trajectories. One file per key under
// the cache directory, resolved as MLP_CACHE_DIR, else $HOME/.cache/mlp,
// else ./.mlp_cache. File layout: header = key (uint64), dt_ref (float64),
// node count (uint64), followed by one little-endian (re, im) float64 pair
// per component per node. Missing, mismatched, or truncated files read as
// "not cached" (mismatch and truncation also print a warning to stderr).

#include "mlp/core.hpp"

#include <filesystem>
#include <optional>

namespace mlp {

std::filesystem::path cache_directory();
std::filesystem::path cache_file(uint64_t key, double dt_ref);

std::optional<std::vector<Vec>> load_reference(uint64_t key, double dt_ref,
                                               size_t nodes, int dim);

// atomic (write to a temp file, then rename); writes serialized in-process
void store_reference(uint64_t key, double dt_ref,
                     const std::vector<Vec>& states);

} // namespace mlp
