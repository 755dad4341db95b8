#pragma once

#include <span>
#include <string>
#include <vector>

#include "fraclab/domain_grid.hpp"

namespace fraclab::io {

inline constexpr int kCacheVersion = 1;

/// %.17g: round-trips every double.
std::string format_double(double v);

/// Cache key of a kernel: the domain description, exponent and refine, printed exactly.
std::string kernel_key(const DomainSpec& spec, double exponent, int refine);

/// Versioned JSON document of a grid's kernel (cells, measure, dense lower-triangular weights).
std::string kernel_to_json(const Grid& grid, const KernelSet& kernel, const std::string& key);

/// Throws ConfigError when the document is malformed, of another version, or keyed differently.
KernelSet kernel_from_json(const std::string& text, const std::string& key);

/// build_kernel, reading and writing `cache_dir` when it is not empty.
KernelSet cached_kernel(const DomainSpec& spec, const Grid& grid, double exponent, int refine,
                        const std::string& cache_dir);

/// Columns: cell, x[, y], value.
void write_field_csv(const std::string& path, const Grid& grid, std::span<const double> u);

/// Reads the value column of write_field_csv output, checking the cell count.
std::vector<double> read_field_csv(const std::string& path, std::size_t cells);

void write_text(const std::string& path, const std::string& text);

}  // namespace fraclab::io
