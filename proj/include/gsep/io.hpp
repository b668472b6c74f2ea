#pragma once
#include "gsep/grid.hpp"

#include <string>

namespace gsep {

// Lossless raw image format: 16-byte header {magic "GSEP", u32 n, u32 flags,
// u32 reserved}, then n^2 row-major samples as little-endian f64 pairs (re, im).
void write_raw(const std::string& path, const Image& img);
Image read_raw(const std::string& path);

// 8-bit binary PGM of the real part, min-max scaled. Quick viewing only.
void write_pgm(const std::string& path, const Image& img);

// Writes content to path via temp file + rename.
void atomic_write_text(const std::string& path, const std::string& content);

}  // namespace gsep
