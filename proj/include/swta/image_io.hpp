#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "swta/pattern.hpp"

namespace swta {

// Pattern files
//
//   CSV : first line `rows,cols`, then `rows` lines of `cols` decimal reals.
//   PGM : P2 (ASCII) or P5 (binary), maxval <= 255. Gray g maps to g / maxval.
//
// Grids are row-major in both formats. A Line(n) pattern is written as 1 x n.

/// Unnormalized grid read from disk.
struct RawImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
};

/// Reads PGM (detected by the `P2` / `P5` magic) or CSV. Errors:
/// Unreadable, MalformedHeader, MalformedData, DimensionMismatch.
RawImage read_image(const std::filesystem::path& path);

/// read_image, mapped to a normalized Grid pattern labelled with the file stem.
/// An all-zero image throws Annihilated.
Pattern load_image(const std::filesystem::path& path);

enum class PgmEncoding { Ascii, Binary };

struct ImageWriteOptions {
  PgmEncoding encoding = PgmEncoding::Binary;
  /// Scale so the pattern maximum maps to white. Off for the exact inverse
  /// of the load mapping.
  bool scale_to_peak = false;
};

/// Writes CSV (full precision) or 8-bit PGM depending on the extension
/// (`.csv` / `.pgm`). PGM gray = round(clamp(v, 0, 1) * 255).
void save_image(const Pattern& p, const std::filesystem::path& path,
                const ImageWriteOptions& options = {});

}  // namespace swta
