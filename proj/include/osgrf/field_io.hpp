#pragma once

#include <filesystem>
#include <string>

#include "osgrf/synthesis.hpp"

namespace osgrf {

enum class FieldFormat { Binary, Csv, Pgm };

FieldFormat field_format_from_string(const std::string& name);

/// Raw binary: 32-byte header "OSGF", u32 version (1), u32 d, then u32 n for
/// each of three axis slots (unused slots 0, remaining bytes 0), followed by
/// n^d little-endian f64 values in row-major order.
std::string encode_binary(const FieldRealization& r);

/// The decoded grid carries extent 1 unless the caller supplies it; the
/// binary header does not record physical units.
FieldRealization decode_binary(const std::string& bytes, double extent = 1.0);

/// d = 1: one value per line. d = 2: n lines of n comma-separated values.
std::string encode_csv(const FieldRealization& r);

struct PgmImage {
    std::string bytes;
    double min = 0.0;  // value mapped to 0
    double max = 0.0;  // value mapped to 65535
};

/// 16-bit binary PGM ("P5 n n 65535", big-endian samples) of a d = 2 field
/// after affine rescaling of [min, max] to [0, 65535]. Row y of the image is
/// grid index (y, .). A constant field maps to 0.
PgmImage encode_pgm(const FieldRealization& r);

/// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

std::string read_file(const std::filesystem::path& path);

}  // namespace osgrf
