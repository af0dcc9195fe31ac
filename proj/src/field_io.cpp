#include "osgrf/field_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <unistd.h>

#include "osgrf/spectral.hpp"

namespace osgrf {

namespace {

constexpr std::size_t kHeaderSize = 32;
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(const std::string& in, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
    return v;
}

}  // namespace

FieldFormat field_format_from_string(const std::string& name) {
    if (name == "bin") return FieldFormat::Binary;
    if (name == "csv") return FieldFormat::Csv;
    if (name == "pgm") return FieldFormat::Pgm;
    throw std::invalid_argument("unknown format \"" + name + "\" (expected bin, csv or pgm)");
}

std::string encode_binary(const FieldRealization& r) {
    std::string out = "OSGF";
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(r.grid.dim));
    for (int axis = 0; axis < 3; ++axis) put_u32(out, axis < r.grid.dim ? static_cast<std::uint32_t>(r.grid.n) : 0u);
    out.resize(kHeaderSize, '\0');
    out.reserve(kHeaderSize + 8 * r.values.size());
    for (double v : r.values) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFFu));
    }
    return out;
}

FieldRealization decode_binary(const std::string& bytes, double extent) {
    if (bytes.size() < kHeaderSize || bytes.compare(0, 4, "OSGF") != 0) {
        throw std::runtime_error("not an OSGF field file");
    }
    if (get_u32(bytes, 4) != kVersion) throw std::runtime_error("unsupported OSGF version");
    FieldRealization r;
    r.grid.dim = static_cast<int>(get_u32(bytes, 8));
    if (r.grid.dim < 1 || r.grid.dim > 3) throw std::runtime_error("OSGF header: bad dimension");
    r.grid.n = static_cast<int>(get_u32(bytes, 12));
    for (int axis = 1; axis < r.grid.dim; ++axis) {
        if (static_cast<int>(get_u32(bytes, 12 + 4 * axis)) != r.grid.n) {
            throw std::runtime_error("OSGF header: unequal axis lengths are not supported");
        }
    }
    r.grid.extent = extent;
    r.grid.validate();
    const std::size_t count = r.grid.size();
    if (bytes.size() != kHeaderSize + 8 * count) throw std::runtime_error("OSGF file: payload size mismatch");
    r.values.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) {
            bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[kHeaderSize + 8 * k + i])) << (8 * i);
        }
        r.values[k] = std::bit_cast<double>(bits);
    }
    return r;
}

std::string encode_csv(const FieldRealization& r) {
    if (r.grid.dim > 2) throw std::invalid_argument("CSV export supports d <= 2");
    std::string out;
    const std::size_t n = static_cast<std::size_t>(r.grid.n);
    const std::size_t cols = r.grid.dim == 1 ? 1 : n;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            if (j > 0) out += ',';
            out += format_number(r.values[i * cols + j]);
        }
        out += '\n';
    }
    return out;
}

PgmImage encode_pgm(const FieldRealization& r) {
    if (r.grid.dim != 2) throw std::invalid_argument("PGM export requires d = 2");
    PgmImage img;
    const auto [lo, hi] = std::minmax_element(r.values.begin(), r.values.end());
    img.min = *lo;
    img.max = *hi;
    const std::string n = std::to_string(r.grid.n);
    img.bytes = "P5\n" + n + " " + n + "\n65535\n";
    const double span = img.max - img.min;
    for (double v : r.values) {
        const double scaled = span > 0.0 ? (v - img.min) / span * 65535.0 : 0.0;
        const auto s = static_cast<std::uint16_t>(std::clamp(std::lround(scaled), 0L, 65535L));
        img.bytes.push_back(static_cast<char>(s >> 8));
        img.bytes.push_back(static_cast<char>(s & 0xFFu));
    }
    return img;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
    const std::filesystem::path tmp =
        path.string() + ".tmp." + std::to_string(static_cast<long>(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw std::runtime_error("write failed for " + path.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error("cannot move output into place at " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace osgrf
