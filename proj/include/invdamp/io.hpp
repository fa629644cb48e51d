#pragma once

#include "invdamp/density.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace invdamp::io {

// ---------------------------------------------------------------------------
// CSV: UTF-8, header row, comma delimiter, '.' decimal, %.17g round-trip.
// ---------------------------------------------------------------------------

inline std::string format_g17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline void csv_write(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("csv_write: cannot open " + path.string());
    for (size_t c = 0; c < header.size(); ++c)
        out << header[c] << (c + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::invalid_argument("csv_write: row width mismatch");
        for (size_t c = 0; c < row.size(); ++c)
            out << format_g17(row[c]) << (c + 1 < row.size() ? "," : "\n");
    }
    if (!out) throw std::runtime_error("csv_write: write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Binary Theta cache. Layout: magic, k, iota, epsilon, v/w grid headers, the
// theta matrix and residual vector as raw little-endian doubles.
// ---------------------------------------------------------------------------

constexpr char kThetaMagic[8] = {'I', 'V', 'D', 'T', 'H', '0', '1', '\n'};

namespace detail {

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void get(std::ifstream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace detail

inline void save_field(const std::filesystem::path& path,
                       const density::SpectralDensityField& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_field: cannot open " + path.string());
    out.write(kThetaMagic, sizeof(kThetaMagic));
    detail::put(out, static_cast<std::int32_t>(f.k));
    detail::put(out, static_cast<std::int32_t>(f.iota));
    detail::put(out, f.epsilon);
    for (const Grid* g : {&f.v, &f.w}) {
        detail::put(out, g->lo);
        detail::put(out, g->hi);
        detail::put(out, static_cast<std::int64_t>(g->n));
    }
    out.write(reinterpret_cast<const char*>(f.theta.data()),
              static_cast<std::streamsize>(sizeof(density::Complex) * f.theta.size()));
    out.write(reinterpret_cast<const char*>(f.residuals.data()),
              static_cast<std::streamsize>(sizeof(double) * f.residuals.size()));
    if (!out) throw std::runtime_error("save_field: write failed for " + path.string());
}

inline bool load_field(const std::filesystem::path& path, density::SpectralDensityField& f) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::string(magic, 8) != std::string(kThetaMagic, 8)) return false;
    std::int32_t k, iota;
    detail::get(in, k);
    detail::get(in, iota);
    detail::get(in, f.epsilon);
    f.k = k;
    f.iota = iota;
    double lo, hi;
    std::int64_t n;
    detail::get(in, lo);
    detail::get(in, hi);
    detail::get(in, n);
    f.v = Grid(lo, hi, static_cast<int>(n));
    detail::get(in, lo);
    detail::get(in, hi);
    detail::get(in, n);
    f.w = Grid(lo, hi, static_cast<int>(n));
    f.theta.resize(f.v.n, f.w.n);
    f.residuals.resize(f.w.n);
    in.read(reinterpret_cast<char*>(f.theta.data()),
            static_cast<std::streamsize>(sizeof(density::Complex) * f.theta.size()));
    in.read(reinterpret_cast<char*>(f.residuals.data()),
            static_cast<std::streamsize>(sizeof(double) * f.residuals.size()));
    return static_cast<bool>(in);
}

/// FNV-1a over a byte string; used for config-keyed cache file names.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;  // offset basis
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;  // prime
    }
    return h;
}

inline std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace invdamp::io
