#pragma once

// Binary checkpoint layout (all little endian):
//   char[4]  magic "GNLS"
//   uint32   version (1)
//   uint32   N (components)
//   uint32   n (points per axis)
//   float64  L
//   float64  t
//   float64  dt
//   then N * n^3 values, component-major, each value as float64 real, float64 imag.

#include "gnls/error.hpp"
#include "gnls/grid.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

namespace gnls {

inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr std::size_t kCheckpointHeaderBytes = 40;

struct Checkpoint {
    FieldState state;
    double dt = 0.0;
};

namespace detail {

template <typename T>
void put_le(std::ostream& out, T v) {
    static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    out.write(bytes.data(), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
    std::array<char, sizeof(T)> bytes;
    if (!in.read(bytes.data(), sizeof(T))) throw IoError("truncated checkpoint");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T v;
    std::memcpy(&v, bytes.data(), sizeof(T));
    return v;
}

} // namespace detail

inline void write_checkpoint(const std::string& path, const FieldState& u, double dt) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open checkpoint for writing: " + path);
    out.write("GNLS", 4);
    detail::put_le<std::uint32_t>(out, kCheckpointVersion);
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(u.grid.n_components));
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(u.grid.n));
    detail::put_le<double>(out, u.grid.box_length);
    detail::put_le<double>(out, u.t);
    detail::put_le<double>(out, dt);
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(u.data.data()),
                  static_cast<std::streamsize>(u.data.size() * sizeof(std::complex<double>)));
    } else {
        for (const auto& v : u.data) {
            detail::put_le<double>(out, v.real());
            detail::put_le<double>(out, v.imag());
        }
    }
    if (!out) throw IoError("failed writing checkpoint " + path);
}

inline Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "GNLS", 4) != 0) throw IoError("not a GNLS checkpoint: " + path);
    const auto version = detail::get_le<std::uint32_t>(in);
    if (version != kCheckpointVersion) throw IoError("unsupported checkpoint version " + std::to_string(version));
    GridDescriptor grid;
    grid.n_components = static_cast<int>(detail::get_le<std::uint32_t>(in));
    grid.n = static_cast<int>(detail::get_le<std::uint32_t>(in));
    grid.box_length = detail::get_le<double>(in);
    try {
        grid.validate();
    } catch (const Error& e) {
        throw IoError(std::string("corrupt checkpoint header: ") + e.what());
    }
    Checkpoint cp;
    cp.state = FieldState(grid, detail::get_le<double>(in));
    cp.dt = detail::get_le<double>(in);
    if constexpr (std::endian::native == std::endian::little) {
        const auto bytes = static_cast<std::streamsize>(cp.state.data.size() * sizeof(std::complex<double>));
        if (!in.read(reinterpret_cast<char*>(cp.state.data.data()), bytes)) throw IoError("truncated checkpoint data");
    } else {
        for (auto& v : cp.state.data) {
            const double re = detail::get_le<double>(in);
            v = {re, detail::get_le<double>(in)};
        }
    }
    if (in.peek() != std::char_traits<char>::eof()) throw IoError("trailing bytes after checkpoint data");
    return cp;
}

} // namespace gnls
