#pragma once

/**
 * @file grid.hpp
 * @brief Periodic box discretisation and N-component field storage.
 *
 * The box is [-L/2, L/2)^3 sampled at x_i = (i - n/2) L / n. Fields are stored
 * component-major: component j occupies data[j n^3, (j+1) n^3), each component
 * laid out with z fastest (row-major i, j, k).
 */

#include "gnls/error.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <new>
#include <span>
#include <string>
#include <vector>

namespace gnls {

/// 64-byte aligned allocator so every component slice can be handed to FFTW's SIMD kernels.
template <typename T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::size_t alignment = 64;

    AlignedAllocator() noexcept = default;
    template <typename U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) {
        const std::size_t bytes = ((n * sizeof(T) + alignment - 1) / alignment) * alignment;
        void* p = std::aligned_alloc(alignment, bytes == 0 ? alignment : bytes);
        if (!p) throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) noexcept { std::free(p); }

    template <typename U>
    bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

struct GridDescriptor {
    int n = 64;
    double box_length = 32.0;
    int n_components = 1;

    bool operator==(const GridDescriptor&) const = default;

    void validate() const {
        if (n < 8 || (n & (n - 1)) != 0) throw ValidationError("grid points per axis must be a power of two >= 8");
        if (!(box_length > 0.0) || !std::isfinite(box_length)) throw ValidationError("box length must be positive");
        if (n_components < 1) throw ValidationError("component count must be >= 1");
    }

    std::size_t points() const noexcept { return static_cast<std::size_t>(n) * n * n; }
    double dx() const noexcept { return box_length / n; }
    double cell_volume() const noexcept { return dx() * dx() * dx(); }
    double coordinate(int i) const noexcept { return (i - n / 2) * dx(); }

    /// Angular wavenumber of FFT index m (Nyquist mapped to -n/2).
    double wavenumber(int m) const noexcept {
        const int s = m < n / 2 ? m : m - n;
        return 2.0 * M_PI / box_length * s;
    }

    /// Wavenumber used for odd derivatives: Nyquist set to zero so real fields have real gradients.
    double derivative_wavenumber(int m) const noexcept { return m == n / 2 ? 0.0 : wavenumber(m); }

    std::size_t index(int i, int j, int k) const noexcept {
        return (static_cast<std::size_t>(i) * n + j) * n + k;
    }
};

using ComplexBuffer = std::vector<std::complex<double>, AlignedAllocator<std::complex<double>>>;

/// N-component complex field on the periodic grid at time t.
struct FieldState {
    GridDescriptor grid;
    double t = 0.0;
    ComplexBuffer data;

    FieldState() = default;
    explicit FieldState(const GridDescriptor& g, double time = 0.0) : grid(g), t(time), data(g.points() * g.n_components) {
        grid.validate();
    }

    std::span<std::complex<double>> component(int j) {
        return {data.data() + j * grid.points(), grid.points()};
    }
    std::span<const std::complex<double>> component(int j) const {
        return {data.data() + j * grid.points(), grid.points()};
    }

    bool all_finite() const {
        for (const auto& v : data)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }

    bool is_zero() const {
        for (const auto& v : data)
            if (v != std::complex<double>(0.0)) return false;
        return true;
    }

    FieldState& operator*=(std::complex<double> s) {
        for (auto& v : data) v *= s;
        return *this;
    }
};

inline void require_same_grid(const FieldState& a, const FieldState& b) {
    if (!(a.grid == b.grid)) throw ArgumentError("fields live on different grids");
}

/// sqrt(sum_j ||u_j - v_j||^2 / sum_j ||v_j||^2)
inline double relative_l2_distance(const FieldState& u, const FieldState& v) {
    require_same_grid(u, v);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < u.data.size(); ++i) {
        num += std::norm(u.data[i] - v.data[i]);
        den += std::norm(v.data[i]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

} // namespace gnls
