#pragma once

/**
 * @file spectral.hpp
 * @brief FFTW-backed Fourier machinery on the periodic box.
 *
 * Plans are created with FFTW_ESTIMATE so repeated runs pick identical
 * algorithms (bit-reproducible output). Planning is serialised through a
 * process-wide mutex; execution is re-entrant on distinct buffers.
 */

#include "gnls/grid.hpp"

#include <fftw3.h>

#include <array>
#include <complex>
#include <mutex>
#include <span>
#include <vector>

namespace gnls {

namespace detail {
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace detail

/// In-place 3D complex transform pair of size n^3.
class Fft3d {
public:
    explicit Fft3d(int n) : n_(n), scratch_(static_cast<std::size_t>(n) * n * n) {
        std::lock_guard lock(detail::fftw_planner_mutex());
        auto* buf = reinterpret_cast<fftw_complex*>(scratch_.data());
        forward_ = fftw_plan_dft_3d(n, n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_3d(n, n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (!forward_ || !backward_) throw SolverError("FFTW plan creation failed");
    }
    ~Fft3d() {
        std::lock_guard lock(detail::fftw_planner_mutex());
        if (forward_) fftw_destroy_plan(forward_);
        if (backward_) fftw_destroy_plan(backward_);
    }
    Fft3d(const Fft3d&) = delete;
    Fft3d& operator=(const Fft3d&) = delete;

    /// Unnormalised forward transform (sign -1).
    void forward(std::span<std::complex<double>> a) const { run(forward_, a); }

    /// Inverse transform including the 1/n^3 factor.
    void backward(std::span<std::complex<double>> a) const {
        run(backward_, a);
        const double s = 1.0 / static_cast<double>(a.size());
        for (auto& v : a) v *= s;
    }

private:
    void run(fftw_plan p, std::span<std::complex<double>> a) const {
        if (a.size() != scratch_.size()) throw ArgumentError("FFT buffer has the wrong size");
        auto* buf = reinterpret_cast<fftw_complex*>(a.data());
        if (fftw_alignment_of(reinterpret_cast<double*>(buf)) ==
            fftw_alignment_of(reinterpret_cast<double*>(const_cast<std::complex<double>*>(scratch_.data())))) {
            fftw_execute_dft(p, buf, buf);
        } else {
            // misaligned caller buffer: go through the planning buffer
            auto& s = const_cast<ComplexBuffer&>(scratch_);
            std::copy(a.begin(), a.end(), s.begin());
            fftw_execute(p);
            std::copy(s.begin(), s.end(), a.begin());
        }
    }

    int n_;
    ComplexBuffer scratch_;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

/// Transforms plus wavenumber tables for one grid.
class Spectral {
public:
    explicit Spectral(const GridDescriptor& grid) : grid_(grid), fft_(grid.n), work_(grid.points()) {
        grid_.validate();
        const int n = grid.n;
        k_.resize(n);
        kd_.resize(n);
        for (int m = 0; m < n; ++m) {
            k_[m] = grid.wavenumber(m);
            kd_[m] = grid.derivative_wavenumber(m);
        }
        k2_.resize(grid.points());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l) k2_[grid.index(i, j, l)] = k_[i] * k_[i] + k_[j] * k_[j] + k_[l] * k_[l];
    }

    const GridDescriptor& grid() const noexcept { return grid_; }
    const Fft3d& fft() const noexcept { return fft_; }
    const std::vector<double>& k_squared() const noexcept { return k2_; }
    const std::vector<double>& wavenumbers() const noexcept { return k_; }
    const std::vector<double>& derivative_wavenumbers() const noexcept { return kd_; }

    /// Scratch buffer of n^3 values owned by this object.
    ComplexBuffer& work() noexcept { return work_; }

    /// out = d u / d x_axis (spectral).
    void gradient(std::span<const std::complex<double>> u, int axis, std::span<std::complex<double>> out) const {
        std::copy(u.begin(), u.end(), out.begin());
        fft_.forward(out);
        const int n = grid_.n;
        const std::complex<double> I(0.0, 1.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l) {
                    const int m = axis == 0 ? i : (axis == 1 ? j : l);
                    out[grid_.index(i, j, l)] *= I * kd_[m];
                }
        fft_.backward(out);
    }

    /// sum_k |k|^2 |u_hat(k)|^2 / n^3 and sum_k k |u_hat(k)|^2 / n^3 (Parseval sums without dV).
    struct SpectralMoments {
        double grad2 = 0.0;
        std::array<double, 3> momentum{};
    };

    SpectralMoments moments(std::span<const std::complex<double>> u) {
        std::copy(u.begin(), u.end(), work_.begin());
        fft_.forward(work_);
        const int n = grid_.n;
        SpectralMoments m;
        const double inv = 1.0 / static_cast<double>(grid_.points());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l) {
                    const std::size_t q = grid_.index(i, j, l);
                    const double p = std::norm(work_[q]);
                    m.grad2 += k2_[q] * p;
                    m.momentum[0] += kd_[i] * p;
                    m.momentum[1] += kd_[j] * p;
                    m.momentum[2] += kd_[l] * p;
                }
        m.grad2 *= inv;
        for (auto& v : m.momentum) v *= inv;
        return m;
    }

    /// u(x) -> u(x - a) via the phase e^{-i k.a} (exact for band-limited data).
    void translate(std::span<std::complex<double>> u, const std::array<double, 3>& a) const {
        fft_.forward(u);
        const int n = grid_.n;
        std::vector<std::complex<double>> px(n), py(n), pz(n);
        for (int m = 0; m < n; ++m) {
            px[m] = std::polar(1.0, -kd_[m] * a[0]);
            py[m] = std::polar(1.0, -kd_[m] * a[1]);
            pz[m] = std::polar(1.0, -kd_[m] * a[2]);
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const std::complex<double> pij = px[i] * py[j];
                for (int l = 0; l < n; ++l) u[grid_.index(i, j, l)] *= pij * pz[l];
            }
        fft_.backward(u);
    }

private:
    GridDescriptor grid_;
    Fft3d fft_;
    std::vector<double> k_, kd_, k2_;
    ComplexBuffer work_;
};

} // namespace gnls
