#pragma once

#include <complex>
#include <cstddef>
#include <mutex>
#include <unordered_map>
#include <vector>

#include <fftw3.h>

#include "masslab/errors.hpp"

namespace masslab::fft {

namespace detail {

// One in-place 1-d plan per (size, direction), created lazily and reused via
// the new-array execute interface. FFTW_UNALIGNED keeps the plan valid for
// whatever buffers callers hand in; plan creation is serialized (FFTW plan
// creation is not thread-safe), execution is not.
inline fftw_plan plan_for(std::size_t n, int sign) {
    static std::mutex mu;
    static std::unordered_map<std::size_t, fftw_plan> plans;
    std::lock_guard<std::mutex> lock(mu);
    const std::size_t key = 2 * n + (sign == FFTW_BACKWARD ? 1 : 0);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    std::vector<std::complex<double>> scratch(n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw error("fftw plan creation failed for n=" + std::to_string(n));
    plans.emplace(key, p);
    return p;
}

inline void execute(std::complex<double>* data, std::size_t n, int sign) {
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan_for(n, sign), buf, buf);
}

}  // namespace detail

/// In-place forward transform, kernel exp(-i k x), unnormalized.
inline void forward(std::complex<double>* data, std::size_t n) {
    detail::execute(data, n, FFTW_FORWARD);
}

/// In-place inverse transform, kernel exp(+i k x), normalized by 1/n so that
/// inverse(forward(a)) == a up to roundoff.
inline void inverse(std::complex<double>* data, std::size_t n) {
    detail::execute(data, n, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) data[j] *= scale;
}

inline void forward(std::vector<std::complex<double>>& a) { forward(a.data(), a.size()); }
inline void inverse(std::vector<std::complex<double>>& a) { inverse(a.data(), a.size()); }

}  // namespace masslab::fft
