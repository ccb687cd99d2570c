#pragma once

#include <complex>
#include <cstddef>
#include <memory>

namespace loclim::detail {

struct FftwFree {
  void operator()(std::complex<double>* p) const noexcept;
};

using FftBuffer = std::unique_ptr<std::complex<double>[], FftwFree>;

// SIMD-aligned buffer of n complex values.
FftBuffer fft_buffer(std::size_t n);

// Forward complex DFT out[j] = sum_k in[k] exp(-2 pi i jk / n) on buffers
// from fft_buffer. Plans are created once per size under a lock; execution
// is thread-safe.
void fft_forward(std::size_t n, std::complex<double>* in, std::complex<double>* out);

}  // namespace loclim::detail
