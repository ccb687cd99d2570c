#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <new>

namespace loclim::detail {
namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan plan_for(std::size_t n) {
  static std::map<std::size_t, fftw_plan> plans;
  std::lock_guard lock(plan_mutex());
  auto it = plans.find(n);
  if (it != plans.end()) return it->second;
  FftBuffer a = fft_buffer(n), b = fft_buffer(n);
  fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(a.get()),
                                 reinterpret_cast<fftw_complex*>(b.get()), FFTW_FORWARD, FFTW_ESTIMATE);
  if (p == nullptr) throw std::bad_alloc();
  plans.emplace(n, p);
  return p;
}

}  // namespace

void FftwFree::operator()(std::complex<double>* p) const noexcept { fftw_free(p); }

FftBuffer fft_buffer(std::size_t n) {
  auto* p = static_cast<std::complex<double>*>(fftw_malloc(sizeof(std::complex<double>) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftBuffer(p);
}

void fft_forward(std::size_t n, std::complex<double>* in, std::complex<double>* out) {
  fftw_plan p = plan_for(n);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in), reinterpret_cast<fftw_complex*>(out));
}

}  // namespace loclim::detail
