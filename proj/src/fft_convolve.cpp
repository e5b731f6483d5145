#include "arfima/fft_convolve.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <mutex>

#include "arfima/errors.hpp"

namespace arfima {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

template <class T>
using fftw_buffer = std::unique_ptr<T[], FftwDeleter>;

template <class T>
fftw_buffer<T> fftw_alloc(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) throw std::bad_alloc();
  return fftw_buffer<T>(p);
}

}  // namespace

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

struct FftConvolver::Impl {
  std::size_t n_fft = 0;
  std::size_t n_signal = 0;
  std::size_t max_filter = 0;
  std::size_t min_first = 0;
  fftw_buffer<double> real;
  fftw_buffer<fftw_complex> spec;
  fftw_buffer<fftw_complex> signal_spec;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;

  Impl(std::size_t signal_len, std::size_t filter_len, std::size_t first)
      : n_fft(next_pow2(std::max({signal_len + filter_len - 1 -
                                      std::min(first, signal_len + filter_len - 1),
                                  signal_len, filter_len, std::size_t{2}}))),
        n_signal(signal_len),
        max_filter(filter_len),
        min_first(first),
        real(fftw_alloc<double>(n_fft)),
        spec(fftw_alloc<fftw_complex>(n_fft / 2 + 1)),
        signal_spec(fftw_alloc<fftw_complex>(n_fft / 2 + 1)) {
    std::lock_guard lock(planner_mutex());
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(n_fft), real.get(), spec.get(), FFTW_ESTIMATE);
    inverse = fftw_plan_dft_c2r_1d(static_cast<int>(n_fft), spec.get(), real.get(), FFTW_ESTIMATE);
    if (forward == nullptr || inverse == nullptr) throw NumericalError("FFTW planning failed");
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (inverse) fftw_destroy_plan(inverse);
  }

  void load_signal(std::span<const double> signal) {
    std::fill_n(real.get(), n_fft, 0.0);
    std::copy(signal.begin(), signal.end(), real.get());
    fftw_execute(forward);
    std::copy_n(&spec[0][0], 2 * (n_fft / 2 + 1), &signal_spec[0][0]);
  }
};

FftConvolver::FftConvolver(std::span<const double> signal, std::size_t max_filter_len,
                           std::size_t min_first_output) {
  if (signal.empty() || max_filter_len == 0) {
    throw ArgumentError("FftConvolver: signal and filter must be non-empty");
  }
  impl_ = std::make_unique<Impl>(signal.size(), max_filter_len, min_first_output);
  impl_->load_signal(signal);
}

FftConvolver::~FftConvolver() = default;
FftConvolver::FftConvolver(FftConvolver&&) noexcept = default;
FftConvolver& FftConvolver::operator=(FftConvolver&&) noexcept = default;

std::size_t FftConvolver::fft_size() const { return impl_->n_fft; }
std::size_t FftConvolver::signal_size() const { return impl_->n_signal; }

void FftConvolver::set_signal(std::span<const double> signal) {
  if (signal.size() != impl_->n_signal) {
    throw ArgumentError("FftConvolver::set_signal: length mismatch");
  }
  impl_->load_signal(signal);
}

void FftConvolver::apply(std::span<const double> filter, std::size_t first,
                         std::span<double> out) {
  Impl& m = *impl_;
  if (filter.size() > m.max_filter) {
    throw ArgumentError("FftConvolver::apply: filter longer than planned");
  }
  if (first < m.min_first) {
    throw ArgumentError("FftConvolver::apply: output range overlaps the aliased region");
  }
  if (first + out.size() > m.n_signal + filter.size() - 1 || first + out.size() > m.n_fft) {
    throw ArgumentError("FftConvolver::apply: requested outputs beyond the convolution");
  }
  std::fill_n(m.real.get(), m.n_fft, 0.0);
  std::copy(filter.begin(), filter.end(), m.real.get());
  fftw_execute(m.forward);
  const std::size_t nc = m.n_fft / 2 + 1;
  for (std::size_t i = 0; i < nc; ++i) {
    const double ar = m.spec[i][0], ai = m.spec[i][1];
    const double br = m.signal_spec[i][0], bi = m.signal_spec[i][1];
    m.spec[i][0] = ar * br - ai * bi;
    m.spec[i][1] = ar * bi + ai * br;
  }
  fftw_execute(m.inverse);
  const double scale = 1.0 / static_cast<double>(m.n_fft);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = m.real[first + i] * scale;
}

std::vector<double> fft_linear_convolve(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  FftConvolver conv(a, b.size());
  std::vector<double> out(a.size() + b.size() - 1);
  conv.apply(b, 0, out);
  return out;
}

}  // namespace arfima
