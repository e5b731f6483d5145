#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace arfima {

std::size_t next_pow2(std::size_t n);

/// Real-input FFT convolution of a fixed signal against varying filters.
///
/// The signal spectrum is computed once; each apply() costs one forward
/// transform of the filter plus one inverse transform. Instances own their
/// FFTW plans and buffers and are not safe for concurrent use; give each
/// chain its own.
class FftConvolver {
 public:
  /// `max_filter_len` bounds the filter length accepted by apply(). Outputs
  /// before `min_first_output` are never requested, which lets the transform
  /// be shorter than the full convolution: the size is the next power of two
  /// >= full_length - min_first_output.
  FftConvolver(std::span<const double> signal, std::size_t max_filter_len,
               std::size_t min_first_output = 0);
  ~FftConvolver();
  FftConvolver(FftConvolver&&) noexcept;
  FftConvolver& operator=(FftConvolver&&) noexcept;
  FftConvolver(const FftConvolver&) = delete;
  FftConvolver& operator=(const FftConvolver&) = delete;

  std::size_t fft_size() const;
  std::size_t signal_size() const;

  /// Replace the signal (same length).
  void set_signal(std::span<const double> signal);

  /// Full linear convolution outputs [first, first + count).
  void apply(std::span<const double> filter, std::size_t first, std::span<double> out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Full linear convolution (length a.size() + b.size() - 1) via FFT.
std::vector<double> fft_linear_convolve(std::span<const double> a, std::span<const double> b);

}  // namespace arfima
