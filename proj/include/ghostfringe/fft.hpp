#pragma once

#include <complex>
#include <cstddef>
#include <memory>

namespace ghostfringe::detail {

/// In-place complex FFT of fixed length backed by FFTW.
///
/// Planning is serialized internally; execute() only touches this object's
/// own buffer, so distinct instances may run concurrently.
class Fft {
public:
  explicit Fft(std::size_t n);
  ~Fft();
  Fft(const Fft &) = delete;
  Fft &operator=(const Fft &) = delete;
  Fft(Fft &&) noexcept;
  Fft &operator=(Fft &&) noexcept;

  std::size_t size() const noexcept { return n_; }
  std::complex<double> *data() noexcept { return data_; }
  const std::complex<double> *data() const noexcept { return data_; }

  /// Unnormalized forward transform (exp(-i...)).
  void forward();
  /// Unnormalized backward transform (exp(+i...)); divide by size() to invert.
  void backward();

private:
  void release() noexcept;

  std::size_t n_ = 0;
  std::complex<double> *data_ = nullptr;
  void *forward_plan_ = nullptr;
  void *backward_plan_ = nullptr;
};

} // namespace ghostfringe::detail
