#include "ghostfringe/fft.hpp"
#include "ghostfringe/errors.hpp"

#include <fftw3.h>

#include <mutex>
#include <utility>

namespace ghostfringe::detail {

namespace {
std::mutex &planner_mutex() {
  static std::mutex m;
  return m;
}
} // namespace

Fft::Fft(std::size_t n) : n_(n) {
  if (n == 0)
    throw InvalidArgument("FFT length must be positive");
  std::lock_guard lock(planner_mutex());
  data_ = reinterpret_cast<std::complex<double> *>(fftw_malloc(sizeof(fftw_complex) * n));
  if (!data_)
    throw Error("FFT buffer allocation failed");
  auto *buf = reinterpret_cast<fftw_complex *>(data_);
  const int len = static_cast<int>(n);
  forward_plan_ = fftw_plan_dft_1d(len, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  backward_plan_ = fftw_plan_dft_1d(len, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!forward_plan_ || !backward_plan_) {
    release();
    throw Error("FFTW planning failed");
  }
}

Fft::~Fft() { release(); }

Fft::Fft(Fft &&other) noexcept
    : n_(std::exchange(other.n_, 0)), data_(std::exchange(other.data_, nullptr)),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      backward_plan_(std::exchange(other.backward_plan_, nullptr)) {}

Fft &Fft::operator=(Fft &&other) noexcept {
  if (this != &other) {
    release();
    n_ = std::exchange(other.n_, 0);
    data_ = std::exchange(other.data_, nullptr);
    forward_plan_ = std::exchange(other.forward_plan_, nullptr);
    backward_plan_ = std::exchange(other.backward_plan_, nullptr);
  }
  return *this;
}

void Fft::release() noexcept {
  if (!data_ && !forward_plan_ && !backward_plan_)
    return;
  std::lock_guard lock(planner_mutex());
  if (forward_plan_)
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (backward_plan_)
    fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
  if (data_)
    fftw_free(data_);
  forward_plan_ = backward_plan_ = nullptr;
  data_ = nullptr;
}

void Fft::forward() { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }
void Fft::backward() { fftw_execute(static_cast<fftw_plan>(backward_plan_)); }

} // namespace ghostfringe::detail
