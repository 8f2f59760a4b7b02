#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace hlab::detail {

// Unnormalized in-place DFTs, sign -1 forward and +1 backward. Plans are built
// with FFTW_ESTIMATE under a process-wide lock; execution is lock-free.
void fft_all_axes(std::span<std::complex<double>> data, std::span<const std::size_t> dims, int sign);
void fft_one_axis(std::span<std::complex<double>> data, std::span<const std::size_t> dims, std::size_t axis,
                  int sign);

// Signed frequency index of DFT bin m on an axis of length n.
inline long signed_bin(std::size_t m, std::size_t n) {
  return m < n / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n);
}

}  // namespace hlab::detail

namespace hlab::detail {

// A reusable plan for `count` contiguous in-place transforms of `length` points.
// Safe to run concurrently on distinct buffers.
class BatchFft {
 public:
  BatchFft(std::size_t length, std::size_t count, int sign);
  BatchFft(const BatchFft&) = delete;
  BatchFft& operator=(const BatchFft&) = delete;
  ~BatchFft();
  void run(std::complex<double>* data) const;

 private:
  void* plan_;
};

}  // namespace hlab::detail
