#include "fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>
#include <vector>

namespace hlab::detail {

namespace {

std::mutex& planner_lock() {
  static std::mutex m;
  return m;
}

class Plan {
 public:
  explicit Plan(fftw_plan p) : plan_(p) {
    if (!plan_) throw std::runtime_error("FFTW failed to create a plan");
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard<std::mutex> guard(planner_lock());
    fftw_destroy_plan(plan_);
  }
  void run() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

fftw_complex* raw(std::span<std::complex<double>> data) {
  return reinterpret_cast<fftw_complex*>(data.data());
}

}  // namespace

void fft_all_axes(std::span<std::complex<double>> data, std::span<const std::size_t> dims, int sign) {
  if (data.empty()) return;
  std::vector<int> n(dims.begin(), dims.end());
  fftw_plan p;
  {
    std::lock_guard<std::mutex> guard(planner_lock());
    p = fftw_plan_dft(static_cast<int>(n.size()), n.data(), raw(data), raw(data),
                      sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  Plan(p).run();
}

void fft_one_axis(std::span<std::complex<double>> data, std::span<const std::size_t> dims, std::size_t axis,
                  int sign) {
  if (data.empty()) return;
  std::size_t outer = 1, inner = 1;
  for (std::size_t j = 0; j < axis; ++j) outer *= dims[j];
  for (std::size_t j = axis + 1; j < dims.size(); ++j) inner *= dims[j];
  const std::size_t len = dims[axis];
  fftw_iodim transform{static_cast<int>(len), static_cast<int>(inner), static_cast<int>(inner)};
  fftw_iodim loops[2] = {
      {static_cast<int>(outer), static_cast<int>(len * inner), static_cast<int>(len * inner)},
      {static_cast<int>(inner), 1, 1}};
  fftw_plan p;
  {
    std::lock_guard<std::mutex> guard(planner_lock());
    p = fftw_plan_guru_dft(1, &transform, 2, loops, raw(data), raw(data),
                           sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  Plan(p).run();
}

BatchFft::BatchFft(std::size_t length, std::size_t count, int sign) {
  const int n = static_cast<int>(length);
  const int howmany = static_cast<int>(count);
  fftw_complex* scratch = fftw_alloc_complex(length * count);
  {
    std::lock_guard<std::mutex> guard(planner_lock());
    plan_ = fftw_plan_many_dft(1, &n, howmany, scratch, nullptr, 1, n, scratch, nullptr, 1, n,
                               sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  fftw_free(scratch);
  if (!plan_) throw std::runtime_error("FFTW failed to create a batch plan");
}

BatchFft::~BatchFft() {
  std::lock_guard<std::mutex> guard(planner_lock());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

void BatchFft::run(std::complex<double>* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(plan_), p, p);
}

}  // namespace hlab::detail
