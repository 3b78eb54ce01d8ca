#include "mlq/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace mlq {
namespace fft {
namespace {

fftw_plan get_plan(int n, int sign) {
  static std::mutex plan_mutex;
  static std::map<std::pair<int, int>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto key = std::make_pair(n, sign);
  auto it = plans.find(key);
  if (it != plans.end()) return it->second;
  CVec scratch(n);
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan plan = fftw_plan_dft_1d(n, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plan) throw std::runtime_error("fftw: plan creation failed");
  plans.emplace(key, plan);
  return plan;
}

void run(cplx* data, int n, int sign) {
  if (n <= 0) throw std::invalid_argument("fft: size must be positive");
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(get_plan(n, sign), p, p);
}

}  // namespace

void forward(cplx* data, int n) { run(data, n, FFTW_FORWARD); }
void inverse(cplx* data, int n) { run(data, n, FFTW_BACKWARD); }

}  // namespace fft

void shift_samples(cplx* v, int n, double delta) {
  if (delta == 0.0) return;
  fft::forward(v, n);
  for (int i = 0; i < n; ++i) {
    const double k = fft::mode(i, n);
    v[i] *= std::polar(1.0 / n, 2.0 * k * delta);
  }
  fft::inverse(v, n);
}

void derivative_samples(cplx* v, int n, int order) {
  if (order == 0) return;
  fft::forward(v, n);
  for (int i = 0; i < n; ++i) {
    const int k = fft::mode(i, n);
    if (k == -n / 2 && order % 2 == 1) {
      v[i] = 0.0;
      continue;
    }
    v[i] *= std::pow(cplx(0.0, 2.0 * k), order) / double(n);
  }
  fft::inverse(v, n);
}

TrigInterp::TrigInterp(const cplx* v, int n, double x0) : c_(v, v + n), n_(n), x0_(x0) {
  fft::forward(c_.data(), n);
  for (auto& c : c_) c /= double(n);
}

cplx TrigInterp::operator()(double x) const {
  const double y = 2.0 * (x - x0_);
  cplx acc = c_[0];
  for (int i = 1; i < n_; ++i) {
    const int k = fft::mode(i, n_);
    acc += c_[i] * std::polar(1.0, k * y);
  }
  return acc;
}

}  // namespace mlq
