#include "fibersqueeze/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace fsq {
namespace {

// The FFTW planner is not re-entrant; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

FourierTransform::FourierTransform(int n) : n_(n) {
  std::vector<std::complex<double>> a(n), b(n);
  auto* in = reinterpret_cast<fftw_complex*>(a.data());
  auto* out = reinterpret_cast<fftw_complex*>(b.data());
  std::lock_guard lock(planner_mutex());
  plus_plan_ = fftw_plan_dft_1d(n, in, out, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  minus_plan_ = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

FourierTransform::~FourierTransform() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plus_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(minus_plan_));
}

void FourierTransform::exp_plus(const std::complex<double>* in, std::complex<double>* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(plus_plan_),
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void FourierTransform::exp_minus(const std::complex<double>* in, std::complex<double>* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(minus_plan_),
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

Eigen::VectorXcd FourierTransform::exp_plus(const Eigen::VectorXcd& in) const {
  Eigen::VectorXcd out(n_);
  exp_plus(in.data(), out.data());
  return out;
}

Eigen::VectorXcd FourierTransform::exp_minus(const Eigen::VectorXcd& in) const {
  Eigen::VectorXcd out(n_);
  exp_minus(in.data(), out.data());
  return out;
}

std::shared_ptr<const FourierTransform> shared_transform(int n) {
  static std::mutex cache_mutex;
  static std::map<int, std::weak_ptr<const FourierTransform>> cache;
  std::lock_guard lock(cache_mutex);
  if (auto existing = cache[n].lock()) return existing;
  auto created = std::make_shared<const FourierTransform>(n);
  cache[n] = created;
  return created;
}

}  // namespace fsq
