#pragma once

#include <Eigen/Dense>

#include <complex>
#include <memory>

namespace fsq {

/// Unnormalized complex DFT of fixed size backed by FFTW. Plans are created once
/// with FFTW_ESTIMATE so results are reproducible run to run; execution is
/// thread-safe.
class FourierTransform {
 public:
  explicit FourierTransform(int n);
  ~FourierTransform();
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  int size() const { return n_; }

  // out_k = sum_j in_j exp(+2 pi i j k / n)
  void exp_plus(const std::complex<double>* in, std::complex<double>* out) const;
  // out_k = sum_j in_j exp(-2 pi i j k / n)
  void exp_minus(const std::complex<double>* in, std::complex<double>* out) const;

  Eigen::VectorXcd exp_plus(const Eigen::VectorXcd& in) const;
  Eigen::VectorXcd exp_minus(const Eigen::VectorXcd& in) const;

 private:
  int n_;
  void* plus_plan_;
  void* minus_plan_;
};

std::shared_ptr<const FourierTransform> shared_transform(int n);

}  // namespace fsq
