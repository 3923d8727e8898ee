#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace saddle_raar {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using Index = Eigen::Index;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidMaskError : public Error {
 public:
  using Error::Error;
};

class AliasingError : public Error {
 public:
  using Error::Error;
};

class InvalidDataError : public Error {
 public:
  using Error::Error;
};

/// A parameter outside its admissible interval (beta, rho, fractions, ...).
class RangeError : public Error {
 public:
  using Error::Error;
};

class DivisionError : public Error {
 public:
  using Error::Error;
};

/// Problem too large for the requested certificate path.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Nonnegative measurement magnitudes b with at least one positive entry.
class Magnitudes {
 public:
  Magnitudes() = default;
  explicit Magnitudes(RVec values);

  const RVec& values() const { return b_; }
  Index size() const { return b_.size(); }
  double norm() const { return norm_; }
  double operator[](Index i) const { return b_[i]; }
  bool strictly_positive() const;

 private:
  RVec b_;
  double norm_ = 0.0;
};

inline std::span<const Complex> as_span(const CVec& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
inline std::span<Complex> as_span(CVec& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
inline std::span<const double> as_span(const RVec& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

inline void require_size(Index got, Index want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(want) +
                         ", got " + std::to_string(got));
  }
}

/// Real inner product Re(x^H y).
inline double inner(const CVec& x, const CVec& y) { return x.dot(y).real(); }

}  // namespace saddle_raar
