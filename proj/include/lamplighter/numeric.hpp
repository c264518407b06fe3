#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lamplighter {

using Rational = mpq_class;

/// Thrown when a computation would exceed its configured size budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double to_double(double x) { return x; }
inline double to_double(const Rational& q) { return q.get_d(); }

/// Exact rational value of a finite binary double.
inline Rational exact_rational(double x) {
  Rational q(x);
  q.canonicalize();
  return q;
}

template <class T>
T scalar_from(double x);
template <>
inline double scalar_from<double>(double x) { return x; }
template <>
inline Rational scalar_from<Rational>(double x) { return exact_rational(x); }

inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(const Rational& q) { return sgn(q) == 0; }

/// Dense row-major matrix; just enough for small kernels and projectors.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  const std::vector<T>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// A probability given on the command line or in code. `exact` is set when
/// the value was written as a fraction or a terminating decimal.
struct Probability {
  double value = 0.0;
  std::optional<Rational> exact;

  static Probability from_double(double p) { return {p, exact_rational(p)}; }
  static Probability from_rational(const Rational& q) { return {q.get_d(), q}; }
  static Probability parse(std::string_view text);

  Rational rational() const { return exact ? *exact : exact_rational(value); }
};

std::string to_string(const Rational& q);

}  // namespace lamplighter
