#pragma once

// Shared primitives for the sparse adaptive estimators: soft thresholding,
// threshold-based support extraction, support-restricted matrix products and
// a multiplication counter used for complexity accounting.

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sparls {

using Index = Eigen::Index;
using Complex = std::complex<double>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};
template <typename T>
inline constexpr bool is_complex_v = is_complex<T>::value;

// Strictly increasing list of 0-based coefficient indices.
using SupportSet = std::vector<Index>;

// Tally of scalar multiplications. One complex multiplication and one
// division each count as a single operation; additions and comparisons are
// free.
struct MultCounter {
  std::uint64_t count = 0;

  void add(std::uint64_t n) { count += n; }
  void reset() { count = 0; }
};

// sgn with sgn(0) = +1.
inline double sign(double x) { return x >= 0.0 ? 1.0 : -1.0; }

// Entrywise shrinkage toward zero by tau. Real entries map to
// sgn(r) * max(|r| - tau, 0); complex entries keep their phase and shrink
// their modulus. Entries with |r| <= tau map to exact zero.
template <typename Scalar>
Vector<Scalar> soft_threshold(const Vector<Scalar>& r, double tau) {
  if (tau < 0.0) throw std::invalid_argument("soft_threshold: tau must be >= 0");
  Vector<Scalar> out(r.size());
  for (Index i = 0; i < r.size(); ++i) {
    const double mag = std::abs(r[i]);
    if (mag > tau) {
      if constexpr (is_complex_v<Scalar>) {
        out[i] = r[i] * ((mag - tau) / mag);
      } else {
        out[i] = sign(r[i]) * (mag - tau);
      }
    } else {
      out[i] = Scalar(0);
    }
  }
  return out;
}

// Indices whose entries strictly exceed the threshold. Real vectors split
// into a positive set {i : r_i > tau} and a negative set {i : r_i < -tau};
// complex vectors put {i : |r_i| > tau} in the first set and leave the
// second empty. Both sets come back in ascending order.
template <typename Scalar>
std::pair<SupportSet, SupportSet> threshold_support(const Vector<Scalar>& r, double tau) {
  if (tau < 0.0) throw std::invalid_argument("threshold_support: tau must be >= 0");
  SupportSet plus;
  SupportSet minus;
  for (Index i = 0; i < r.size(); ++i) {
    if constexpr (is_complex_v<Scalar>) {
      if (std::abs(r[i]) > tau) plus.push_back(i);
    } else {
      if (r[i] > tau) {
        plus.push_back(i);
      } else if (r[i] < -tau) {
        minus.push_back(i);
      }
    }
  }
  return {std::move(plus), std::move(minus)};
}

// Indices of exactly nonzero entries, ascending.
template <typename Scalar>
SupportSet nonzero_support(const Vector<Scalar>& v) {
  SupportSet s;
  for (Index i = 0; i < v.size(); ++i) {
    if (v[i] != Scalar(0)) s.push_back(i);
  }
  return s;
}

// Entries of v at the given indices, in the given order.
template <typename Scalar>
Vector<Scalar> gather(const Vector<Scalar>& v, const SupportSet& indices) {
  Vector<Scalar> out(static_cast<Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const Index j = indices[i];
    if (j < 0 || j >= v.size()) throw std::out_of_range("gather: index out of range");
    out[static_cast<Index>(i)] = v[j];
  }
  return out;
}

// Product of the columns of a listed in support with the restricted vector
// v (length |support|): equivalently a times v zero-padded to full length.
// Accumulation runs in ascending support order, one column at a time, each
// column top to bottom, in plain double precision, so the result is
// bit-identical to a dense product carried out in ascending column order.
// Adds rows(a) * |support| to the counter.
template <typename Scalar>
Vector<Scalar> restricted_matvec(const Matrix<Scalar>& a, const Vector<Scalar>& v,
                                 const SupportSet& support, MultCounter& counter) {
  if (v.size() != static_cast<Index>(support.size()))
    throw std::invalid_argument("restricted_matvec: vector length does not match support size");
  const Index m = a.rows();
  Vector<Scalar> out = Vector<Scalar>::Zero(m);
  for (std::size_t idx = 0; idx < support.size(); ++idx) {
    const Index j = support[idx];
    if (j < 0 || j >= a.cols())
      throw std::out_of_range("restricted_matvec: support index out of range");
    const Scalar vj = v[static_cast<Index>(idx)];
    for (Index r = 0; r < m; ++r) out[r] += a(r, j) * vj;
  }
  counter.add(static_cast<std::uint64_t>(m) * support.size());
  return out;
}

}  // namespace sparls
