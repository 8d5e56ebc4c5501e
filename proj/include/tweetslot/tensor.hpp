#pragma once

#include <cmath>
#include <span>

#include <Eigen/Core>

namespace tweetslot {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

template <typename Derived>
std::span<double> as_span(Eigen::PlainObjectBase<Derived>& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

template <typename Derived>
std::span<const double> as_span(const Eigen::PlainObjectBase<Derived>& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

inline std::span<double> as_span(double& x) { return {&x, 1}; }
inline std::span<const double> as_span(const double& x) { return {&x, 1}; }

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

}  // namespace tweetslot
