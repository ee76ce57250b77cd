// Basic aliases shared across the library.

#ifndef HHO2D_TYPES_HPP
#define HHO2D_TYPES_HPP

#include <Eigen/Dense>

#include <functional>

namespace hho2d {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Pointwise-evaluable fields used for data, exact solutions and projections.
using ScalarField = std::function<double(const Vec2 &)>;
using VectorField = std::function<Vec2(const Vec2 &)>;
using TensorField = std::function<Mat2(const Vec2 &)>;

} // namespace hho2d

#endif
