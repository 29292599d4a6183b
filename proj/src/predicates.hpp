#pragma once

#include <Eigen/Dense>

namespace surfacc::detail {

using Vec3 = Eigen::Vector3d;

// Sign of det[b - a; c - a; d - a]: positive for (0,0,0), (1,0,0), (0,1,0), (0,0,1).
int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

// +1 if e lies strictly inside the circumsphere of the positively oriented tetrahedron abcd,
// -1 if strictly outside, 0 if on it. Exact.
int insphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& e);

// Whether the nonzero cross product b - a x c - a is exactly zero (collinear points).
bool collinear(const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace surfacc::detail
