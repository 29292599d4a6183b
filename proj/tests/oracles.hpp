#pragma once

// Reference computations used by the tests and the acceptance binary. Each one takes a different
// route from the library code it checks.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline VectorXd random_vector(int d, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    VectorXd v(d);
    for (int i = 0; i < d; ++i) v(i) = n(rng);
    return v;
}

inline MatrixXd random_orthogonal(int d, std::mt19937_64& rng) {
    MatrixXd a(d, d);
    for (int j = 0; j < d; ++j) a.col(j) = random_vector(d, rng);
    Eigen::HouseholderQR<MatrixXd> qr(a);
    MatrixXd q = qr.householderQ() * MatrixXd::Identity(d, d);
    return q;
}

// Center of the sphere through the given points inside their affine hull, from the normal
// equations 2 (p_i - p_0) . c = |p_i|^2 - |p_0|^2 restricted to c = p_0 + E y.
inline VectorXd circumcenter(const std::vector<VectorXd>& pts) {
    if (pts.size() == 1) return pts[0];
    const int m = static_cast<int>(pts.size()) - 1;
    MatrixXd e(pts[0].size(), m);
    for (int i = 0; i < m; ++i) e.col(i) = pts[i + 1] - pts[0];
    MatrixXd a(m, m);
    VectorXd b(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) a(i, j) = 2.0 * e.col(i).dot(e.col(j));
        b(i) = e.col(i).squaredNorm();
    }
    return pts[0] + e * a.colPivHouseholderQr().solve(b);
}

struct Sphere {
    VectorXd center;
    double radius;
};

namespace detail {
inline Sphere welzl(std::vector<VectorXd>& p, std::size_t n, std::vector<VectorXd>& boundary) {
    Sphere s;
    if (boundary.empty()) {
        s = {p[0], 0.0};
        if (n == 0) return s;
    } else {
        s.center = circumcenter(boundary);
        s.radius = (boundary[0] - s.center).norm();
    }
    if (boundary.size() == static_cast<std::size_t>(p[0].size()) + 1) return s;
    for (std::size_t i = 0; i < n; ++i) {
        if ((p[i] - s.center).norm() <= s.radius * (1.0 + 1e-12) + 1e-15) continue;
        boundary.push_back(p[i]);
        s = welzl(p, i, boundary);
        boundary.pop_back();
        // Move to front.
        std::rotate(p.begin(), p.begin() + static_cast<long>(i), p.begin() + static_cast<long>(i) + 1);
    }
    return s;
}
}  // namespace detail

// Smallest enclosing sphere of a point set, Welzl's move-to-front recursion.
inline Sphere smallest_enclosing_sphere(std::vector<VectorXd> pts) {
    std::vector<VectorXd> boundary;
    return detail::welzl(pts, pts.size(), boundary);
}

// Largest angle from a unit direction of the 2-flat span(f0, f1) to span(G), by scanning the
// direction circle on a fine grid and refining around the best cell.
inline double flat_angle_grid(const VectorXd& f0, const VectorXd& f1, const MatrixXd& g_orthonormal) {
    const auto angle_at = [&](double t) {
        const VectorXd u = std::cos(t) * f0 + std::sin(t) * f1;
        const double c = std::min(1.0, (g_orthonormal.transpose() * u).norm());
        return std::acos(c);
    };
    const int n = 20000;
    double best = -1.0, best_t = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = std::numbers::pi * i / n;
        const double a = angle_at(t);
        if (a > best) best = a, best_t = t;
    }
    double lo = best_t - std::numbers::pi / n, hi = best_t + std::numbers::pi / n;
    for (int it = 0; it < 100; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (angle_at(m1) < angle_at(m2)) lo = m1;
        else hi = m2;
    }
    return std::max(best, angle_at(0.5 * (lo + hi)));
}

// Nearest point on the torus (major R0, minor r0 around the z-axis) by a grid scan of
// the meridian circle in the half-plane through x, then bisection on the derivative.
inline Eigen::Vector3d torus_nearest(const Eigen::Vector3d& x, double R0, double r0) {
    const double rho = std::hypot(x.x(), x.y());
    const double cx = x.x() / rho, cy = x.y() / rho;
    const auto point = [&](double t) {
        const double w = R0 + r0 * std::cos(t);
        return Eigen::Vector3d(w * cx, w * cy, r0 * std::sin(t));
    };
    const auto dist = [&](double t) { return (point(t) - x).norm(); };
    const int n = 3600;
    double best_t = 0.0, best = dist(0.0);
    for (int i = 1; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * i / n;
        if (dist(t) < best) best = dist(t), best_t = t;
    }
    // Bisection on the sign of d/dt |point(t) - x|^2 around the best cell.
    const auto slope = [&](double t) {
        const Eigen::Vector3d dp(-r0 * std::sin(t) * cx, -r0 * std::sin(t) * cy, r0 * std::cos(t));
        return (point(t) - x).dot(dp);
    };
    double lo = best_t - 2.0 * std::numbers::pi / n, hi = best_t + 2.0 * std::numbers::pi / n;
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (lo + hi);
        if (slope(m) < 0.0) lo = m;
        else hi = m;
    }
    return point(0.5 * (lo + hi));
}

// Distance from p to the torus medial set, sampled: the core circle and a segment of the z-axis.
inline double torus_medial_distance(const Eigen::Vector3d& p, double R0, double extent, int samples = 200000) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        const double t = 2.0 * std::numbers::pi * i / samples;
        best = std::min(best, (p - Eigen::Vector3d(R0 * std::cos(t), R0 * std::sin(t), 0.0)).norm());
        const double z = -extent + 2.0 * extent * i / (samples - 1);
        best = std::min(best, (p - Eigen::Vector3d(0.0, 0.0, z)).norm());
    }
    return best;
}

// +1 inside, -1 outside the sphere through a, b, c, d, from its explicit center. Only meaningful when e
// is well away from the sphere.
inline int insphere_sign(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c,
                         const Eigen::Vector3d& d, const Eigen::Vector3d& e) {
    const VectorXd center = circumcenter({a, b, c, d});
    const double r = (a - center).norm();
    const double de = (e - center).norm();
    if (de < r) return 1;
    if (de > r) return -1;
    return 0;
}

}  // namespace oracle
