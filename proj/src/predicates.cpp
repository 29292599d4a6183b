#include "predicates.hpp"

#include <cmath>

#include <gmpxx.h>

namespace surfacc::detail {

namespace {

// Generous multiples of the unit roundoff; a double result outside the band has a certain sign.
constexpr double kOrientErr = 1e-14;
constexpr double kInsphereErr = 1e-13;

int sign_of(const mpq_class& v) { return sgn(v); }

mpq_class det3(const mpq_class m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

int orient_exact(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    mpq_class m[3][3];
    const Vec3* rows[3] = {&b, &c, &d};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = mpq_class((*rows[i])(j)) - mpq_class(a(j));
    return sign_of(det3(m));
}

int insphere_exact(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& e) {
    mpq_class m[4][4];
    const Vec3* rows[4] = {&a, &b, &c, &d};
    for (int i = 0; i < 4; ++i) {
        mpq_class lift = 0;
        for (int j = 0; j < 3; ++j) {
            m[i][j] = mpq_class((*rows[i])(j)) - mpq_class(e(j));
            lift += m[i][j] * m[i][j];
        }
        m[i][3] = lift;
    }
    mpq_class det = 0;
    for (int col = 0; col < 4; ++col) {
        mpq_class minor[3][3];
        for (int i = 1; i < 4; ++i) {
            int cj = 0;
            for (int j = 0; j < 4; ++j) {
                if (j == col) continue;
                minor[i - 1][cj++] = m[i][j];
            }
        }
        const mpq_class term = m[0][col] * det3(minor);
        if (col % 2 == 0)
            det += term;
        else
            det -= term;
    }
    return -sign_of(det);
}

}  // namespace

int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    const Vec3 u = b - a;
    const Vec3 v = c - a;
    const Vec3 w = d - a;
    const double det = u(0) * (v(1) * w(2) - v(2) * w(1)) - u(1) * (v(0) * w(2) - v(2) * w(0)) +
                       u(2) * (v(0) * w(1) - v(1) * w(0));
    const double perm = std::abs(u(0)) * (std::abs(v(1) * w(2)) + std::abs(v(2) * w(1))) +
                        std::abs(u(1)) * (std::abs(v(0) * w(2)) + std::abs(v(2) * w(0))) +
                        std::abs(u(2)) * (std::abs(v(0) * w(1)) + std::abs(v(1) * w(0)));
    if (det > kOrientErr * perm) return 1;
    if (-det > kOrientErr * perm) return -1;
    return orient_exact(a, b, c, d);
}

int insphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& e) {
    const Vec3 p[4] = {a - e, b - e, c - e, d - e};
    double lift[4];
    for (int i = 0; i < 4; ++i) lift[i] = p[i].squaredNorm();
    // Expansion along the lift column of the 4x4 determinant with rows (p_i, |p_i|^2).
    auto tri = [&](int i, int j, int k) { return p[i].dot(p[j].cross(p[k])); };
    const double det = -lift[0] * tri(1, 2, 3) + lift[1] * tri(0, 2, 3) - lift[2] * tri(0, 1, 3) + lift[3] * tri(0, 1, 2);
    // Bound each triple product by the permanent of absolute values.
    auto perm3 = [&](int i, int j, int k) {
        const Vec3 x = p[i].cwiseAbs();
        const Vec3 y = p[j].cwiseAbs();
        const Vec3 z = p[k].cwiseAbs();
        return x(0) * (y(1) * z(2) + y(2) * z(1)) + x(1) * (y(0) * z(2) + y(2) * z(0)) + x(2) * (y(0) * z(1) + y(1) * z(0));
    };
    const double perm = lift[0] * perm3(1, 2, 3) + lift[1] * perm3(0, 2, 3) + lift[2] * perm3(0, 1, 3) +
                        lift[3] * perm3(0, 1, 2);
    if (det > kInsphereErr * perm) return -1;
    if (-det > kInsphereErr * perm) return 1;
    return insphere_exact(a, b, c, d, e);
}

bool collinear(const Vec3& a, const Vec3& b, const Vec3& c) {
    mpq_class u[3];
    mpq_class v[3];
    for (int j = 0; j < 3; ++j) {
        u[j] = mpq_class(b(j)) - mpq_class(a(j));
        v[j] = mpq_class(c(j)) - mpq_class(a(j));
    }
    return u[1] * v[2] - u[2] * v[1] == 0 && u[2] * v[0] - u[0] * v[2] == 0 && u[0] * v[1] - u[1] * v[0] == 0;
}

}  // namespace surfacc::detail
