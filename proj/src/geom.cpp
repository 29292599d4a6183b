#include "surfacc/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "surfacc/errors.hpp"

namespace surfacc {

namespace {

Eigen::MatrixXd full_q(const Eigen::MatrixXd& a) {
    const auto d = a.rows();
    if (a.cols() == 0) return Eigen::MatrixXd::Identity(d, d);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    return qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
}

bool rank_deficient(const Eigen::MatrixXd& m) {
    if (m.cols() == 0) return false;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    return !(smax > 0.0) || smin < kDegeneracyRatio * smax;
}

void require_nondegenerate(const Simplex& s, const char* op) {
    if (s.is_degenerate()) throw DegeneracyError(std::string(op) + ": simplex is degenerate");
}

// Circumcenter of the vertices v[idx] inside their affine hull, with barycentric coordinates over idx.
Point face_circumcenter(const std::vector<Point>& v, const std::vector<int>& idx, Eigen::VectorXd& bary) {
    const Point& o = v[static_cast<std::size_t>(idx[0])];
    const auto m = static_cast<Eigen::Index>(idx.size()) - 1;
    bary.resize(m + 1);
    if (m == 0) {
        bary(0) = 1.0;
        return o;
    }
    Eigen::MatrixXd e(o.size(), m);
    for (Eigen::Index i = 0; i < m; ++i) e.col(i) = v[static_cast<std::size_t>(idx[i + 1])] - o;
    const Eigen::MatrixXd g = e.transpose() * e;
    const Eigen::VectorXd mu = g.ldlt().solve(0.5 * g.diagonal());
    bary(0) = 1.0 - mu.sum();
    bary.tail(m) = mu;
    return o + e * mu;
}

}  // namespace

Simplex::Simplex(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.empty()) throw PreconditionError("simplex needs at least one vertex");
    const auto d = vertices_.front().size();
    if (d == 0) throw PreconditionError("simplex vertices must have positive dimension");
    if (vertices_.size() > static_cast<std::size_t>(d) + 1)
        throw PreconditionError("a simplex in R^" + std::to_string(d) + " has at most " + std::to_string(d + 1) +
                                " vertices");
    for (const auto& p : vertices_) {
        if (p.size() != d) throw PreconditionError("simplex vertices have mixed dimensions");
        if (!p.allFinite()) throw PreconditionError("simplex vertex has non-finite coordinates");
    }
}

Eigen::MatrixXd Simplex::edge_matrix() const {
    Eigen::MatrixXd e(ambient_dim(), dim());
    for (int i = 0; i < dim(); ++i) e.col(i) = vertices_[static_cast<std::size_t>(i) + 1] - vertices_[0];
    return e;
}

bool Simplex::is_degenerate() const { return rank_deficient(edge_matrix()); }

Point Simplex::at(const Eigen::VectorXd& barycentric) const {
    if (barycentric.size() != dim() + 1) throw PreconditionError("barycentric coordinate count mismatch");
    Point x = Point::Zero(ambient_dim());
    for (int i = 0; i <= dim(); ++i) x += barycentric(i) * vertices_[static_cast<std::size_t>(i)];
    return x;
}

Flat::Flat(Point base, Eigen::MatrixXd basis) : base_(std::move(base)), basis_(std::move(basis)) {
    if (basis_.rows() != base_.size()) throw PreconditionError("flat basis and base point differ in dimension");
    if (basis_.cols() > basis_.rows()) throw PreconditionError("flat basis has more columns than the ambient dimension");
    if (!base_.allFinite() || !basis_.allFinite()) throw PreconditionError("flat has non-finite entries");
    const Eigen::MatrixXd gram = basis_.transpose() * basis_;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(basis_.cols(), basis_.cols());
    if (basis_.cols() > 0 && (gram - id).cwiseAbs().maxCoeff() > 1e-12)
        throw PreconditionError("flat basis is not orthonormal");
}

Flat Flat::spanned_by(Point base, const Eigen::MatrixXd& directions) {
    if (rank_deficient(directions)) throw DegeneracyError("flat directions are linearly dependent");
    const auto k = directions.cols();
    Eigen::MatrixXd q = full_q(directions).leftCols(k);
    return Flat(std::move(base), std::move(q));
}

Ball circumball(const Simplex& s) {
    require_nondegenerate(s, "circumball");
    const Point& v0 = s.vertex(0);
    if (s.dim() == 0) return {v0, 0.0};
    const Eigen::MatrixXd e = s.edge_matrix();
    const Eigen::MatrixXd g = e.transpose() * e;
    const Eigen::VectorXd rhs = 0.5 * g.diagonal();
    const Eigen::VectorXd lambda = g.ldlt().solve(rhs);
    const Point c = v0 + e * lambda;
    double r = 0.0;
    for (const auto& v : s.vertices()) r = std::max(r, (v - c).norm());
    return {c, r};
}

Ball min_enclosing_ball(const Simplex& s) {
    require_nondegenerate(s, "min_enclosing_ball");
    const int n = s.dim() + 1;
    if (n > 20) throw PreconditionError("min_enclosing_ball supports at most 20 vertices");
    // The circumcenter c projects onto aff(face) at the face's circumcenter, at squared distance
    // R^2 - R_face^2. The nearest simplex point to c is therefore the circumcenter of largest radius
    // among faces that contain their own circumcenter; computing it per face avoids projecting a
    // far-away c.
    Point best;
    double best_radius = -1.0;
    std::vector<int> idx;
    Eigen::VectorXd bary;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        idx.clear();
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) idx.push_back(i);
        const Point p = face_circumcenter(s.vertices(), idx, bary);
        if (bary.minCoeff() < -1e-12) continue;
        const double radius = (s.vertex(idx[0]) - p).norm();
        if (radius > best_radius) {
            best_radius = radius;
            best = p;
        }
    }
    double r = 0.0;
    for (const auto& v : s.vertices()) r = std::max(r, (v - best).norm());
    return {best, r};
}

double plane_angle(const Simplex& triangle, int vertex) {
    if (triangle.dim() != 2) throw PreconditionError("plane_angle needs a triangle");
    if (vertex < 0 || vertex > 2) throw PreconditionError("plane_angle vertex index out of range");
    require_nondegenerate(triangle, "plane_angle");
    const Point& v = triangle.vertex(vertex);
    const Point a = (triangle.vertex((vertex + 1) % 3) - v).normalized();
    const Point b = (triangle.vertex((vertex + 2) % 3) - v).normalized();
    return 2.0 * std::atan2((a - b).norm(), (a + b).norm());
}

Flat affine_hull(const Simplex& s) {
    require_nondegenerate(s, "affine_hull");
    return Flat::spanned_by(s.vertex(0), s.edge_matrix());
}

Flat simplex_normal_space(const Simplex& s) {
    const Ball cb = circumball(s);
    const Eigen::MatrixXd q = full_q(s.edge_matrix());
    return Flat(cb.center, q.rightCols(s.ambient_dim() - s.dim()));
}

double flat_angle(const Flat& f, const Flat& g) {
    if (f.ambient_dim() != g.ambient_dim()) throw PreconditionError("flat_angle: flats live in different spaces");
    const Flat& small = f.dim() <= g.dim() ? f : g;
    const Flat& large = f.dim() <= g.dim() ? g : f;
    if (small.dim() == 0) return 0.0;
    const Eigen::MatrixXd& a = small.basis();
    const Eigen::MatrixXd& b = large.basis();
    const Eigen::VectorXd cosines = Eigen::JacobiSVD<Eigen::MatrixXd>(a.transpose() * b).singularValues();
    const double c = std::clamp(cosines(cosines.size() - 1), 0.0, 1.0);
    if (c < std::numbers::sqrt2 / 2) return std::acos(c);
    // Near-parallel: the sine of the largest angle is better conditioned.
    const Eigen::MatrixXd residual = a - b * (b.transpose() * a);
    const double sn = std::clamp(Eigen::JacobiSVD<Eigen::MatrixXd>(residual).singularValues()(0), 0.0, 1.0);
    return std::asin(sn);
}

Flat orthogonal_complement(const Flat& f) {
    const Eigen::MatrixXd q = full_q(f.basis());
    return Flat(f.base(), q.rightCols(f.ambient_dim() - f.dim()));
}

}  // namespace surfacc
