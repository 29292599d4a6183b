#pragma once

#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace surfacc {

using Point = Eigen::VectorXd;
using PointRef = Eigen::Ref<const Eigen::VectorXd>;

// Smallest/largest singular value ratio of the edge matrix below which a simplex is degenerate.
inline constexpr double kDegeneracyRatio = 1e-10;

inline double to_degrees(double rad) { return rad * 180.0 / std::numbers::pi; }
inline double to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

struct Ball {
    Point center;
    double radius = 0.0;
};

// A j-simplex in R^d given by its j+1 vertices (1 <= j+1 <= d+1). Construction only checks
// shape and finiteness; operations that need affine independence throw DegeneracyError.
class Simplex {
public:
    explicit Simplex(std::vector<Point> vertices);

    int dim() const { return static_cast<int>(vertices_.size()) - 1; }
    int ambient_dim() const { return static_cast<int>(vertices_.front().size()); }
    const Point& vertex(int i) const { return vertices_.at(static_cast<std::size_t>(i)); }
    const std::vector<Point>& vertices() const { return vertices_; }

    // Columns v_i - v_0, i = 1..j.
    Eigen::MatrixXd edge_matrix() const;
    bool is_degenerate() const;
    // Point with the given barycentric coordinates (must sum to 1).
    Point at(const Eigen::VectorXd& barycentric) const;

private:
    std::vector<Point> vertices_;
};

// Affine subspace through `base` spanned by the orthonormal columns of `basis` (d x k, k may be 0).
class Flat {
public:
    Flat(Point base, Eigen::MatrixXd basis);
    // Orthonormalizes the given direction columns; they must be linearly independent.
    static Flat spanned_by(Point base, const Eigen::MatrixXd& directions);

    int dim() const { return static_cast<int>(basis_.cols()); }
    int ambient_dim() const { return static_cast<int>(base_.size()); }
    const Point& base() const { return base_; }
    const Eigen::MatrixXd& basis() const { return basis_; }

private:
    Point base_;
    Eigen::MatrixXd basis_;
};

Ball circumball(const Simplex& s);
// Center is the point of the simplex nearest to the circumcenter.
Ball min_enclosing_ball(const Simplex& s);
// Interior angle of a triangle at the given vertex, radians.
double plane_angle(const Simplex& triangle, int vertex);
Flat affine_hull(const Simplex& s);
// The flat of points equidistant from all vertices; passes through the circumcenter.
Flat simplex_normal_space(const Simplex& s);
// Largest principal angle between the linear parts of two flats, radians in [0, pi/2].
double flat_angle(const Flat& f, const Flat& g);
Flat orthogonal_complement(const Flat& f);

}  // namespace surfacc
