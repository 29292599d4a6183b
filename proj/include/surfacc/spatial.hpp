#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "surfacc/geom.hpp"

namespace surfacc {

// Uniform-grid hash for nearest-neighbor queries among a growing point set in R^d.
class NearestIndex {
public:
    NearestIndex(int dim, double cell);

    void insert(const PointRef& p);
    std::size_t size() const { return points_.size(); }
    const Point& point(std::size_t i) const { return points_[i]; }
    // Index and distance of the nearest stored point; the index must not be queried on an empty set.
    std::pair<std::size_t, double> nearest(const PointRef& q) const;

private:
    std::uint64_t key(const std::vector<long>& c) const;
    std::vector<long> cell_of(const PointRef& p) const;

    int dim_;
    double cell_;
    std::vector<Point> points_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

}  // namespace surfacc
