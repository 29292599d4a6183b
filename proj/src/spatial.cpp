#include "surfacc/spatial.hpp"

#include <cmath>
#include <limits>

#include "surfacc/errors.hpp"

namespace surfacc {

namespace {
constexpr int kMaxRing = 6;
}

NearestIndex::NearestIndex(int dim, double cell) : dim_(dim), cell_(cell) {
    if (dim < 1 || dim > 8) throw PreconditionError("NearestIndex supports dimensions 1..8");
    if (!(cell > 0.0)) throw PreconditionError("NearestIndex cell size must be positive");
}

std::vector<long> NearestIndex::cell_of(const PointRef& p) const {
    std::vector<long> c(static_cast<std::size_t>(dim_));
    for (int i = 0; i < dim_; ++i) c[static_cast<std::size_t>(i)] = static_cast<long>(std::floor(p(i) / cell_));
    return c;
}

std::uint64_t NearestIndex::key(const std::vector<long>& c) const {
    std::uint64_t h = 1469598103934665603ull;
    for (long v : c) {
        h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        h *= 1099511628211ull;
    }
    return h;
}

void NearestIndex::insert(const PointRef& p) {
    if (p.size() != dim_) throw PreconditionError("NearestIndex: dimension mismatch");
    points_.emplace_back(p);
    buckets_[key(cell_of(p))].push_back(points_.size() - 1);
}

std::pair<std::size_t, double> NearestIndex::nearest(const PointRef& q) const {
    if (points_.empty()) throw PreconditionError("NearestIndex: query on an empty set");
    const std::vector<long> base = cell_of(q);
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    auto scan = [&](const std::vector<long>& c) {
        const auto it = buckets_.find(key(c));
        if (it == buckets_.end()) return;
        for (std::size_t i : it->second) {
            const double d = (points_[i] - q).norm();
            if (d < best_d || (d == best_d && i < best)) {
                best_d = d;
                best = i;
            }
        }
    };
    std::vector<long> off(static_cast<std::size_t>(dim_));
    std::vector<long> c(static_cast<std::size_t>(dim_));
    for (int ring = 0; ring <= kMaxRing; ++ring) {
        // Visit the cells whose Chebyshev offset from the base cell is exactly `ring`.
        std::fill(off.begin(), off.end(), -ring);
        for (;;) {
            long cheb = 0;
            for (long o : off) cheb = std::max(cheb, std::labs(o));
            if (cheb == ring) {
                for (std::size_t i = 0; i < off.size(); ++i) c[i] = base[i] + off[i];
                scan(c);
            }
            std::size_t i = 0;
            while (i < off.size() && ++off[i] > ring) off[i++] = -ring;
            if (i == off.size()) break;
        }
        if (best_d <= static_cast<double>(ring) * cell_) return {best, best_d};
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const double d = (points_[i] - q).norm();
        if (d < best_d || (d == best_d && i < best)) {
            best_d = d;
            best = i;
        }
    }
    return {best, best_d};
}

}  // namespace surfacc
