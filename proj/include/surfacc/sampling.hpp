#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "surfacc/surfaces.hpp"

namespace surfacc {

struct SampleSet {
    std::vector<Point> vertices;
    double eps = 0.0;
    std::uint64_t seed = 0;
    std::string model;
    int dim = 0;
};

struct SampleOptions {
    // Candidate pool covering radius is eps * min lfs / pool_refinement unless pool_spacing is set.
    double pool_refinement = 12.0;
    double pool_spacing = 0.0;
    std::size_t max_vertices = 500000;
};

// Greedy farthest-point insertion over a candidate pool of spacing h. Insertion stops once every
// pool point g has a vertex within eps * (lfs(g) - h) - h, which covers every surface point
// within eps * lfs because lfs is 1-Lipschitz.
SampleSet generate_eps_sample(const SurfaceModel& s, double eps, std::uint64_t seed, const SampleOptions& opts = {});

struct CoverageReport {
    bool pass = false;
    double worst_ratio = 0.0;
    Point witness;
    std::size_t pool_size = 0;
};

struct CoverageOptions {
    double density_factor = 10.0;  // validation pool points per generation pool point
    double slack = 1e-3;
    SampleOptions generation{};    // defines the generation density the factor refers to
};

CoverageReport verify_eps_sample(const SurfaceModel& s, const std::vector<Point>& vertices, double eps,
                                 const CoverageOptions& opts = {});

// Spacing of the generation pool for the given eps.
double generation_pool_spacing(const SurfaceModel& s, double eps, const SampleOptions& opts);

// Plain-text table: header "# d=<d> eps=<eps> seed=<seed> model=<name>", extra '#' lines, one vertex per line.
void write_sample(std::ostream& out, const SampleSet& set, const std::vector<std::string>& comments = {});
SampleSet read_sample(std::istream& in);

}  // namespace surfacc
