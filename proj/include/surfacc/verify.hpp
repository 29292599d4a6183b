#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "surfacc/bounds.hpp"
#include "surfacc/config.hpp"
#include "surfacc/geom.hpp"
#include "surfacc/surfaces.hpp"

namespace surfacc {

// Absolute slack for measured-versus-bound comparisons; absorbs projection oracle error.
inline constexpr double kVerifySlack = 1e-8;

enum class Quantity { length, angle };

// Running statistics of one inequality "measured <= bound" over many trials.
struct CheckStats {
    std::string name;
    Quantity quantity = Quantity::length;
    std::size_t trials = 0;
    std::size_t violations = 0;
    std::size_t vacuous = 0;  // trials whose bound was flagged invalid
    double max_measured = -std::numeric_limits<double>::infinity();
    double min_bound = std::numeric_limits<double>::infinity();
    double worst_margin = std::numeric_limits<double>::infinity();  // min of bound - measured

    void record(double measured, const BoundResult& bound, double slack = kVerifySlack);
    void record(double measured, double bound, double slack = kVerifySlack);
    void merge(const CheckStats& other);
};

struct LemmaReport {
    std::string lemma;
    std::string model;
    std::uint64_t seed = 0;
    std::size_t skipped = 0;  // trials dropped because a projection was ambiguous
    std::vector<CheckStats> checks;
    // Counts describing the run itself, such as sample size.
    std::vector<std::pair<std::string, double>> facts;
    double runtime_seconds = 0.0;

    std::size_t trials() const;
    std::size_t violations() const;
    double max_measured() const;
    double min_bound() const;
    double worst_margin() const;
    bool pass() const { return violations() == 0; }
    const CheckStats& check(const std::string& name) const;

    // Angles are reported in degrees. Runtime is included only on request so reports stay reproducible.
    nlohmann::json to_json(bool include_runtime = false) const;
    std::string summary() const;
};

// ---- measurements --------------------------------------------------------------------------

struct InterpMeasurement {
    double max_distance = 0.0;
    Point argmax;
    std::size_t skipped = 0;
};

// Uniform barycentric sample of a simplex.
Point random_barycentric_point(const Simplex& s, std::mt19937_64& rng);

// max |x - project(x)| over n random points of the simplex, skipping ambiguous x.
InterpMeasurement measure_interp(const SurfaceModel& s, const Simplex& simplex, int n, std::mt19937_64& rng);
// max over n random x of the angle between aff(triangle) and the tangent space at project(x).
double measure_triangle_normal(const SurfaceModel& s, const Simplex& triangle, int n, std::mt19937_64& rng);

struct NormalVariation {
    double flat_angle;      // between the normal spaces
    double directed_angle;  // between outward normals; NaN unless codimension 1
};
NormalVariation measure_normal_variation(const SurfaceModel& s, const PointRef& p, const PointRef& q);

// Max |measured - bound| for inscribed triangles on the unit 2-sphere with their diametric balls.
double sharpness_sphere(int trials, int points, std::uint64_t seed);

// ---- lemma suite ---------------------------------------------------------------------------

struct SuiteOptions {
    int threads = 1;
    std::uint64_t seed = 1;
};

// Lemma ids accepted by run_lemma_suite.
std::vector<std::string> lemma_catalog();
// Defaults compiled in from config/lemmas.conf.
KeyValueConfig default_lemma_config();

// Runs one lemma on one model. Throws ConfigError for an unknown lemma or unsupported model.
LemmaReport run_lemma_suite(const std::string& lemma, const std::shared_ptr<const SurfaceModel>& model,
                            const KeyValueConfig& config, const SuiteOptions& opts = {});

// Model from a name and "key=value" parameters (sphere, torus, clifford, ellipsoid).
std::shared_ptr<const SurfaceModel> make_model(const std::string& name, const std::vector<std::string>& params = {});

// ---- formula diagnostics -------------------------------------------------------------------

// Least-squares fit of eta(delta) by delta + c3 delta^3 + c5 delta^5 + c7 delta^7 + c9 delta^9 on
// [lo, hi]; returns {c3, c5}.
std::array<double, 2> fit_eta_series(Eta which, double lo = 1e-4, double hi = 0.05, int samples = 400);
// delta in (0, limit) where eta(delta) reaches `angle`, by bisection.
double eta_threshold(Eta which, double angle, double tol = 1e-14);

}  // namespace surfacc
