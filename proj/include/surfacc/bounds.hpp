#pragma once

#include <array>
#include <string_view>

#include <Eigen/Dense>

namespace surfacc {

enum class Formula {
    interp,
    eta1,
    eta1_full,
    eta2,
    eta2_full,
    tnl,
    acdl_tnl,
    cheng_tnl,
    sqrt3_tnl,
    etnl,
    etnl_eps,
    proj_nearest,
    log_nvl,
    ratio_nvl,
};

std::string_view formula_id(Formula f);
// Human-readable name printed next to evaluated values.
std::string_view formula_name(Formula f);

// Value of a bound formula. An invalid result carries NaN and must not be compared with anything.
struct BoundResult {
    double value;
    bool valid;
    Formula formula;

    static BoundResult ok(Formula f, double v) { return {v, true, f}; }
    static BoundResult none(Formula f);
};

// delta = |pq| / lfs(p); delta_n = dist(q, T_p) / lfs(p).
struct NormalVariationInput {
    double delta = 0.0;
    double delta_n = 0.0;
};

struct Rational {
    long num;
    long den;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

enum class Eta { eta1, eta2 };

// Open upper ends of the delta domains: sqrt(4 sqrt5 - 8) and sqrt((sqrt5 - 1) / 2).
double eta1_limit();
double eta2_limit();

BoundResult interp_bound(double r, double dist_xc, double L);
double interp_taylor_leading(double r, double L);

BoundResult eta1(double delta);
BoundResult eta1_full(const NormalVariationInput& in);
BoundResult eta2(double delta);
BoundResult eta2_full(const NormalVariationInput& in);
BoundResult eta(Eta which, double delta);
// Odd Taylor coefficients of delta, delta^3, delta^5, delta^7.
std::array<Rational, 4> eta_series_coefficients(Eta which);

BoundResult tnl_bound(double R, double ebs_v, double phi);

struct PriorTnlBounds {
    BoundResult acdl;
    BoundResult cheng;
    BoundResult sqrt3;
};
PriorTnlBounds prior_tnl_bounds(double R, double lfs_v);

BoundResult etnl_bound(double kappa, double phi, int codim);
BoundResult etnl_eps_bound(double eps, double phi, int codim);

inline constexpr double kEtnlPhiCodim1 = 49.0;      // degrees
inline constexpr double kEtnlPhiCodimHigh = 48.5;   // degrees
inline constexpr double kEtnlEpsPhiCodim1 = 56.65;  // degrees
inline constexpr double kEtnlEpsPhiCodimHigh = 56.75;

struct CorollaryCoefficients {
    double lfs_xtilde;
    double lfs_u;
};
CorollaryCoefficients corollary_interp_coefs(double eps);

struct NearestVertexBound {
    BoundResult bound;
    bool fallback;
};
NearestVertexBound proj_nearest_vertex_bound(double r, double ebs_x);

struct FeatureTranslation {
    double lfs_p_upper;
    double pq_upper;
};
FeatureTranslation feature_translation(double lfs_q, double eps);

struct PriorNvlBounds {
    BoundResult log;
    BoundResult ratio;
};
PriorNvlBounds prior_nvl_bounds(double delta);

// Extremal configuration for the codimension-1 normal variation bound, with p at the origin,
// lfs(p) = 1 and the normal at p along the x2-axis.
struct DualTangencyWitness {
    Eigen::Vector3d q;
    Eigen::Vector3d z;
    Eigen::Vector3d z_prime;
    double ell;
    double ell_prime;
    double angle;
};
DualTangencyWitness dual_tangency_witness(double delta, double q2);

}  // namespace surfacc
