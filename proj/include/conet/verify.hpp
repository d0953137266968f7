#pragma once

// Desk-scale executable proofs: the two bilinear determinant identities
// behind the closed form, the equivalence of iterated elementary transforms
// with the determinant ratios, and residual sweeps over whole nets. Checks
// are pure per point and per index tuple; reports are deterministic given
// (seed data, points, mode).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conet/levy.hpp"
#include "conet/net.hpp"
#include "conet/wronski.hpp"

#include "json.hpp"

namespace conet {

struct CheckResult {
    std::string name;
    std::vector<int> indices;  // 1-based, as in u1..uN
    std::vector<double> point; // empty for symbolic checks
    std::string mode;          // "symbolic" | "float" | "exact"
    double residual = 0.0;     // residual or deviation
    std::string status;        // "pass" | "fail" | "singular"
};

struct Report {
    std::vector<CheckResult> checks;

    void add(CheckResult c) { checks.push_back(std::move(c)); }
    void merge(const Report& other);
    bool all_pass() const;     // no "fail" entries
    std::size_t failures() const;
    std::size_t singular() const;
    double max_residual() const;
    nlohmann::ordered_json to_json() const;
};

// How d/du_k of a determinant is taken in the numeric bilinear checks.
enum class DerivRoute {
    Auto,             // symbolic when the partition total is <= 4, else differencing
    Symbolic,         // differentiate the expanded determinant expression
    FiniteDifference, // central difference, one Richardson level
};

// Finite-difference step used by the bilinear checks.
inline constexpr double kBilinearStep = 1e-4;

// |W| d_k|Xmat_i^l| - |Xmat_i^l| d_k|W| + |Xmat_k^l| |Wmat_ik|, evaluated at
// pt and scaled by the largest term magnitude. Requires i != k.
double check_bilinear_X(const NetState& s0, const Partition& p, int i, int k, int ell, const Point& pt,
                        DerivRoute route = DerivRoute::Auto);

// |W| d_k|Hmat_i| - |Hmat_i| d_k|W| + |Wmat_ki| |Hmat_k|, same contract.
double check_bilinear_H(const NetState& s0, const Partition& p, int i, int k, const Point& pt,
                        DerivRoute route = DerivRoute::Auto);

// Fully symbolic forms of the same identities (partition total <= 4).
bool check_bilinear_X_symbolic(const NetState& s0, const Partition& p, int i, int k, int ell);
bool check_bilinear_H_symbolic(const NetState& s0, const Partition& p, int i, int k);

// --- oracle equivalence -------------------------------------------------------

struct EquivalenceOptions {
    double tolerance = 1e-8;   // float-mode pass threshold (relative)
    bool exact = false;        // compare as exact rationals; deviations must be 0
    std::vector<Rat> bases;    // exact-mode substitution bases
};

struct EquivalenceReport {
    Report report;
    double max_deviation = 0.0;
    std::string first_divergence; // quantity name, empty when none diverges
    bool pass = false;
};

// Composes levy_step along `order` (which must apply exactly m_i steps in
// direction i, consuming distinct seeds) and compares every transformed
// quantity against the closed form at the given points.
EquivalenceReport oracle_equivalence(const NetState& s0, const Partition& p, const std::vector<Step>& order,
                                     const std::vector<Point>& pts, const EquivalenceOptions& opt = {});

// --- residual sweeps ----------------------------------------------------------

// Exact is_zero sweep over all residual families of a symbolic state.
Report full_residual_suite(const NetState& s);

// Numeric sweep of a symbolic state at points.
Report full_residual_suite(const NetState& s, const std::vector<Point>& pts, const EvalMode& mode,
                           double tolerance = 1e-8);

// Numeric sweep of a closed-form net at points; derivative of each
// determinant is taken row-wise (no differencing), so exact mode yields
// exact zeros. Singular points are flagged, not failed.
Report full_residual_suite(const TransformedNet& t, const std::vector<Point>& pts, const EvalMode& mode,
                           double tolerance = 1e-8);

// Closed-form state assembled from the symbolic determinant ratios
// (partition total <= 4); carries no seeds.
NetState symbolic_state(const TransformedNet& t);

// --- reproducible sampling ------------------------------------------------------

// Float points in the box [-1, 1]^N.
std::vector<Point> sample_float_points(int n_dirs, int count, std::uint64_t seed);

// Rational points in [-1, 1]^N (denominator 16).
std::vector<Point> sample_rational_points(int n_dirs, int count, std::uint64_t seed);

// Positive rational substitution bases, one per direction.
std::vector<Rat> sample_bases(int n_dirs, std::uint64_t seed);

// Points from `candidates` where det W of `t` is nonsingular in `mode`.
// Float mode also drops near-singular points and orders the rest best
// conditioned first; exact mode keeps the candidate order.
std::vector<Point> filter_nonsingular(const TransformedNet& t, const std::vector<Point>& candidates,
                                      const EvalMode& mode);

} // namespace conet
