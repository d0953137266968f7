#pragma once

// Conjugate-net state: rotation coefficients, tangent vectors, Lame
// coefficients, surface point, and the seed solutions carried for
// transforms. Residual operators return expressions for the defining
// equations
//
//   d_k beta_ij = beta_ik beta_kj          (i,j,k distinct)
//   d_i X_j     = beta_ji X_i              (i != j, componentwise)
//   d_i H_j     = beta_ij H_i              (i != j)
//   d_i x       = X_i H_i                  (componentwise)
//
// so callers can test them exactly (is_zero) or numerically at points.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conet/expr.hpp"

#include "json.hpp"

namespace conet {

// One scalar solution xi of the tangent linear system together with its
// potential Omega, d_k Omega = xi_k H_k.
struct SeedRecord {
    std::string label;
    std::vector<RationalExpr> xi; // per direction, size N
    RationalExpr omega;
};

struct NetState {
    int N = 0; // directions
    int P = 0; // ambient dimension, N <= P
    std::map<std::pair<int, int>, RationalExpr> beta; // off-diagonal only; absent entry = 0
    std::vector<std::vector<RationalExpr>> X;         // N x P tangent vectors
    std::vector<RationalExpr> H;                      // N Lame coefficients
    std::vector<RationalExpr> x;                      // P surface point
    std::vector<SeedRecord> seeds;

    const RationalExpr& beta_at(int i, int j) const;
    void set_beta(int i, int j, RationalExpr value);
    const SeedRecord& seed(const std::string& label) const;
    int seed_index(const std::string& label) const; // -1 if absent
};

// Input for the trivial background beta == 0 with separated data: every
// X_i component, H_i and xi_i may depend on u_i only, and must be
// quotient-free so the potentials integrate in closed form.
struct BackgroundSpec {
    int N = 0;
    int P = 0;
    std::vector<std::vector<RationalExpr>> tangents; // N x P
    std::vector<RationalExpr> lame;                  // N
    std::vector<std::pair<std::string, std::vector<RationalExpr>>> seeds;
};

// Builds the zero-background state; x and the seed potentials are the
// per-direction antiderivatives, with all integration constants zero.
NetState make_background(const BackgroundSpec& spec);

// d_k beta_ij - beta_ik * beta_kj, indices pairwise distinct.
RationalExpr residual_darboux(const NetState& s, int i, int j, int k);

// d_i X_j - beta_ji * X_i, componentwise over the ambient index.
std::vector<RationalExpr> residual_tangent(const NetState& s, int i, int j);

// d_i H_j - beta_ij * H_i.
RationalExpr residual_lame(const NetState& s, int i, int j);

// d_i x - X_i * H_i, componentwise.
std::vector<RationalExpr> residual_point(const NetState& s, int i);

// Seeds solve the same linear system as X; this shares that code path.
RationalExpr residual_seed(const NetState& s, int i, int j, int seed_idx);

// d_k Omega^a - xi^a_k * H_k.
RationalExpr residual_omega(const NetState& s, int k, int seed_idx);

// Laplace form, cleared of logarithms:
//   H_i H_j d_i d_j x - (d_j H_i) H_j d_i x - (d_i H_j) H_i d_j x
RationalExpr residual_laplace(const NetState& s, int i, int j, int ell);

// True when every residual family of the state vanishes identically.
bool validate_state(const NetState& s);

// --- config / dump documents -----------------------------------------------

struct Step {
    int direction = 0; // 0-based internally; 1-based in documents
    std::string seed;
};

struct NetConfig {
    BackgroundSpec background;
    std::optional<std::vector<int>> partition;
    std::vector<Step> steps;
};

// Net specification document: {"N", "P", "tangents", "lame", "seeds",
// optional "partition", optional "steps"}. Expression strings use the
// exprcore grammar; directions in documents are 1-based.
NetConfig load_config(const nlohmann::json& doc);
NetConfig load_config_file(const std::string& path);

// Full-state dump, re-ingestible by load_state. Expressions are printed
// in the grammar accepted by parse_expr.
nlohmann::ordered_json dump_state(const NetState& s);
NetState load_state(const nlohmann::json& doc);

} // namespace conet
