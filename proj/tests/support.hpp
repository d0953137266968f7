#pragma once

// Shared fixtures for the test suites: small exponential backgrounds whose
// Wronskians are Vandermonde-like (singular only where two coordinates
// coincide), plus path helpers for the bundled configs.

#include <string>
#include <utility>
#include <vector>

#include "conet/net.hpp"

namespace fix {

inline conet::RationalExpr E(const std::string& text) { return conet::parse_expr(text); }

// (exp(r*u1), ..., exp(r*uN))
inline std::vector<conet::RationalExpr> exp_seed(int n_dirs, int rate) {
    std::vector<conet::RationalExpr> xi;
    for (int k = 1; k <= n_dirs; ++k)
        xi.push_back(E("exp(" + std::to_string(rate) + "*u" + std::to_string(k) + ")"));
    return xi;
}

// N=2, P=3 exponential background; seeds with rates 1..n_seeds.
inline conet::NetState demo_n2(int n_seeds = 2) {
    conet::BackgroundSpec spec;
    spec.N = 2;
    spec.P = 3;
    spec.tangents = {{E("exp(u1)"), E("0"), E("exp(2*u1)")}, {E("0"), E("exp(u2)"), E("exp(u2)")}};
    spec.lame = {E("exp(u1)"), E("exp(u2)")};
    for (int r = 1; r <= n_seeds; ++r) spec.seeds.emplace_back("s" + std::to_string(r), exp_seed(2, r));
    return conet::make_background(spec);
}

// N=3, P=3 diagonal exponential background; seeds with rates 1..n_seeds.
inline conet::NetState demo_n3(int n_seeds = 3) {
    conet::BackgroundSpec spec;
    spec.N = 3;
    spec.P = 3;
    spec.tangents = {{E("exp(u1)"), E("0"), E("0")}, {E("0"), E("exp(u2)"), E("0")}, {E("0"), E("0"), E("exp(u3)")}};
    spec.lame = {E("exp(u1)"), E("exp(u2)"), E("exp(u3)")};
    for (int r = 1; r <= n_seeds; ++r) spec.seeds.emplace_back("s" + std::to_string(r), exp_seed(3, r));
    return conet::make_background(spec);
}

// The N=2, P=2 background of the worked transform examples.
inline conet::NetState plane_n2(int n_seeds = 1) {
    conet::BackgroundSpec spec;
    spec.N = 2;
    spec.P = 2;
    spec.tangents = {{E("exp(u1)"), E("0")}, {E("0"), E("exp(u2)")}};
    spec.lame = {E("exp(u1)"), E("exp(u2)")};
    for (int r = 1; r <= n_seeds; ++r) spec.seeds.emplace_back("s" + std::to_string(r), exp_seed(2, r));
    return conet::make_background(spec);
}

inline std::string config_path(const std::string& name) {
    return std::string(CONET_SOURCE_DIR) + "/configs/" + name;
}

} // namespace fix
