#include "conet/levy.hpp"

namespace conet {

NetState levy_step(const NetState& s, int direction, const std::string& seed_label) {
    const int i = direction;
    if (i < 0 || i >= s.N) throw DomainError("levy_step: direction index out of range");
    const int a = s.seed_index(seed_label);
    if (a < 0) throw DomainError("levy_step: no seed labelled '" + seed_label + "'");
    const SeedRecord& used = s.seeds[static_cast<std::size_t>(a)];
    const RationalExpr& pivot = used.xi[i];
    if (pivot.is_zero())
        throw SingularError("levy_step: pivot component xi_" + std::to_string(i + 1) + " of seed '" +
                            seed_label + "' is identically zero");

    const RationalExpr ratio_omega = used.omega / pivot;       // Omega / p
    const RationalExpr log_deriv = pivot.derivative(i) / pivot; // d_i p / p
    std::vector<RationalExpr> ratio_xi(s.N);                   // xi_k / p
    for (int k = 0; k < s.N; ++k)
        if (k != i) ratio_xi[k] = used.xi[k] / pivot;

    NetState out;
    out.N = s.N;
    out.P = s.P;

    out.x.reserve(s.P);
    for (int l = 0; l < s.P; ++l) out.x.push_back(s.x[l] - ratio_omega * s.X[i][l]);

    out.X.assign(s.N, {});
    out.H.assign(s.N, RationalExpr::zero());
    out.X[i].reserve(s.P);
    for (int l = 0; l < s.P; ++l) out.X[i].push_back(s.X[i][l].derivative(i) - log_deriv * s.X[i][l]);
    out.H[i] = -ratio_omega;

    for (int k = 0; k < s.N; ++k) {
        if (k == i) continue;
        out.X[k].reserve(s.P);
        for (int l = 0; l < s.P; ++l) out.X[k].push_back(s.X[k][l] - ratio_xi[k] * s.X[i][l]);
        out.H[k] = s.H[k] - s.beta_at(i, k) * ratio_omega;
        out.set_beta(i, k, s.beta_at(i, k).derivative(i) - log_deriv * s.beta_at(i, k));
        out.set_beta(k, i, -ratio_xi[k]);
        for (int l = 0; l < s.N; ++l) {
            if (l == i || l == k) continue;
            out.set_beta(k, l, s.beta_at(k, l) - ratio_xi[k] * s.beta_at(i, l));
        }
    }

    for (int b = 0; b < static_cast<int>(s.seeds.size()); ++b) {
        if (b == a) continue;
        const SeedRecord& rec = s.seeds[static_cast<std::size_t>(b)];
        SeedRecord next;
        next.label = rec.label;
        next.xi.assign(s.N, RationalExpr::zero());
        next.xi[i] = rec.xi[i].derivative(i) - log_deriv * rec.xi[i];
        for (int k = 0; k < s.N; ++k)
            if (k != i) next.xi[k] = rec.xi[k] - ratio_xi[k] * rec.xi[i];
        next.omega = rec.omega - (rec.xi[i] / pivot) * used.omega;
        out.seeds.push_back(std::move(next));
    }
    return out;
}

} // namespace conet
