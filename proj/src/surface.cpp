#include "conet/surface.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "conet/errors.hpp"

namespace conet {

namespace {

GridAxis parse_axis(const std::string& part) {
    std::istringstream is(part);
    GridAxis ax;
    char c1 = 0, c2 = 0;
    if (!(is >> ax.lo >> c1 >> ax.hi >> c2 >> ax.count) || c1 != ':' || c2 != ':')
        throw ParseError("grid axis must be lo:hi:count, got '" + part + "'");
    std::string rest;
    if (is >> rest) throw ParseError("trailing characters in grid axis '" + part + "'");
    if (!(ax.lo < ax.hi)) throw ParseError("grid axis needs lo < hi in '" + part + "'");
    if (ax.count < 2) throw ParseError("grid axis needs at least 2 samples in '" + part + "'");
    return ax;
}

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace

std::vector<GridAxis> parse_grid(const std::string& text) {
    std::vector<GridAxis> axes;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = text.find(',', start);
        axes.push_back(parse_axis(text.substr(start, comma == std::string::npos ? comma : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return axes;
}

PointSampler background_sampler(const NetState& s) {
    return [&s](const std::vector<double>& u) -> std::optional<std::vector<double>> {
        Point pt = Point::floats(u);
        std::vector<double> out;
        out.reserve(s.x.size());
        try {
            for (const RationalExpr& comp : s.x) out.push_back(comp.eval_float(pt));
        } catch (const PoleError&) {
            return std::nullopt;
        }
        if (!all_finite(out)) return std::nullopt;
        return out;
    };
}

PointSampler closed_form_sampler(const TransformedNet& t) {
    return [&t](const std::vector<double>& u) -> std::optional<std::vector<double>> {
        Point pt = Point::floats(u);
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(t.ambient()));
        for (int l = 0; l < t.ambient(); ++l) {
            EvalResult<double> r = t.point_f(l, pt);
            if (r.singular || !std::isfinite(r.value)) return std::nullopt;
            out.push_back(r.value);
        }
        return out;
    };
}

MeshStats write_obj(std::ostream& os, const GridAxis& a0, const GridAxis& a1, const PointSampler& f) {
    MeshStats st;
    const int n0 = a0.count, n1 = a1.count;
    std::vector<std::optional<std::vector<double>>> grid(static_cast<std::size_t>(n0) * n1);
    std::vector<long> index(grid.size(), 0); // 1-based OBJ vertex ids, 0 = absent
    auto slot = [&](int i, int j) { return static_cast<std::size_t>(i) * n1 + j; };

    for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j) {
            auto v = f({a0.at(i), a1.at(j)});
            if (v && v->size() != 3) throw DomainError("OBJ export needs 3 surface components");
            grid[slot(i, j)] = std::move(v);
        }

    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    long next = 0;
    for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j) {
            const auto& v = grid[slot(i, j)];
            if (!v) {
                ++st.skipped;
                continue;
            }
            index[slot(i, j)] = ++next;
            os << "v " << (*v)[0] << " " << (*v)[1] << " " << (*v)[2] << "\n";
        }
    st.vertices = next;

    for (int i = 0; i + 1 < n0; ++i)
        for (int j = 0; j + 1 < n1; ++j) {
            long a = index[slot(i, j)], b = index[slot(i + 1, j)];
            long c = index[slot(i + 1, j + 1)], d = index[slot(i, j + 1)];
            if (!a || !b || !c || !d) continue;
            os << "f " << a << " " << b << " " << c << "\n";
            os << "f " << a << " " << c << " " << d << "\n";
            st.faces += 2;
        }
    return st;
}

MeshStats write_csv(std::ostream& os, const std::vector<GridAxis>& axes, const PointSampler& f) {
    if (axes.empty()) throw DomainError("CSV export needs at least one grid axis");
    MeshStats st;
    const int n_dirs = static_cast<int>(axes.size());

    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    bool wrote_header = false;
    std::vector<int> odo(static_cast<std::size_t>(n_dirs), 0);
    while (true) {
        std::vector<double> u(static_cast<std::size_t>(n_dirs));
        for (int d = 0; d < n_dirs; ++d) u[static_cast<std::size_t>(d)] = axes[static_cast<std::size_t>(d)].at(odo[static_cast<std::size_t>(d)]);
        auto v = f(u);
        if (!v) {
            ++st.skipped;
        } else {
            if (!wrote_header) {
                for (int d = 0; d < n_dirs; ++d) os << (d ? "," : "") << "u" << (d + 1);
                for (std::size_t l = 0; l < v->size(); ++l) os << ",x" << (l + 1);
                os << "\n";
                wrote_header = true;
            }
            for (int d = 0; d < n_dirs; ++d) os << (d ? "," : "") << u[static_cast<std::size_t>(d)];
            for (double x : *v) os << "," << x;
            os << "\n";
            ++st.vertices;
            ++st.faces; // rows
        }
        // odometer, last axis fastest
        int d = n_dirs - 1;
        while (d >= 0 && ++odo[static_cast<std::size_t>(d)] == axes[static_cast<std::size_t>(d)].count) {
            odo[static_cast<std::size_t>(d)] = 0;
            --d;
        }
        if (d < 0) break;
    }
    return st;
}

} // namespace conet
