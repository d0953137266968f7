#pragma once

// Grid sampling of surface points and mesh/table export. OBJ export is the
// N = 2, P = 3 case; CSV handles any dimensions. Singular grid nodes are
// skipped and counted, never written.

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "conet/net.hpp"
#include "conet/wronski.hpp"

namespace conet {

struct GridAxis {
    double lo = 0.0;
    double hi = 0.0;
    int count = 0; // samples along the axis, >= 2

    double at(int t) const { return lo + (hi - lo) * t / (count - 1); }
};

// "lo:hi:count" per axis, comma separated; e.g. "-1:1:50,-1:1:50".
std::vector<GridAxis> parse_grid(const std::string& text);

// u |-> x, or nullopt at a singular node. Samplers borrow the net they are
// built from; keep it alive while sampling.
using PointSampler = std::function<std::optional<std::vector<double>>(const std::vector<double>&)>;

PointSampler background_sampler(const NetState& s);
PointSampler closed_form_sampler(const TransformedNet& t);

struct MeshStats {
    long vertices = 0;
    long faces = 0;   // triangles for OBJ, data rows for CSV
    long skipped = 0; // singular nodes

    bool empty() const { return vertices == 0 && faces == 0; }
};

// Wavefront OBJ: every nonsingular node becomes a vertex; each grid cell
// whose four corners exist is split into two triangles.
MeshStats write_obj(std::ostream& os, const GridAxis& a0, const GridAxis& a1, const PointSampler& f);

// Header u1..uN,x1..xP, one row per nonsingular node, 17 significant digits.
MeshStats write_csv(std::ostream& os, const std::vector<GridAxis>& axes, const PointSampler& f);

} // namespace conet
