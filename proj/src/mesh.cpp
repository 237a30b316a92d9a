#include "penaparab/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

namespace penaparab {

const char* to_string(EdgeTag tag) {
  switch (tag) {
    case EdgeTag::Sigma0: return "Sigma0";
    case EdgeTag::Sigma1: return "Sigma1";
    case EdgeTag::Bottom: return "Bottom";
    case EdgeTag::Top: return "Top";
  }
  return "?";
}

double SpaceTimeMesh::signed_area(int tri) const {
  const auto& [i, j, k] = triangles[tri];
  const Point& p = nodes[i];
  const Point& q = nodes[j];
  const Point& r = nodes[k];
  return 0.5 * ((q.x - p.x) * (r.t - p.t) - (r.x - p.x) * (q.t - p.t));
}

namespace {

std::vector<double> time_levels(double T, int nt, const std::vector<double>& switches) {
  std::vector<double> levels;
  levels.reserve(nt + 1 + switches.size());
  for (int k = 0; k <= nt; ++k) levels.push_back(T * k / nt);
  const double snap = 1e-12 * T;
  for (double s : switches) {
    auto it = std::lower_bound(levels.begin(), levels.end(), s);
    const bool near_next = it != levels.end() && std::abs(*it - s) <= snap;
    const bool near_prev = it != levels.begin() && std::abs(*(it - 1) - s) <= snap;
    if (near_next)
      *it = s;
    else if (near_prev)
      *(it - 1) = s;
    else
      levels.insert(it, s);
  }
  levels.front() = 0.0;
  levels.back() = T;
  return levels;
}

}  // namespace

SpaceTimeMesh build_mesh(const MovingDomain& d, const BoundaryPartition& p, int nx, int nt) {
  if (nx < 1 || nt < 1) throw std::invalid_argument("mesh needs nx, nt >= 1");
  SpaceTimeMesh m;
  m.nx = nx;
  m.levels = time_levels(d.T, nt, p.switch_times());
  const int nl = m.num_levels();

  m.nodes.reserve(static_cast<std::size_t>(nl) * (nx + 1));
  for (int k = 0; k < nl; ++k) {
    const double t = m.levels[k];
    const double a = d.left(t);
    const double w = d.width(t);
    if (!(w > 0.0) || !std::isfinite(w)) {
      std::ostringstream msg;
      msg << "degenerate level " << k << " (t=" << t << "): width " << w;
      throw HypothesisError(msg.str());
    }
    for (int j = 0; j <= nx; ++j) m.nodes.push_back({a + w * j / nx, t});
  }

  m.triangles.reserve(2 * static_cast<std::size_t>(nl - 1) * nx);
  for (int k = 0; k + 1 < nl; ++k) {
    for (int j = 0; j < nx; ++j) {
      const int p00 = m.node(k, j), p10 = m.node(k, j + 1);
      const int p01 = m.node(k + 1, j), p11 = m.node(k + 1, j + 1);
      m.triangles.push_back({p00, p10, p11});
      m.triangles.push_back({p00, p11, p01});
    }
  }
  for (int tri = 0; tri < static_cast<int>(m.triangles.size()); ++tri) {
    if (!(m.signed_area(tri) > 0.0)) {
      const int level = tri / (2 * nx);
      std::ostringstream msg;
      msg << "degenerate triangle between levels " << level << " and " << level + 1
          << "; the domain moves too fast for this time step, increase nt";
      throw HypothesisError(msg.str());
    }
  }

  m.is_dirichlet.assign(m.nodes.size(), false);
  for (int j = 0; j < nx; ++j)
    m.boundary_edges.push_back({{m.node(0, j), m.node(0, j + 1)}, EdgeTag::Bottom, Side::Left});
  for (int j = 0; j < nx; ++j)
    m.boundary_edges.push_back(
        {{m.node(nl - 1, j), m.node(nl - 1, j + 1)}, EdgeTag::Top, Side::Left});
  for (Side side : {Side::Left, Side::Right}) {
    const int j = side == Side::Left ? 0 : nx;
    for (int k = 0; k + 1 < nl; ++k) {
      const double mid = 0.5 * (m.levels[k] + m.levels[k + 1]);
      const bool dirichlet = p.kind_at(side, mid) == BcKind::Dirichlet;
      const int lo = m.node(k, j), hi = m.node(k + 1, j);
      m.boundary_edges.push_back({{lo, hi}, dirichlet ? EdgeTag::Sigma0 : EdgeTag::Sigma1, side});
      if (dirichlet) m.is_dirichlet[lo] = m.is_dirichlet[hi] = true;
    }
  }
  return m;
}

TriangleRule triangle_rule(const SpaceTimeMesh& m, int tri) {
  TriangleRule r;
  const auto& v = m.triangles[tri];
  const Point& p0 = m.nodes[v[0]];
  const Point& p1 = m.nodes[v[1]];
  const Point& p2 = m.nodes[v[2]];
  const double det = (p1.x - p0.x) * (p2.t - p0.t) - (p2.x - p0.x) * (p1.t - p0.t);
  r.area = 0.5 * det;
  r.weight = r.area / 3.0;
  // Hat gradients from the inverse Jacobian of the affine reference map.
  r.grad[1] = {(p2.t - p0.t) / det, -(p2.x - p0.x) / det};
  r.grad[2] = {-(p1.t - p0.t) / det, (p1.x - p0.x) / det};
  r.grad[0] = {-r.grad[1][0] - r.grad[2][0], -r.grad[1][1] - r.grad[2][1]};
  // Midpoints of edges (0,1), (1,2), (2,0).
  const std::array<std::array<int, 2>, 3> edges{{{0, 1}, {1, 2}, {2, 0}}};
  const std::array<const Point*, 3> pts{&p0, &p1, &p2};
  for (int q = 0; q < 3; ++q) {
    const auto [i, j] = edges[q];
    r.points[q] = {0.5 * (pts[i]->x + pts[j]->x), 0.5 * (pts[i]->t + pts[j]->t)};
    r.lambda[q] = {0.0, 0.0, 0.0};
    r.lambda[q][i] = 0.5;
    r.lambda[q][j] = 0.5;
  }
  return r;
}

EdgeRule edge_rule(const SpaceTimeMesh& m, const BoundaryEdge& e) {
  EdgeRule r;
  const Point& p = m.nodes[e.nodes[0]];
  const Point& q = m.nodes[e.nodes[1]];
  const double g = 0.5 / std::sqrt(3.0);
  const std::array<double, 2> s{0.5 - g, 0.5 + g};
  for (int i = 0; i < 2; ++i) {
    r.points[i] = {p.x + s[i] * (q.x - p.x), p.t + s[i] * (q.t - p.t)};
    r.lambda[i] = {1.0 - s[i], s[i]};
  }
  if (e.lateral()) {
    const double dt = q.t - p.t;
    const double slope = (q.x - p.x) / dt;
    r.normal = lateral_from_slope(e.side, 0.5 * (p.t + q.t), 0.5 * (p.x + q.x), slope);
    r.weights = {0.5 * dt * r.normal.w_sigma, 0.5 * dt * r.normal.w_sigma};
  } else {
    const double dx = q.x - p.x;
    r.weights = {0.5 * dx, 0.5 * dx};
  }
  return r;
}

namespace {

void put(std::ostream& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, res.ptr - buf);
}

}  // namespace

void write_mesh(std::ostream& out, const SpaceTimeMesh& m) {
  for (const Point& p : m.nodes) {
    out << "v ";
    put(out, p.x);
    out << ' ';
    put(out, p.t);
    out << '\n';
  }
  for (const auto& t : m.triangles) out << "f " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& e : m.boundary_edges)
    out << "e " << e.nodes[0] << ' ' << e.nodes[1] << ' ' << to_string(e.tag) << '\n';
}

}  // namespace penaparab
