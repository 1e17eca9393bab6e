#include "ctmhd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ctmhd {

GridKind parse_grid_kind(const std::string& name) {
  if (name == "cartesian") return GridKind::Cartesian;
  if (name == "colella") return GridKind::Colella;
  if (name == "shocktube-blend") return GridKind::ShockTubeBlend;
  if (name == "cloud-inclusion") return GridKind::CloudInclusion;
  throw ConfigError("unknown grid kind '" + name + "'");
}

std::string to_string(GridKind kind) {
  switch (kind) {
    case GridKind::Cartesian: return "cartesian";
    case GridKind::Colella: return "colella";
    case GridKind::ShockTubeBlend: return "shocktube-blend";
    case GridKind::CloudInclusion: return "cloud-inclusion";
    case GridKind::Custom: return "custom";
  }
  return "?";
}

namespace {

Vec3 sine_perturbation(const GridDescriptor& g, const Vec3& x) {
  const double s = g.beta * std::sin(2.0 * kPi * x[0] / g.L) * std::sin(2.0 * kPi * x[1] / g.M);
  Vec3 y = x;
  y[0] += s;
  if (g.dim > 1) y[1] += s;
  return y;
}

// Radial blend: the square of half-width r (sup norm) around the centre is
// mapped towards the circle of radius r, fully at the centre and not at all
// at r = inclusion_radius.
Vec3 inclusion_map(const GridDescriptor& g, const Vec3& x) {
  Vec3 d{0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim; ++a) d[a] = x[a] - g.inclusion_center[a];
  double rinf = 0.0;
  for (int a = 0; a < g.dim; ++a) rinf = std::max(rinf, std::abs(d[a]));
  const double r2 = norm(d);
  const double R = g.inclusion_radius;
  if (rinf >= R || r2 == 0.0) return x;
  const double w = 1.0 - rinf / R;
  const double s = 1.0 + w * (rinf / r2 - 1.0);
  Vec3 y = x;
  for (int a = 0; a < g.dim; ++a) y[a] = g.inclusion_center[a] + s * d[a];
  return y;
}

}  // namespace

Vec3 map_point(const GridDescriptor& desc, const Vec3& comp) {
  switch (desc.kind) {
    case GridKind::Cartesian:
      return comp;
    case GridKind::Colella:
      if (desc.dim < 2) return comp;
      return sine_perturbation(desc, comp);
    case GridKind::ShockTubeBlend: {
      if (desc.dim < 2) return comp;
      const double h = desc.blend_half_width;
      if (std::abs(comp[0]) > h || std::abs(comp[1]) > h) return comp;
      return sine_perturbation(desc, comp);
    }
    case GridKind::CloudInclusion:
      if (desc.dim < 2) return comp;
      return inclusion_map(desc, comp);
    case GridKind::Custom:
      if (!desc.mapping) throw ConfigError("custom grid without a mapping");
      return desc.mapping(comp);
  }
  return comp;
}

QuadratureRule QuadratureRule::gauss(int npoints) {
  QuadratureRule r;
  switch (npoints) {
    case 1:
      r.nodes = {0.0};
      r.weights = {2.0};
      break;
    case 2: {
      const double a = 1.0 / std::sqrt(3.0);
      r.nodes = {-a, a};
      r.weights = {1.0, 1.0};
      break;
    }
    case 3: {
      const double a = std::sqrt(3.0 / 5.0);
      r.nodes = {-a, 0.0, a};
      r.weights = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
      break;
    }
    case 4: {
      const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
      const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
      r.nodes = {-b, -a, a, b};
      r.weights = {wb, wa, wa, wb};
      break;
    }
    case 5: {
      const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      const double w0 = 128.0 / 225.0;
      const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
      const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
      r.nodes = {-b, -a, 0.0, a, b};
      r.weights = {wb, wa, w0, wa, wb};
      break;
    }
    default:
      throw ConfigError("Gauss rule with " + std::to_string(npoints) + " points not available");
  }
  for (auto& x : r.nodes) x = 0.5 * (x + 1.0);
  for (auto& w : r.weights) w *= 0.5;
  return r;
}

Extents::Extents(int dim, std::array<int, 3> cells, int ghost) : dim_(dim), ghost_(ghost) {
  for (int d = 0; d < 3; ++d) {
    n_[d] = d < dim ? cells[d] : 1;
    N_[d] = d < dim ? cells[d] + 2 * ghost : 1;
  }
}

namespace {

std::string cell_name(const Extents& e, int i, int j, int k) {
  std::ostringstream os;
  os << "(" << i - e.lo(0);
  if (e.dim() > 1) os << ", " << j - e.lo(1);
  if (e.dim() > 2) os << ", " << k - e.lo(2);
  os << ")";
  return os.str();
}

}  // namespace

MappedGrid::MappedGrid(const GridDescriptor& desc) : desc_(desc) {
  if (desc.dim < 1 || desc.dim > 3) throw ConfigError("grid dimension must be 1, 2 or 3");
  for (int d = 0; d < desc.dim; ++d)
    if (desc.cells[d] <= 0) throw ConfigError("cell counts must be positive");
  if (!std::isfinite(desc.beta) || !std::isfinite(desc.L) || !std::isfinite(desc.M) || desc.L == 0.0 ||
      desc.M == 0.0)
    throw ConfigError("mapping parameters must be finite and L, M non-zero");
  ext_ = Extents(desc.dim, desc.cells, kGhost);
  uniform_ = desc.kind == GridKind::Cartesian ||
             ((desc.kind == GridKind::Colella || desc.kind == GridKind::ShockTubeBlend) && desc.beta == 0.0) ||
             desc.dim == 1;
  nodes_per_face_ = 1;
  nodes_per_cell_ = 1;
  for (int d = 0; d < desc.dim; ++d) {
    nodes_per_cell_ *= desc.quadrature_points;
    if (d > 0) nodes_per_face_ *= desc.quadrature_points;
  }
  build_vertices();
  build_cells();
  build_faces();
}

void MappedGrid::build_vertices() {
  for (int d = 0; d < 3; ++d) nv_[d] = d < dim() ? ext_.padded(d) + 1 : 1;
  vertices_.resize(static_cast<std::size_t>(nv_[0]) * nv_[1] * nv_[2]);
  Vec3 h{};
  for (int d = 0; d < dim(); ++d) h[d] = (desc_.hi[d] - desc_.lo[d]) / desc_.cells[d];
  for (int k = 0; k < nv_[2]; ++k)
    for (int j = 0; j < nv_[1]; ++j)
      for (int i = 0; i < nv_[0]; ++i) {
        const int idx[3] = {i, j, k};
        Vec3 comp{0.0, 0.0, 0.0};
        for (int d = 0; d < dim(); ++d) comp[d] = desc_.lo[d] + (idx[d] - kGhost) * h[d];
        vertices_[(static_cast<std::size_t>(k) * nv_[1] + j) * nv_[0] + i] = map_point(desc_, comp);
      }
}

const Vec3& MappedGrid::vertex(int i, int j, int k) const {
  return vertices_[(static_cast<std::size_t>(k) * nv_[1] + j) * nv_[0] + i];
}

// Trilinear map of cell (i, j, k) evaluated at unit-cell coordinates. Inactive
// directions are extruded with unit length so every cell is a hexahedron.
MappedGrid::Jacobian MappedGrid::eval_cell_map(int i, int j, int k, double xi, double eta,
                                               double zeta) const {
  const double s[3] = {xi, eta, zeta};
  Vec3 X{0.0, 0.0, 0.0};
  Vec3 D[3] = {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
  for (int c = 0; c < 8; ++c) {
    const int o[3] = {c & 1, (c >> 1) & 1, (c >> 2) & 1};
    Vec3 v = vertex(i + (dim() > 0 ? o[0] : 0), j + (dim() > 1 ? o[1] : 0), k + (dim() > 2 ? o[2] : 0));
    for (int d = dim(); d < 3; ++d) v[d] += o[d];
    double w[3], dw[3];
    for (int d = 0; d < 3; ++d) {
      w[d] = o[d] ? s[d] : 1.0 - s[d];
      dw[d] = o[d] ? 1.0 : -1.0;
    }
    X = X + (w[0] * w[1] * w[2]) * v;
    D[0] = D[0] + (dw[0] * w[1] * w[2]) * v;
    D[1] = D[1] + (w[0] * dw[1] * w[2]) * v;
    D[2] = D[2] + (w[0] * w[1] * dw[2]) * v;
  }
  for (int d = dim(); d < 3; ++d) X[d] = 0.0;
  return {X, dot(D[0], cross(D[1], D[2]))};
}

std::vector<VolumeNode> MappedGrid::cell_quadrature(std::size_t c, const QuadratureRule& rule) const {
  const auto [i, j, k] = ext_.ijk(c);
  const int q = static_cast<int>(rule.nodes.size());
  const int n1 = dim() > 1 ? q : 1, n2 = dim() > 2 ? q : 1;
  std::vector<VolumeNode> out;
  out.reserve(static_cast<std::size_t>(q) * n1 * n2);
  for (int c2 = 0; c2 < n2; ++c2)
    for (int c1 = 0; c1 < n1; ++c1)
      for (int c0 = 0; c0 < q; ++c0) {
        const double z = dim() > 2 ? rule.nodes[c2] : 0.5, y = dim() > 1 ? rule.nodes[c1] : 0.5;
        const double w = rule.weights[c0] * (dim() > 1 ? rule.weights[c1] : 1.0) *
                         (dim() > 2 ? rule.weights[c2] : 1.0);
        const Jacobian jac = eval_cell_map(i, j, k, rule.nodes[c0], y, z);
        if (!(jac.det > 0.0))
          throw GeometryError("folded grid: non-positive Jacobian in cell " + cell_name(ext_, i, j, k));
        out.push_back({jac.point, w * jac.det});
      }
  return out;
}

void MappedGrid::build_cells() {
  const std::size_t n = ext_.size();
  cells_.assign(n, {});
  volume_nodes_.assign(n * nodes_per_cell_, {});
  const QuadratureRule moment = QuadratureRule::gauss(3);
  const QuadratureRule rule = QuadratureRule::gauss(desc_.quadrature_points);
  for (std::size_t c = 0; c < n; ++c) {
    const auto [i, j, k] = ext_.ijk(c);
    // Corner Jacobians: for bilinear cells positivity at the corners implies
    // positivity everywhere.
    for (int corner = 0; corner < (1 << dim()); ++corner) {
      const Jacobian jac = eval_cell_map(i, j, k, corner & 1, (corner >> 1) & 1, (corner >> 2) & 1);
      if (!(jac.det > 0.0))
        throw GeometryError("folded grid: non-positive Jacobian in cell " + cell_name(ext_, i, j, k));
    }
    CellGeometry& g = cells_[c];
    Vec3 m1{0.0, 0.0, 0.0};
    for (const auto& node : cell_quadrature(c, moment)) {
      g.volume += node.weight;
      m1 = m1 + node.weight * node.point;
    }
    g.centroid = (1.0 / g.volume) * m1;
    auto nodes = cell_quadrature(c, rule);
    std::copy(nodes.begin(), nodes.end(), volume_nodes_.begin() + c * nodes_per_cell_);

    g.min_edge = 1e300;
    g.max_edge = 0.0;
    for (int d = 0; d < dim(); ++d) {
      for (int corner = 0; corner < (1 << dim()); ++corner) {
        if (corner & (1 << d)) continue;
        const int o[3] = {corner & 1, (corner >> 1) & 1, (corner >> 2) & 1};
        int p[3] = {i + o[0], j + o[1], k + o[2]};
        const Vec3 a = vertex(p[0], p[1], p[2]);
        p[d] += 1;
        const double len = norm(vertex(p[0], p[1], p[2]) - a);
        g.min_edge = std::min(g.min_edge, len);
        g.max_edge = std::max(g.max_edge, len);
      }
    }
  }
}

std::size_t MappedGrid::face_slot(int axis, int i, int j, int k) const {
  // Faces along `axis` run over lo..hi inclusive; other axes over the interior.
  int n[3], o[3];
  for (int d = 0; d < 3; ++d) {
    n[d] = ext_.cells(d) + (d == axis ? 1 : 0);
    o[d] = (d == 0 ? i : d == 1 ? j : k) - ext_.lo(d);
  }
  return (static_cast<std::size_t>(o[2]) * n[1] + o[1]) * n[0] + o[0];
}

void MappedGrid::build_faces() {
  const QuadratureRule rule = QuadratureRule::gauss(desc_.quadrature_points);
  const int q = desc_.quadrature_points;
  for (int axis = 0; axis < dim(); ++axis) {
    std::size_t nf = 1;
    for (int d = 0; d < 3; ++d) nf *= ext_.cells(d) + (d == axis ? 1 : 0);
    face_nodes_[axis].assign(nf * nodes_per_face_, {});
    face_measure_[axis].assign(nf, 0.0);
    const int b = (axis + 1) % 3, c = (axis + 2) % 3;
    const int nb = b < dim() ? q : 1, nc = c < dim() ? q : 1;
    for (int k = ext_.lo(2); k < ext_.hi(2) + (axis == 2 ? 1 : 0); ++k)
      for (int j = ext_.lo(1); j < ext_.hi(1) + (axis == 1 ? 1 : 0); ++j)
        for (int i = ext_.lo(0); i < ext_.hi(0) + (axis == 0 ? 1 : 0); ++i) {
          const std::size_t slot = face_slot(axis, i, j, k);
          FaceNode* out = face_nodes_[axis].data() + slot * nodes_per_face_;
          double measure = 0.0;
          int node = 0;
          // Parameters ordered (s_b, s_c) with normal = dX/ds_b x dX/ds_c.
          for (int ic = 0; ic < nc; ++ic)
            for (int ib = 0; ib < nb; ++ib) {
              const double sb = b < dim() ? rule.nodes[ib] : 0.5, sc = c < dim() ? rule.nodes[ic] : 0.5;
              const double wq = (b < dim() ? rule.weights[ib] : 1.0) * (c < dim() ? rule.weights[ic] : 1.0);
              Vec3 X{0.0, 0.0, 0.0}, Db{0.0, 0.0, 0.0}, Dc{0.0, 0.0, 0.0};
              for (int corner = 0; corner < 4; ++corner) {
                const int ob = corner & 1, oc = (corner >> 1) & 1;
                int p[3] = {i, j, k};
                if (b < dim()) p[b] += ob;
                if (c < dim()) p[c] += oc;
                Vec3 v = vertex(p[0], p[1], p[2]);
                if (b >= dim()) v[b] += ob;
                if (c >= dim()) v[c] += oc;
                const double wb = ob ? sb : 1.0 - sb, wc = oc ? sc : 1.0 - sc;
                X = X + (wb * wc) * v;
                Db = Db + ((ob ? 1.0 : -1.0) * wc) * v;
                Dc = Dc + (wb * (oc ? 1.0 : -1.0)) * v;
              }
              for (int d = dim(); d < 3; ++d) X[d] = 0.0;
              const Vec3 nn = cross(Db, Dc);
              const double sqrt_a = norm(nn);
              if (!(sqrt_a > 0.0))
                throw GeometryError("degenerate face (zero tangent) at cell " + cell_name(ext_, i, j, k));
              FaceNode& f = out[node++];
              f.point = X;
              f.normal = (1.0 / sqrt_a) * nn;
              f.weight = wq * sqrt_a;
              measure += f.weight;
            }
          face_measure_[axis][slot] = measure;
        }
  }
}

FaceGeometry MappedGrid::face(int axis, int i, int j, int k) const {
  const std::size_t slot = face_slot(axis, i, j, k);
  return {std::span<const FaceNode>(face_nodes_[axis].data() + slot * nodes_per_face_, nodes_per_face_),
          face_measure_[axis][slot]};
}

std::span<const VolumeNode> MappedGrid::volume_nodes(std::size_t c) const {
  return {volume_nodes_.data() + c * nodes_per_cell_, static_cast<std::size_t>(nodes_per_cell_)};
}

double MappedGrid::total_volume() const {
  double v = 0.0;
  ext_.for_each(0, [&](int i, int j, int k) { v += cell(i, j, k).volume; });
  return v;
}

}  // namespace ctmhd
