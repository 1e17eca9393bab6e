#pragma once

// Structured Cartesian and mapped (ruled-cell) grids with precomputed metrics.
//
// Cells are bilinear (2D) or trilinear (3D) images of unit cells in
// computational space. Every array carries kGhost layers of ghost cells per
// active direction; indices (i, j, k) below are ghost-inclusive.

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ctmhd/types.hpp"

namespace ctmhd {

enum class GridKind { Cartesian, Colella, ShockTubeBlend, CloudInclusion, Custom };

GridKind parse_grid_kind(const std::string& name);
std::string to_string(GridKind kind);

struct GridDescriptor {
  GridKind kind = GridKind::Cartesian;
  int dim = 2;
  std::array<int, 3> cells{1, 1, 1};
  Vec3 lo{0.0, 0.0, 0.0};
  Vec3 hi{1.0, 1.0, 1.0};
  // Sine-perturbation mapping T(x) = x + beta sin(2 pi x / L) sin(2 pi y / M) (1, 1).
  double beta = 0.0;
  double L = 1.0;
  double M = 1.0;
  // ShockTubeBlend applies the perturbation only inside this half-width.
  double blend_half_width = 0.6;
  // CloudInclusion: squares around the centre are pulled onto circles.
  Vec3 inclusion_center{0.3, 0.5, 0.5};
  double inclusion_radius = 0.25;
  // Custom: arbitrary user mapping (tests, embedding).
  std::function<Vec3(const Vec3&)> mapping;
  // Gauss points per direction on faces and in cell volumes (2 or 3).
  int quadrature_points = 2;
};

/// Physical image of a computational-space point.
Vec3 map_point(const GridDescriptor& desc, const Vec3& comp);

struct QuadratureRule {
  std::vector<double> nodes;    // on [0, 1]
  std::vector<double> weights;  // sum to 1

  static QuadratureRule gauss(int npoints);
};

struct CellGeometry {
  double volume = 0.0;
  Vec3 centroid{};
  double min_edge = 0.0;  // characteristic length
  double max_edge = 0.0;
};

struct FaceNode {
  Vec3 point{};
  Vec3 normal{};        // unit, oriented from the lower-index cell to the higher-index cell
  double weight = 0.0;  // quadrature weight times area element sqrt(a)
};

struct FaceGeometry {
  std::span<const FaceNode> nodes;
  double measure = 0.0;  // length (2D) or area (3D)
};

struct VolumeNode {
  Vec3 point{};
  double weight = 0.0;  // quadrature weight times Jacobian determinant
};

/// Index arithmetic for a ghost-padded logically rectangular block.
class Extents {
 public:
  Extents() = default;
  Extents(int dim, std::array<int, 3> cells, int ghost);

  int dim() const { return dim_; }
  int ghost() const { return ghost_; }
  int cells(int d) const { return n_[d]; }
  int padded(int d) const { return N_[d]; }
  // Interior cell range [lo, hi) along d (ghost-inclusive indexing).
  int lo(int d) const { return d < dim_ ? ghost_ : 0; }
  int hi(int d) const { return lo(d) + n_[d]; }
  std::size_t size() const { return static_cast<std::size_t>(N_[0]) * N_[1] * N_[2]; }
  std::size_t interior_size() const { return static_cast<std::size_t>(n_[0]) * n_[1] * n_[2]; }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * N_[1] + j) * N_[0] + i;
  }
  std::array<int, 3> ijk(std::size_t c) const {
    const int i = static_cast<int>(c % N_[0]);
    const std::size_t r = c / N_[0];
    return {i, static_cast<int>(r % N_[1]), static_cast<int>(r / N_[1])};
  }
  std::ptrdiff_t stride(int d) const {
    return d == 0 ? 1 : (d == 1 ? N_[0] : static_cast<std::ptrdiff_t>(N_[0]) * N_[1]);
  }
  bool is_interior(int i, int j, int k) const {
    return i >= lo(0) && i < hi(0) && j >= lo(1) && j < hi(1) && k >= lo(2) && k < hi(2);
  }
  /// All cells with at most `layers` ghost layers of padding around the interior.
  template <class F>
  void for_each(int layers, F&& f) const {
    const int g0 = dim_ > 0 ? layers : 0, g1 = dim_ > 1 ? layers : 0, g2 = dim_ > 2 ? layers : 0;
    for (int k = lo(2) - g2; k < hi(2) + g2; ++k)
      for (int j = lo(1) - g1; j < hi(1) + g1; ++j)
        for (int i = lo(0) - g0; i < hi(0) + g0; ++i) f(i, j, k);
  }

 private:
  int dim_ = 1;
  int ghost_ = 0;
  std::array<int, 3> n_{1, 1, 1};
  std::array<int, 3> N_{1, 1, 1};
};

class MappedGrid {
 public:
  static constexpr int kGhost = 2;

  explicit MappedGrid(const GridDescriptor& desc);

  const GridDescriptor& descriptor() const { return desc_; }
  const Extents& extents() const { return ext_; }
  int dim() const { return ext_.dim(); }
  /// True when every cell is the same axis-aligned box.
  bool is_uniform_cartesian() const { return uniform_; }

  const Vec3& vertex(int i, int j, int k) const;
  const CellGeometry& cell(std::size_t c) const { return cells_[c]; }
  const CellGeometry& cell(int i, int j, int k) const { return cells_[ext_.index(i, j, k)]; }

  int nodes_per_face() const { return nodes_per_face_; }
  /// Lower face of cell (i, j, k) normal to `axis`. Available for every interior
  /// cell and for the upper face of the last interior cell along `axis`.
  FaceGeometry face(int axis, int i, int j, int k) const;

  std::span<const VolumeNode> volume_nodes(std::size_t c) const;
  int nodes_per_cell() const { return nodes_per_cell_; }

  /// Physical point and |det J| weight for an arbitrary tensor rule over a cell.
  std::vector<VolumeNode> cell_quadrature(std::size_t c, const QuadratureRule& rule) const;

  /// Sum of interior cell volumes.
  double total_volume() const;

 private:
  struct Jacobian {
    Vec3 point;
    double det;
  };
  Jacobian eval_cell_map(int i, int j, int k, double xi, double eta, double zeta) const;
  void build_vertices();
  void build_cells();
  void build_faces();
  std::size_t face_slot(int axis, int i, int j, int k) const;

  GridDescriptor desc_;
  Extents ext_;
  bool uniform_ = false;
  std::array<int, 3> nv_{1, 1, 1};
  std::vector<Vec3> vertices_;
  std::vector<CellGeometry> cells_;
  int nodes_per_face_ = 1;
  int nodes_per_cell_ = 1;
  std::vector<VolumeNode> volume_nodes_;
  std::array<std::vector<FaceNode>, 3> face_nodes_;
  std::array<std::vector<double>, 3> face_measure_;
};

}  // namespace ctmhd
