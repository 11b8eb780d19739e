#pragma once

#include "semibloch/types.hpp"

#include <cstddef>
#include <vector>

namespace semibloch {

enum class Space { direct, dual };

struct CellPoint {
  Vec reduced;   // in the centered half-open cell
  IVec offset;   // integer lattice coefficients
};

// Columns of the returned matrix satisfy a_i . b_j = 2 pi delta_ij.
Mat dual_basis(const Mat& direct_columns);

class Lattice {
 public:
  Lattice() = default;
  // rows are basis vectors, as written in a config file
  static Lattice from_rows(const Mat& rows);
  explicit Lattice(const Mat& direct_columns);

  int dim() const { return static_cast<int>(direct_.cols()); }
  const Mat& direct() const { return direct_; }
  const Mat& dual() const { return dual_; }
  const Mat& basis(Space s) const { return s == Space::direct ? direct_ : dual_; }
  double cell_volume() const { return cell_volume_; }
  double dual_cell_volume() const { return dual_volume_; }

  Vec to_cartesian(const Vec& frac, Space s) const;
  Vec to_fractional(const Vec& x, Space s) const;
  Vec lattice_vector(const IVec& n, Space s) const;
  CellPoint reduce(const Vec& x, Space s) const;

  bool same_as(const Lattice& other, double tol = 1e-12) const;

 private:
  Mat direct_, dual_;
  Mat direct_inv_, dual_inv_;
  double cell_volume_ = 0.0, dual_volume_ = 0.0;
};

// Uniform half-open grid over the centered dual cell: fractional coordinates
// (j + offset)/N with j in [-N/2, N/2) (or [-(N-1)/2, (N-1)/2] for odd N).
class KGrid {
 public:
  KGrid() = default;
  KGrid(const Lattice& lat, std::vector<int> sizes, Vec offset = Vec());

  const Lattice& lattice() const { return lat_; }
  int dim() const { return lat_.dim(); }
  const std::vector<int>& sizes() const { return sizes_; }
  const Vec& offset() const { return offset_; }
  std::size_t size() const { return total_; }

  IVec index(std::size_t linear) const;  // per-axis index in [0, N_i)
  std::size_t linear(const IVec& idx) const;
  int centered(int axis, int idx) const;  // j for a raw index
  Vec fractional(std::size_t linear) const;
  Vec point(std::size_t linear) const;  // Cartesian k
  // neighbour along an axis; wrapped records how many dual vectors were crossed
  std::size_t neighbour(std::size_t linear, int axis, int step, int* wrapped) const;
  // area/volume element of one grid cell in Cartesian k-space
  double cell_measure() const;

  bool same_points(const KGrid& other) const;

 private:
  Lattice lat_;
  std::vector<int> sizes_;
  Vec offset_;
  std::size_t total_ = 0;
};

}  // namespace semibloch
