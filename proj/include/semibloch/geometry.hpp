#pragma once

#include "semibloch/bloch.hpp"
#include "semibloch/lattice.hpp"

#include <string>
#include <vector>

namespace semibloch {

MatXc velocity_matrix(const BlochSpectrum& s, std::size_t k, int axis);

// Refuses when band n is within 1e-8 (relative to its width) of a neighbour.
void require_nondegenerate(const BlochSpectrum& s, int band, double rel_tol = 1e-8);

// Sum-over-states expressions at one grid point. tail receives
// |contribution of the highest state| / |total| (largest component).
Mat berry_curvature_at(const BlochSpectrum& s, std::size_t k, int band, double* tail = nullptr);
Mat rammal_wilkinson_at(const BlochSpectrum& s, std::size_t k, int band, double* tail = nullptr);

std::vector<Mat> berry_curvature(const BlochSpectrum& s, int band, double* tail = nullptr);
std::vector<Mat> rammal_wilkinson(const BlochSpectrum& s, int band, double* tail = nullptr);

struct ChernPlane {
  int axis_a = 0, axis_b = 1;
  double chern = 0.0;           // first slice
  std::vector<double> slices;   // one value per slice of the remaining axis (3D)
};

struct PlaquetteField {
  KGrid centers;                 // grid shifted by half a step on every axis
  std::vector<Mat> curvature;    // Cartesian Omega at plaquette centers
  std::vector<ChernPlane> chern;
  double min_link = 1.0;
};

PlaquetteField berry_curvature_plaquette(const BlochSpectrum& s, int band);

enum class Gauge { parallel_transport, as_given };

// Gauge-fixed copies of the band's eigenvectors (one per grid point).
std::vector<VecXc> parallel_transport_gauge(const BlochSpectrum& s, int band);
std::vector<Vec> berry_connection(const BlochSpectrum& s, int band, Gauge gauge = Gauge::parallel_transport);
// holonomy -arg prod <u_j|u_{j+1}> along a grid line through grid index start, in (-pi, pi]
double zak_phase(const BlochSpectrum& s, int band, int axis = 0, std::size_t start = 0);

struct BandGeometry {
  int band = 0;
  KGrid grid;
  std::vector<double> energy;
  std::vector<Vec> connection;   // parallel-transport gauge
  std::vector<Mat> curvature;    // sum over states
  std::vector<Mat> moment;       // sum over states
  std::vector<ChernPlane> chern; // plaquettes (empty in 1D)
  std::vector<double> zak_phases;  // one per axis, through the first grid point
  double curvature_tail = 0.0;
  double moment_tail = 0.0;
  double gap = 0.0;
};

BandGeometry compute_geometry(const BlochSpectrum& s, int band);

// Field sampled on a grid -> values at grid points, by component
std::vector<double> component(const std::vector<Vec>& f, int i);
std::vector<double> component(const std::vector<Mat>& f, int i, int j);

}  // namespace semibloch
