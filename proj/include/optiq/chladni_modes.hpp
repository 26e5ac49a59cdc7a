#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "optiq/grid.hpp"

namespace optiq::chladni {

enum class Shape { interval, rectangle, square, disk, annulus };
enum class MembraneBC { dirichlet, neumann };

struct MembraneProblem {
  Shape shape = Shape::square;
  MembraneBC bc = MembraneBC::dirichlet;
  /// Side lengths for interval (a) and rectangle (a, b); the square is 1 x 1.
  double a = 1.0, b = 1.0;
  /// Outer and inner radius for disk and annulus.
  double radius = 1.0, inner_radius = 0.0;
  double h = 1.0 / 64;
  /// Treat the grid as periodic on every axis (rectangles only); gives a torus.
  bool periodic = false;
};

/// Symmetric discretization of -lap on the active nodes.
///
/// The generalized problem K w = lambda M w (M the diagonal quadrature weights)
/// is stored as B = M^{-1/2} K M^{-1/2}; eigenvectors y of B map back to grid
/// values w = M^{-1/2} y.
struct MembraneOperator {
  MembraneProblem problem;
  Grid grid;
  /// Grid index of each unknown.
  std::vector<std::size_t> nodes;
  /// Unknown of each grid node, or -1 for inactive nodes.
  std::vector<long> unknown_of;
  Eigen::SparseMatrix<double> B;
  /// sqrt of the quadrature weight of each unknown.
  Eigen::VectorXd mass_sqrt;

  std::size_t size() const noexcept { return nodes.size(); }
  /// Active-node mask over the grid.
  std::vector<bool> active_mask() const;
};

MembraneOperator assemble(const MembraneProblem& problem);

struct EigenMode {
  double lambda = 0.0;
  ScalarField w;
  int cluster_id = 0;
  int multiplicity = 1;
  /// max |A w - lambda w| / max(lambda, 1) over active nodes, A the discrete -lap.
  double residual = 0.0;
};

struct SolveOptions {
  /// Unknown count up to which the dense solver is used.
  std::size_t dense_limit = 2048;
  int max_iterations = 1000;
  double tolerance = 1e-9;
  /// Multiplicity clustering constant C in max(1e-6, C h^2).
  double cluster_constant = 2.0;
};

/// The `count` smallest eigenpairs, ascending, with w normalized so that the
/// integral of w^2 over the grid is 1 and clusters labelled.
std::vector<EigenMode> solve_modes(const MembraneOperator& op, int count, const SolveOptions& opts = {});

struct Cluster {
  std::size_t first = 0;
  std::size_t size = 0;
};

/// Groups ascending eigenvalues whose relative gap is below max(1e-6, C h^2).
std::vector<Cluster> detect_multiplicity(const std::vector<double>& eigenvalues, double h, double c = 2.0);

/// Modes carrying cluster label `id`, in order.
std::vector<EigenMode> cluster_members(const std::vector<EigenMode>& modes, int id);
/// Integrals of target * w over the given modes (the coefficients of the
/// orthogonal projection onto their span).
std::vector<double> project_coefficients(const std::vector<EigenMode>& modes, const ScalarField& target);

/// Normalized combination of modes sharing one cluster.
ScalarField superpose(const std::vector<EigenMode>& modes, const std::vector<double>& coefficients);

/// Residual max |A w - lambda w| of an arbitrary grid field on the active nodes.
double membrane_residual(const MembraneOperator& op, const ScalarField& w, double lambda);

struct Polyline {
  std::vector<Eigen::Vector2d> points;
  bool closed = false;
};

struct NodalSet {
  std::vector<Polyline> polylines;
  /// Periods used to measure segments that wrap (0 on clamped axes).
  Eigen::Vector2d period = Eigen::Vector2d::Zero();
};

/// Zero contour of a 2D field by marching squares. Only cells whose four
/// corners are active take part; `active` defaults to all nodes.
NodalSet nodal_set(const ScalarField& w, const std::vector<bool>& active = {});

struct NodalStats {
  int components = 0;
  int closed = 0;
  double length = 0.0;
};

NodalStats nodal_stats(const NodalSet& s);

/// SVG drawing of the nodal polylines over the domain outline, in domain units.
std::string nodal_svg(const NodalSet& s, const MembraneProblem& problem);
/// CSV rows "chain,closed,x,y".
std::string nodal_csv(const NodalSet& s);

}  // namespace optiq::chladni
