#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "landau/core/grid.hpp"
#include "landau/core/point.hpp"
#include "landau/kernels/bounds.hpp"

namespace landau {

/// Discrete tilde-gradient on a grid. Unordered cell pairs p = (k, l), k < l, within
/// r_max carry (B zeta)_p = |z|^{1+gamma/2} Pi[z] (D zeta_k - D zeta_l), z = v_k - v_l,
/// with D the finite-difference gradient of grid_gradient.
class TildeGradient {
 public:
  /// r_max <= 0 keeps every pair.
  TildeGradient(const GridSpec& grid, double gamma, double r_max = 0.0);

  const GridSpec& grid() const { return grid_; }
  double gamma() const { return gamma_; }
  std::size_t cells() const { return grid_.size(); }
  std::size_t pairs() const { return first_.size(); }
  std::uint32_t first(std::size_t p) const { return first_[p]; }
  std::uint32_t second(std::size_t p) const { return second_[p]; }

  std::vector<Point> apply(std::span<const double> zeta) const;
  /// B^T m.
  std::vector<double> apply_transpose(std::span<const Point> m) const;
  /// L(g) = B^T diag(g) B, g one weight per pair.
  Eigen::MatrixXd weighted_gram(std::span<const double> g) const;

  /// Orthonormal bases of null(B) (conserved directions) and its complement.
  const Eigen::MatrixXd& null_basis() const;
  const Eigen::MatrixXd& range_basis() const;

 private:
  void build_bases() const;

  GridSpec grid_;
  double gamma_;
  int d_;
  std::vector<std::uint32_t> first_, second_;
  std::vector<double> pair_matrix_;  ///< w^2 Pi per pair, d*d entries
  std::vector<double> pair_root_;    ///< w Pi per pair, d*d entries
  Eigen::SparseMatrix<double> D_;    ///< (cells*d) x cells
  mutable std::shared_ptr<const std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> bases_;
};

/// Grazing field slice: one d-vector m_p per stored unordered pair; the value on the
/// reversed pair is -m_p.
struct GrazingField {
  std::shared_ptr<const TildeGradient> op;
  std::vector<Point> m;

  static GrazingField zero(std::shared_ptr<const TildeGradient> op);
};

/// alpha(u, s) = |u|^2 / (2 s); 0 at (0, 0); +inf when s = 0 and u != 0.
double action_density(const Point& u, double s);

/// A(f, M) = 1/2 sum over ordered pairs |m|^2 / (f f_*) h^{2d} = sum_p |m_p|^2 / (f_k f_l) h^{2d}.
double action(const GridDensity& f, const GrazingField& M);
/// Same on raw values (no normalisation check).
double action(std::span<const double> f, const GrazingField& M);

/// sum_{ordered} F |M| h^{2d} against sqrt(2 A) (sum_{ordered} F^2 f f_* h^{2d})^{1/2}.
/// F is evaluated on every ordered cell pair.
InequalitySides measure_bound_check(const GridDensity& f, const GrazingField& M,
                                    const std::function<double(std::size_t, std::size_t)>& F);

/// Path of densities and per-interval grazing fields on uniform nodes of [0, 1].
struct GCEPath {
  std::vector<double> times;
  std::vector<GridDensity> densities;
  std::vector<GrazingField> fields;

  std::size_t intervals() const { return fields.size(); }
};

/// max over intervals of |sum zeta (f^{n+1} - f^n) h^d - dt sum_p (B zeta)_p . m_p h^{2d}|.
double check_gce(const GCEPath& path, std::span<const double> zeta);

/// Grazing field of the entropy flow: m_p = -f_k f_l (w Pi (J_k - J_l))_p for a per-cell J.
/// With J the discrete first-variation gradient, action(f, m) equals the grid D_eps.
GrazingField flux_field(std::shared_ptr<const TildeGradient> op, std::span<const double> f,
                        std::span<const Point> J);

/// Euclidean projection of a pair field onto null(B^T): r - B (B^T B)^+ B^T r.
/// Adding the result to a field leaves the GCE residual unchanged.
std::vector<Point> divergence_free_part(const TildeGradient& op, std::span<const Point> r);

}  // namespace landau
