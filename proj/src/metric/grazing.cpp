#include "landau/metric/grazing.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "landau/collision/collision.hpp"
#include "landau/core/error.hpp"

namespace landau {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TildeGradient::TildeGradient(const GridSpec& grid, double gamma, double r_max)
    : grid_(grid), gamma_(gamma), d_(grid.d) {
  grid.validate("grazing_metric.TildeGradient");
  require(gamma >= -4.0 && gamma <= 0.0, "grazing_metric.TildeGradient", "gamma must lie in [-4, 0]");
  const std::size_t N = grid.size();
  const auto nodes = grid.nodes();
  const double r2max = r_max > 0.0 ? r_max * r_max : kInf;
  for (std::size_t k = 0; k < N; ++k) {
    for (std::size_t l = k + 1; l < N; ++l) {
      const Point z = nodes[k] - nodes[l];
      const double r2 = norm2(z);
      if (r2 > r2max) continue;
      first_.push_back(static_cast<std::uint32_t>(k));
      second_.push_back(static_cast<std::uint32_t>(l));
      const double w = std::pow(r2, 0.5 + 0.25 * gamma);
      const Matrix3 P = projection(z, d_);
      for (int a = 0; a < d_; ++a)
        for (int b = 0; b < d_; ++b) {
          pair_root_.push_back(w * P[a][b]);
          pair_matrix_.push_back(w * w * P[a][b]);
        }
    }
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(N * d_ * 3);
  for (std::size_t k = 0; k < N; ++k)
    for (int a = 0; a < d_; ++a) {
      const auto st = gradient_stencil(grid, k, a);
      for (int s = 0; s < 3; ++s)
        if (st.weight[s] != 0.0)
          trip.emplace_back(static_cast<int>(k * d_ + a), static_cast<int>(st.index[s]), st.weight[s]);
    }
  D_.resize(static_cast<Eigen::Index>(N * d_), static_cast<Eigen::Index>(N));
  D_.setFromTriplets(trip.begin(), trip.end());
}

std::vector<Point> TildeGradient::apply(std::span<const double> zeta) const {
  require(zeta.size() == cells(), "grazing_metric.apply", "test function size does not match grid");
  const Eigen::Map<const Eigen::VectorXd> z(zeta.data(), static_cast<Eigen::Index>(zeta.size()));
  const Eigen::VectorXd g = D_ * z;
  std::vector<Point> out(pairs(), Point{0.0, 0.0, 0.0});
  const int dd = d_ * d_;
  for (std::size_t p = 0; p < pairs(); ++p) {
    const double* R = &pair_root_[p * dd];
    const std::size_t k = first_[p] * d_, l = second_[p] * d_;
    for (int a = 0; a < d_; ++a) {
      double acc = 0.0;
      for (int b = 0; b < d_; ++b) acc += R[a * d_ + b] * (g[k + b] - g[l + b]);
      out[p][a] = acc;
    }
  }
  return out;
}

std::vector<double> TildeGradient::apply_transpose(std::span<const Point> m) const {
  require(m.size() == pairs(), "grazing_metric.apply_transpose", "field size does not match pair count");
  Eigen::VectorXd q = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cells() * d_));
  const int dd = d_ * d_;
  for (std::size_t p = 0; p < pairs(); ++p) {
    const double* R = &pair_root_[p * dd];
    const std::size_t k = first_[p] * d_, l = second_[p] * d_;
    for (int b = 0; b < d_; ++b) {
      double acc = 0.0;
      for (int a = 0; a < d_; ++a) acc += R[a * d_ + b] * m[p][a];
      q[k + b] += acc;
      q[l + b] -= acc;
    }
  }
  const Eigen::VectorXd r = D_.transpose() * q;
  return {r.data(), r.data() + r.size()};
}

Eigen::MatrixXd TildeGradient::weighted_gram(std::span<const double> g) const {
  require(g.size() == pairs(), "grazing_metric.weighted_gram", "weight size does not match pair count");
  const Eigen::Index M = static_cast<Eigen::Index>(cells() * d_);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(M, M);
  const int dd = d_ * d_;
  for (std::size_t p = 0; p < pairs(); ++p) {
    const double* W = &pair_matrix_[p * dd];
    const Eigen::Index k = first_[p] * d_, l = second_[p] * d_;
    for (int b = 0; b < d_; ++b)
      for (int a = 0; a < d_; ++a) {
        const double v = g[p] * W[a * d_ + b];
        S(k + a, k + b) += v;
        S(l + a, l + b) += v;
        S(k + a, l + b) -= v;
        S(l + a, k + b) -= v;
      }
  }
  const Eigen::MatrixXd SD = S * D_;
  Eigen::MatrixXd L = D_.transpose() * SD;
  return 0.5 * (L + L.transpose());
}

void TildeGradient::build_bases() const {
  if (bases_) return;
  const std::vector<double> ones(pairs(), 1.0);
  const Eigen::MatrixXd L = weighted_gram(ones);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
  const auto& ev = es.eigenvalues();
  const double cut = 1e-9 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  std::vector<Eigen::Index> null_idx, range_idx;
  for (Eigen::Index i = 0; i < ev.size(); ++i) (ev[i] <= cut ? null_idx : range_idx).push_back(i);
  Eigen::MatrixXd Nb(L.rows(), static_cast<Eigen::Index>(null_idx.size()));
  Eigen::MatrixXd Qb(L.rows(), static_cast<Eigen::Index>(range_idx.size()));
  for (std::size_t j = 0; j < null_idx.size(); ++j) Nb.col(j) = es.eigenvectors().col(null_idx[j]);
  for (std::size_t j = 0; j < range_idx.size(); ++j) Qb.col(j) = es.eigenvectors().col(range_idx[j]);
  bases_ = std::make_shared<const std::pair<Eigen::MatrixXd, Eigen::MatrixXd>>(std::move(Nb), std::move(Qb));
}

const Eigen::MatrixXd& TildeGradient::null_basis() const {
  build_bases();
  return bases_->first;
}

const Eigen::MatrixXd& TildeGradient::range_basis() const {
  build_bases();
  return bases_->second;
}

GrazingField GrazingField::zero(std::shared_ptr<const TildeGradient> op) {
  GrazingField M;
  M.m.assign(op->pairs(), Point{0.0, 0.0, 0.0});
  M.op = std::move(op);
  return M;
}

double action_density(const Point& u, double s) {
  const double u2 = norm2(u);
  if (s > 0.0) return u2 / (2.0 * s);
  if (s == 0.0 && u2 == 0.0) return 0.0;
  return kInf;
}

double action(std::span<const double> f, const GrazingField& M) {
  require(M.op != nullptr, "grazing_metric.action", "grazing field has no operator");
  const TildeGradient& op = *M.op;
  require(f.size() == op.cells() && M.m.size() == op.pairs(), "grazing_metric.action",
          "density or field does not match the operator");
  const double h2d = std::pow(op.grid().cell_volume(), 2);
  double A = 0.0;
  for (std::size_t p = 0; p < op.pairs(); ++p) {
    // the two ordered pairs contribute alpha(m, ff) + alpha(-m, ff)
    A += 2.0 * action_density(M.m[p], f[op.first(p)] * f[op.second(p)]);
    if (std::isinf(A)) return kInf;
  }
  return A * h2d;
}

double action(const GridDensity& f, const GrazingField& M) { return action(f.values(), M); }

InequalitySides measure_bound_check(const GridDensity& f, const GrazingField& M,
                                    const std::function<double(std::size_t, std::size_t)>& F) {
  const TildeGradient& op = *M.op;
  require(f.grid() == op.grid(), "grazing_metric.measure_bound_check", "grid mismatch");
  const double h2d = std::pow(op.grid().cell_volume(), 2);
  double lhs = 0.0;
  for (std::size_t p = 0; p < op.pairs(); ++p) {
    const double mag = norm(M.m[p]);
    lhs += (F(op.first(p), op.second(p)) + F(op.second(p), op.first(p))) * mag;
  }
  double sq = 0.0;
  const std::size_t N = f.size();
  for (std::size_t k = 0; k < N; ++k)
    for (std::size_t l = 0; l < N; ++l) {
      const double v = F(k, l);
      sq += v * v * f[k] * f[l];
    }
  const double A = action(f, M);
  return {lhs * h2d, std::sqrt(2.0 * A) * std::sqrt(sq * h2d)};
}

double check_gce(const GCEPath& path, std::span<const double> zeta) {
  double worst = 0.0;
  for (std::size_t n = 0; n < path.intervals(); ++n) {
    const GrazingField& M = path.fields[n];
    const TildeGradient& op = *M.op;
    const double hd = op.grid().cell_volume();
    const double dt = path.times[n + 1] - path.times[n];
    double lhs = 0.0;
    for (std::size_t k = 0; k < op.cells(); ++k)
      lhs += zeta[k] * (path.densities[n + 1][k] - path.densities[n][k]);
    lhs *= hd;
    const auto Bz = op.apply(zeta);
    double rhs = 0.0;
    for (std::size_t p = 0; p < op.pairs(); ++p) rhs += dot(Bz[p], M.m[p]);
    rhs *= dt * hd * hd;
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

GrazingField flux_field(std::shared_ptr<const TildeGradient> op, std::span<const double> f,
                        std::span<const Point> J) {
  require(f.size() == op->cells() && J.size() == op->cells(), "grazing_metric.flux_field",
          "density or J does not match the operator");
  const int d = op->grid().d;
  const auto nodes = op->grid().nodes();
  GrazingField M = GrazingField::zero(op);
  for (std::size_t p = 0; p < op->pairs(); ++p) {
    const std::size_t k = op->first(p), l = op->second(p);
    const Point z = nodes[k] - nodes[l];
    const double w = std::pow(norm2(z), 0.5 + 0.25 * op->gamma());
    const Point u = project_orthogonal(z, J[k] - J[l]);
    for (int a = 0; a < d; ++a) M.m[p][a] = -f[k] * f[l] * w * u[a];
  }
  return M;
}

std::vector<Point> divergence_free_part(const TildeGradient& op, std::span<const Point> r) {
  const auto q = op.apply_transpose(r);
  const Eigen::MatrixXd& Q = op.range_basis();
  const std::vector<double> ones(op.pairs(), 1.0);
  const Eigen::MatrixXd L = Q.transpose() * op.weighted_gram(ones) * Q;
  const Eigen::Map<const Eigen::VectorXd> qv(q.data(), static_cast<Eigen::Index>(q.size()));
  const Eigen::VectorXd y = L.ldlt().solve(Q.transpose() * qv);
  const Eigen::VectorXd phi = Q * y;
  const auto Bphi = op.apply(std::span<const double>(phi.data(), static_cast<std::size_t>(phi.size())));
  std::vector<Point> out(r.begin(), r.end());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] -= Bphi[p];
  return out;
}

}  // namespace landau
