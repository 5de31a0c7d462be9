#include "landau/metric/distance.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "landau/core/error.hpp"
#include "landau/core/lbfgs.hpp"

namespace landau {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd to_vector(const GridDensity& f) {
  return Eigen::Map<const Eigen::VectorXd>(f.values().data(), static_cast<Eigen::Index>(f.size()));
}

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

void DistanceOptions::validate(const char* where) const {
  require(K >= 1, where, "K must be at least 1");
  require(floor > 0.0, where, "floor must be positive");
  require(r_max >= 0.0, where, "r_max must be non-negative");
  require(max_iter >= 1, where, "max_iter must be positive");
  require(gtol > 0.0, where, "gtol must be positive");
}

void check_problem_size(const GridSpec& grid, const char* where) {
  const int limit = grid.d == 3 ? 8 : grid.d == 2 ? 24 : 256;
  if (grid.n > limit)
    raise(ErrorKind::ProblemTooLarge, where,
          "grid with d=" + std::to_string(grid.d) + " n=" + std::to_string(grid.n) + " exceeds n=" +
              std::to_string(limit));
}

std::shared_ptr<const TildeGradient> make_tilde_gradient(const GridSpec& grid, double gamma, double r_max) {
  if (r_max <= 0.0 && grid.n > 16) r_max = grid.half_width;
  return std::make_shared<const TildeGradient>(grid, gamma, r_max);
}

PathAction::PathAction(std::shared_ptr<const TildeGradient> op, double floor) : op_(std::move(op)), floor_(floor) {}

Eigen::VectorXd PathAction::project(const Eigen::VectorXd& v) const {
  const Eigen::MatrixXd& N = op_->null_basis();
  return v - N * (N.transpose() * v);
}

double PathAction::interval(const Eigen::VectorXd& f0, const Eigen::VectorXd& f1, double dt, Eigen::VectorXd* g0,
                            Eigen::VectorXd* g1, Eigen::VectorXd* phi_out) const {
  const TildeGradient& op = *op_;
  const Eigen::VectorXd fbar = (0.5 * (f0 + f1)).cwiseMax(floor_);
  std::vector<double> g(op.pairs());
  for (std::size_t p = 0; p < op.pairs(); ++p) g[p] = fbar[op.first(p)] * fbar[op.second(p)];
  Eigen::MatrixXd L = op.weighted_gram(g);
  const Eigen::MatrixXd& N = op.null_basis();
  const double sigma = L.diagonal().mean();
  L.noalias() += sigma * N * N.transpose();
  const Eigen::VectorXd df = project(f1 - f0);
  Eigen::LLT<Eigen::MatrixXd> llt(L);
  if (llt.info() != Eigen::Success) return kInf;
  const Eigen::VectorXd phi = llt.solve(df);
  const double q = df.dot(phi);
  if (phi_out) *phi_out = phi;
  if (g0 && g1) {
    const Eigen::VectorXd dq = project(2.0 * phi / dt);
    const auto Bphi = op.apply(as_span(phi));
    Eigen::VectorXd gb = Eigen::VectorXd::Zero(fbar.size());
    for (std::size_t p = 0; p < op.pairs(); ++p) {
      const double s = norm2(Bphi[p]) / dt;
      const std::size_t k = op.first(p), l = op.second(p);
      gb[k] -= s * fbar[l];
      gb[l] -= s * fbar[k];
    }
    const Eigen::VectorXd f_raw = 0.5 * (f0 + f1);
    for (Eigen::Index k = 0; k < gb.size(); ++k)
      if (f_raw[k] < floor_) gb[k] = 0.0;
    *g0 = -dq + 0.5 * gb;
    *g1 = dq + 0.5 * gb;
  }
  return q / dt;
}

double PathAction::evaluate(const Eigen::MatrixXd& F, double dt, Eigen::MatrixXd* grad,
                            std::vector<double>* interval_actions) const {
  if ((F.array() <= 0.0).any()) return kInf;
  const Eigen::Index K = F.cols() - 1;
  if (grad) grad->setZero(F.rows(), F.cols());
  if (interval_actions) interval_actions->assign(static_cast<std::size_t>(K), 0.0);
  double total = 0.0;
  Eigen::VectorXd g0, g1;
  for (Eigen::Index n = 0; n < K; ++n) {
    const double c = interval(F.col(n), F.col(n + 1), dt, grad ? &g0 : nullptr, grad ? &g1 : nullptr, nullptr);
    if (!std::isfinite(c)) return kInf;
    total += c;
    if (interval_actions) (*interval_actions)[static_cast<std::size_t>(n)] = c / dt;
    if (grad) {
      grad->col(n) += g0;
      grad->col(n + 1) += g1;
    }
  }
  return total;
}

GrazingField PathAction::optimal_field(const Eigen::VectorXd& f0, const Eigen::VectorXd& f1, double dt) const {
  Eigen::VectorXd phi;
  interval(f0, f1, dt, nullptr, nullptr, &phi);
  const TildeGradient& op = *op_;
  const Eigen::VectorXd fbar = (0.5 * (f0 + f1)).cwiseMax(floor_);
  const double hd = op.grid().cell_volume();
  auto M = GrazingField::zero(op_);
  const auto Bphi = op.apply(as_span(phi));
  for (std::size_t p = 0; p < op.pairs(); ++p) {
    const double g = fbar[op.first(p)] * fbar[op.second(p)];
    M.m[p] = (g / (dt * hd)) * Bphi[p];
  }
  return M;
}

namespace {

struct SolveOutcome {
  double squared;
  Eigen::MatrixXd F;
  std::vector<double> actions;
  int iterations;
};

SolveOutcome solve_path(const PathAction& pa, const Eigen::VectorXd& f0, const Eigen::VectorXd& f1,
                        const DistanceOptions& opts) {
  const int K = opts.K;
  const double dt = 1.0 / K;
  const Eigen::Index N = f0.size();
  Eigen::MatrixXd F(N, K + 1);
  for (int j = 0; j <= K; ++j) F.col(j) = f0 + (static_cast<double>(j) / K) * (f1 - f0);
  if (K == 1) {
    std::vector<double> acts;
    const double c = pa.evaluate(F, dt, nullptr, &acts);
    return {c, F, acts, 0};
  }
  const Eigen::Index inner = N * (K - 1);
  Eigen::VectorXd x0(inner);
  for (int j = 1; j < K; ++j) x0.segment((j - 1) * N, N) = F.col(j);
  Eigen::MatrixXd G;
  auto fg = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    for (int j = 1; j < K; ++j) F.col(j) = f0 + pa.project(x.segment((j - 1) * N, N) - f0);
    const double v = pa.evaluate(F, dt, &G);
    grad.resize(inner);
    if (!std::isfinite(v)) return v;
    for (int j = 1; j < K; ++j) grad.segment((j - 1) * N, N) = pa.project(G.col(j));
    return v;
  };
  LbfgsOptions lo;
  lo.max_iter = opts.max_iter;
  lo.gtol = opts.gtol;
  lo.initial_step = 1e-2 * std::min(f0.minCoeff(), f1.minCoeff());
  {
    Eigen::VectorXd g0(inner);
    lo.fscale = std::max(fg(x0, g0), 1e-300);
  }
  const auto res = lbfgs_minimize(fg, x0, lo);
  if (!res.converged)
    raise(ErrorKind::NotConverged, "grazing_metric.landau_distance",
          "optimizer stopped after " + std::to_string(res.iterations) + " iterations with gradient " +
              std::to_string(res.grad_inf));
  for (int j = 1; j < K; ++j) F.col(j) = f0 + pa.project(res.x.segment((j - 1) * N, N) - f0);
  std::vector<double> acts;
  const double c = pa.evaluate(F, dt, nullptr, &acts);
  return {c, F, acts, res.iterations};
}

}  // namespace

DistanceResult landau_distance(const GridDensity& f0, const GridDensity& f1, double gamma,
                               const DistanceOptions& opts) {
  require(f0.grid() == f1.grid(), "grazing_metric.landau_distance", "densities live on different grids");
  check_problem_size(f0.grid(), "grazing_metric.landau_distance");
  return landau_distance(f0, f1, make_tilde_gradient(f0.grid(), gamma, opts.r_max), opts);
}

DistanceResult landau_distance(const GridDensity& f0, const GridDensity& f1,
                               std::shared_ptr<const TildeGradient> op, const DistanceOptions& opts) {
  const char* where = "grazing_metric.landau_distance";
  opts.validate(where);
  require(f0.grid() == f1.grid() && f0.grid() == op->grid(), where, "densities live on different grids");
  check_problem_size(f0.grid(), where);
  const Eigen::VectorXd a = to_vector(f0).cwiseMax(opts.floor);
  const Eigen::VectorXd b = to_vector(f1).cwiseMax(opts.floor);
  const Eigen::MatrixXd& Nb = op->null_basis();
  const double mismatch = (Nb.transpose() * (b - a)).norm();
  if (mismatch > 1e-9 * std::max(1.0, a.norm() + b.norm()))
    raise(ErrorKind::Infeasible, where,
          "endpoints differ in a conserved quantity (residual " + std::to_string(mismatch) + ")");

  DistanceResult out;
  const int K = opts.K;
  const double dt = 1.0 / K;
  PathAction pa(op, opts.floor);
  SolveOutcome sol;
  if ((a - b).lpNorm<Eigen::Infinity>() == 0.0) {
    sol.F = a.replicate(1, K + 1);
    sol.squared = 0.0;
    sol.actions.assign(static_cast<std::size_t>(K), 0.0);
    sol.iterations = 0;
  } else {
    sol = solve_path(pa, a, b, opts);
  }
  out.squared = sol.squared;
  out.distance = std::sqrt(std::max(sol.squared, 0.0));
  out.interval_actions = sol.actions;
  out.iterations = sol.iterations;
  out.floor_sensitivity = std::numeric_limits<double>::quiet_NaN();
  if (opts.floor_check && sol.squared > 0.0 && opts.floor != 1e-12) {
    DistanceOptions o2 = opts;
    o2.floor = 1e-12;
    o2.floor_check = false;
    PathAction pa2(op, 1e-12);
    const auto s2 = solve_path(pa2, to_vector(f0).cwiseMax(1e-12), to_vector(f1).cwiseMax(1e-12), o2);
    out.floor_sensitivity = std::abs(std::sqrt(std::max(s2.squared, 0.0)) - out.distance);
  }
  const GridSpec& grid = op->grid();
  for (int j = 0; j <= K; ++j) {
    out.path.times.push_back(j * dt);
    const Eigen::VectorXd col = sol.F.col(j);
    out.path.densities.emplace_back(grid, std::vector<double>(col.data(), col.data() + col.size()));
  }
  for (int j = 0; j < K; ++j) {
    if (sol.squared == 0.0)
      out.path.fields.push_back(GrazingField::zero(op));
    else
      out.path.fields.push_back(pa.optimal_field(sol.F.col(j), sol.F.col(j + 1), dt));
  }
  return out;
}

std::vector<double> metric_derivative(const Trajectory& traj, const std::vector<GrazingField>& fields) {
  require(fields.size() + 1 == traj.size(), "grazing_metric.metric_derivative",
          "need one field per trajectory interval");
  std::vector<double> out;
  for (std::size_t n = 0; n < fields.size(); ++n) {
    const auto* a = std::get_if<GridDensity>(&traj.states()[n]);
    const auto* b = std::get_if<GridDensity>(&traj.states()[n + 1]);
    require(a && b, "grazing_metric.metric_derivative", "trajectory must hold grid densities");
    std::vector<double> mid(a->size());
    for (std::size_t k = 0; k < mid.size(); ++k) mid[k] = 0.5 * ((*a)[k] + (*b)[k]);
    out.push_back(action(mid, fields[n]));
  }
  return out;
}

std::vector<GrazingField> tangent_fields(const Trajectory& traj, std::shared_ptr<const TildeGradient> op) {
  PathAction pa(op, 1e-300);
  std::vector<GrazingField> out;
  for (std::size_t n = 0; n + 1 < traj.size(); ++n) {
    const auto* a = std::get_if<GridDensity>(&traj.states()[n]);
    const auto* b = std::get_if<GridDensity>(&traj.states()[n + 1]);
    require(a && b, "grazing_metric.tangent_fields", "trajectory must hold grid densities");
    const double dt = traj.times()[n + 1] - traj.times()[n];
    out.push_back(pa.optimal_field(to_vector(*a), to_vector(*b), dt));
  }
  return out;
}

GridDensity project_to_moments(const TildeGradient& op, const GridDensity& f, const GridDensity& reference) {
  require(f.grid() == op.grid() && reference.grid() == op.grid(), "grazing_metric.project_to_moments",
          "grid mismatch");
  const Eigen::MatrixXd& N = op.null_basis();
  const Eigen::VectorXd x = to_vector(f);
  const Eigen::VectorXd out = x - N * (N.transpose() * (x - to_vector(reference)));
  if (out.minCoeff() <= 0.0)
    raise(ErrorKind::Infeasible, "grazing_metric.project_to_moments", "projection leaves non-positive cells");
  return GridDensity(op.grid(), std::vector<double>(out.data(), out.data() + out.size()));
}

}  // namespace landau
