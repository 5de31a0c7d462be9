#include "landau/jko/jko.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "landau/collision/collision.hpp"
#include "landau/core/error.hpp"
#include "landau/core/lbfgs.hpp"
#include "landau/core/parallel.hpp"

namespace landau {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd to_vector(const GridDensity& f) {
  return Eigen::Map<const Eigen::VectorXd>(f.values().data(), static_cast<Eigen::Index>(f.size()));
}

GridDensity to_density(const GridSpec& grid, const Eigen::VectorXd& v) {
  return GridDensity(grid, std::vector<double>(v.data(), v.data() + v.size()));
}

/// H_eps of raw positive values and its gradient h^d psi.
double entropy_and_gradient(const Kernel& kernel, const GridSpec& grid, const Eigen::VectorXd& f,
                            Eigen::VectorXd* grad) {
  if ((f.array() <= 0.0).any()) return kInf;
  const auto nodes = grid.nodes();
  const simd::PointCloud cloud(kernel.dim(), nodes);
  const double hd = grid.cell_volume();
  std::vector<double> w(f.data(), f.data() + f.size());
  for (double& x : w) x *= hd;
  const auto field = entropy_field(kernel, grid, cloud.view(), cloud.view(), w.data());
  if (grad) {
    const auto psi = first_variation(kernel, field);
    grad->resize(f.size());
    for (Eigen::Index k = 0; k < f.size(); ++k) (*grad)[k] = hd * psi[static_cast<std::size_t>(k)];
  }
  return field.entropy;
}

Eigen::VectorXd renormalize(const GridSpec& grid, Eigen::VectorXd f) {
  return f / (f.sum() * grid.cell_volume());
}

}  // namespace

void JkoConfig::validate(const char* where) const {
  require(tau > 0.0 && std::isfinite(tau), where, "tau must be positive");
  require(steps >= 1, where, "steps must be at least 1");
  inner.validate(where);
  model.validate(where);
}

double JkoStep::objective() const { return entropy_next + distance_sq / (2.0 * tau); }

JkoStep jko_step(const GridDensity& prev, const JkoConfig& cfg) {
  check_problem_size(prev.grid(), "jko.jko_step");
  return jko_step(prev, cfg, make_tilde_gradient(prev.grid(), cfg.model.gamma, cfg.inner.r_max));
}

JkoStep jko_step(const GridDensity& prev, const JkoConfig& cfg, std::shared_ptr<const TildeGradient> op) {
  const char* where = "jko.jko_step";
  cfg.validate(where);
  require(prev.grid() == op->grid(), where, "operator grid differs from the density grid");
  require(prev.grid().d == cfg.model.d, where, "model dimension differs from the grid dimension");
  check_problem_size(prev.grid(), where);
  const GridSpec& grid = prev.grid();
  const Kernel kernel(cfg.model);
  const int K = cfg.inner.K;
  const double dt = 1.0 / K;
  const double floor = cfg.inner.floor;
  const Eigen::Index N = static_cast<Eigen::Index>(prev.size());
  const Eigen::VectorXd f0 = renormalize(grid, to_vector(prev).cwiseMax(floor));
  PathAction pa(op, floor);

  Eigen::MatrixXd F = f0.replicate(1, K + 1);
  Eigen::MatrixXd G;
  Eigen::VectorXd gH;
  auto fg = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    for (int j = 1; j <= K; ++j) F.col(j) = f0 + pa.project(x.segment((j - 1) * N, N) - f0);
    grad.resize(x.size());
    const double cost = pa.evaluate(F, dt, &G);
    if (!std::isfinite(cost)) return kInf;
    const double H = entropy_and_gradient(kernel, grid, F.col(K), &gH);
    if (!std::isfinite(H)) return kInf;
    const double inv = 1.0 / (2.0 * cfg.tau);
    for (int j = 1; j < K; ++j) grad.segment((j - 1) * N, N) = pa.project(inv * G.col(j));
    grad.segment((K - 1) * N, N) = pa.project(inv * G.col(K) + gH);
    return H + inv * cost;
  };
  Eigen::VectorXd x0(N * K);
  for (int j = 1; j <= K; ++j) x0.segment((j - 1) * N, N) = f0;
  LbfgsOptions lo;
  lo.max_iter = cfg.inner.max_iter;
  lo.gtol = cfg.inner.gtol;
  lo.initial_step = 1e-2 * f0.minCoeff();
  const auto res = lbfgs_minimize(fg, x0, lo);
  if (!res.converged)
    raise(ErrorKind::NotConverged, where,
          "proximal problem stopped after " + std::to_string(res.iterations) + " iterations with gradient " +
              std::to_string(res.grad_inf));
  for (int j = 1; j <= K; ++j) F.col(j) = f0 + pa.project(res.x.segment((j - 1) * N, N) - f0);

  JkoStep out;
  out.entropy_prev = entropy_and_gradient(kernel, grid, f0, nullptr);
  out.distance_sq = pa.evaluate(F, dt);
  out.entropy_next = entropy_and_gradient(kernel, grid, F.col(K), nullptr);
  out.next = to_density(grid, F.col(K));
  out.iterations = res.iterations;
  out.tau = cfg.tau;
  return out;
}

JkoCurve jko_curve(const GridDensity& mu0, const JkoConfig& cfg) {
  cfg.validate("jko.jko_curve");
  check_problem_size(mu0.grid(), "jko.jko_curve");
  const auto op = make_tilde_gradient(mu0.grid(), cfg.model.gamma, cfg.inner.r_max);
  const Kernel kernel(cfg.model);
  JkoCurve out;
  auto diag = [&](const GridDensity& f) {
    Diagnostics d;
    d.mass = total_mass(f);
    d.momentum = momentum(f);
    d.energy = kinetic_energy(f);
    d.entropy = boltzmann_entropy(f);
    d.regularized_entropy = regularized_entropy(kernel, f);
    d.dissipation = dissipation_eps(f, kernel, cfg.model.gamma);
    return d;
  };
  GridDensity cur = mu0;
  out.trajectory.push(0.0, cur, diag(cur));
  for (int n = 1; n <= cfg.steps; ++n) {
    auto step = jko_step(cur, cfg, op);
    cur = step.next;
    out.trajectory.push(n * cfg.tau, cur, diag(cur));
    out.steps.push_back(std::move(step));
  }
  return out;
}

double reduced_dissipation(const GridDensity& f, const Kernel& kernel, double gamma, const CutoffSpec& cutoffs) {
  cutoffs.validate("jko.reduced_dissipation");
  const auto& g = f.grid();
  if (g.d == 1) return 0.0;
  const auto J = first_variation_gradient(kernel, f);
  const auto nodes = g.nodes();
  const double vol = g.cell_volume();
  std::vector<double> partial(nodes.size(), 0.0);
  parallel_for(nodes.size(), 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const double pk = cutoffs.phi(nodes[k]);
      if (pk == 0.0) continue;
      double acc = 0.0;
      for (std::size_t l = k + 1; l < nodes.size(); ++l) {
        const Point z = nodes[k] - nodes[l];
        const double c = pk * cutoffs.phi(nodes[l]) * cutoffs.psi(z);
        if (c == 0.0) continue;
        const double r2 = norm2(z);
        acc += c * f[l] * std::pow(r2, 1.0 + 0.5 * gamma) * norm2(project_orthogonal(z, J[k] - J[l]));
      }
      partial[k] = f[k] * acc;
    }
  });
  double D = 0.0;
  for (double v : partial) D += v;
  return D * vol * vol;
}

SlopeBound slope_lower_bound(const GridDensity& mu0, double R1, double R2, const JkoConfig& cfg) {
  const char* where = "jko.slope_lower_bound";
  cfg.validate(where);
  const CutoffSpec cut{R1, R2};
  cut.validate(where);
  const GridSpec& grid = mu0.grid();
  require(grid.d == cfg.model.d, where, "model dimension differs from the grid dimension");
  check_problem_size(grid, where);
  const Kernel kernel(cfg.model);
  const double gamma = cfg.model.gamma;
  const auto op = std::make_shared<const TildeGradient>(grid, gamma);
  const auto nodes = grid.nodes();
  const double hd = grid.cell_volume();

  // frozen first variation and per-pair cutoff weights
  const auto field = entropy_field(kernel, mu0);
  const auto psi0 = first_variation(kernel, field);
  const auto Bpsi = op->apply(psi0);
  std::vector<double> c(op->pairs());
  for (std::size_t p = 0; p < op->pairs(); ++p) {
    const auto& vk = nodes[op->first(p)];
    const auto& vl = nodes[op->second(p)];
    c[p] = cut.phi(vk) * cut.phi(vl) * cut.psi(vk - vl);
  }
  SlopeBound out;
  double Dred = 0.0;
  for (std::size_t p = 0; p < op->pairs(); ++p)
    Dred += c[p] * mu0[op->first(p)] * mu0[op->second(p)] * norm2(Bpsi[p]);
  Dred *= hd * hd;
  out.sqrtD_reduced = std::sqrt(Dred);

  // Lipschitz constant of the particle realisation (cell-centre atoms)
  std::vector<Point> atoms;
  std::vector<double> w;
  for (std::size_t k = 0; k < nodes.size(); ++k)
    if (mu0[k] > 0.0) {
      atoms.push_back(nodes[k]);
      w.push_back(mu0[k] * hd);
    }
  const ParticleEnsemble atomic(grid.d, atoms, w);
  const FrozenField frozen(kernel, atomic, gamma, cut);
  const auto lip = lipschitz_constants(frozen, grid.d == 3 ? 8 : 16);
  out.T_max = lip.C_lip > 0.0 ? std::log(2.0) / lip.C_lip : kInf;
  out.t = std::min(0.5 * out.T_max, 0.01);

  // cutoff flow df/dt = h^d B^T m, m_p = -c_p f_k f_l (B psi0)_p, RK4
  auto rhs = [&](const Eigen::VectorXd& f) {
    std::vector<Point> m(op->pairs());
    for (std::size_t p = 0; p < op->pairs(); ++p)
      m[p] = (-c[p] * f[op->first(p)] * f[op->second(p)]) * Bpsi[p];
    const auto q = op->apply_transpose(m);
    Eigen::VectorXd r(f.size());
    for (Eigen::Index k = 0; k < r.size(); ++k) r[k] = hd * q[static_cast<std::size_t>(k)];
    return r;
  };
  const int nsub = 20;
  const double h = out.t / nsub;
  Eigen::VectorXd f = to_vector(mu0);
  for (int i = 0; i < nsub; ++i) {
    const Eigen::VectorXd k1 = rhs(f);
    const Eigen::VectorXd k2 = rhs(f + 0.5 * h * k1);
    const Eigen::VectorXd k3 = rhs(f + 0.5 * h * k2);
    const Eigen::VectorXd k4 = rhs(f + h * k3);
    f += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  if (f.minCoeff() <= 0.0) raise(ErrorKind::StepDiverged, where, "cutoff flow left the positive cone");
  const GridDensity ft = to_density(grid, f);
  out.entropy_drop = field.entropy - regularized_entropy(kernel, ft);
  DistanceOptions dopt = cfg.inner;
  dopt.floor_check = false;
  const auto dist = landau_distance(mu0, ft, op, dopt);
  out.distance = dist.distance;
  out.slope_est = out.distance > 0.0 ? out.entropy_drop / out.distance : 0.0;
  // first-order-in-t consistency of both quotients
  out.budget = 0.05 * out.sqrtD_reduced + 1e-10;
  return out;
}

EdiReport edi_certificate(const Trajectory& traj, const std::optional<std::vector<double>>& speed_sq, double tol) {
  EdiReport rep;
  const auto t = traj.times();
  const auto H = traj.regularized_entropies();
  const auto D = traj.dissipations();
  const std::size_t n = t.size();
  rep.times.assign(t.begin(), t.end());
  if (speed_sq)
    require(speed_sq->size() + 1 == n || n == 0, "jko.edi_certificate", "need one speed value per interval");
  // cumulative 1/2 int D + 1/2 int |mu'|^2
  std::vector<double> cum(n, 0.0);
  double budget = 0.0, Hmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) Hmax = std::max(Hmax, std::abs(H[i]));
  for (std::size_t i = 1; i < n; ++i) {
    const double dt = t[i] - t[i - 1];
    const double intD = 0.5 * dt * (D[i] + D[i - 1]);
    const double intS = speed_sq ? dt * (*speed_sq)[i - 1] : intD;
    cum[i] = cum[i - 1] + 0.5 * intD + 0.5 * intS;
    budget += 0.5 * dt * std::abs(D[i] - D[i - 1]);
  }
  rep.tolerance = tol >= 0.0 ? tol : budget + 64.0 * std::numeric_limits<double>::epsilon() * Hmax;
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t r = s + 1; r < n; ++r) {
      const double res = H[r] - H[s] + (cum[r] - cum[s]);
      rep.residuals.push_back(res);
      rep.max_residual = std::max(rep.max_residual, res);
    }
  rep.pass = rep.max_residual <= rep.tolerance;
  return rep;
}

}  // namespace landau
