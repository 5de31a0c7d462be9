#include "landau/aux/aux_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "landau/aux/transport.hpp"
#include "landau/core/error.hpp"
#include "landau/core/parallel.hpp"

namespace landau {

double smoothstep5(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

void CutoffSpec::validate(const char* where) const {
  require(R1 > 0.0 && std::isfinite(R1), where, "R1 must be positive");
  require(R2 > 0.0 && std::isfinite(R2), where, "R2 must be positive");
}

double CutoffSpec::phi(const Point& v) const { return 1.0 - smoothstep5(norm(v) - R1); }

double CutoffSpec::psi(const Point& z) const { return smoothstep5(norm(z) * R2 - 1.0); }

FrozenField::FrozenField(const Kernel& kernel, const ParticleEnsemble& mu0, double gamma, const CutoffSpec& cutoffs,
                         int n_aux, double scale)
    : d_(kernel.dim()),
      gamma_(gamma),
      cutoffs_(cutoffs),
      scale_(scale),
      entropy_(kernel, default_aux_grid(mu0, kernel, n_aux)),
      field0_(entropy_.field(mu0)) {
  cutoffs.validate("aux_flow.FrozenField");
  require(mu0.dim() == d_, "aux_flow.FrozenField", "ensemble and kernel dimensions differ");
  require(gamma >= -4.0 && gamma <= 0.0, "aux_flow.FrozenField", "gamma must lie in [-4, 0]");
}

std::vector<Point> FrozenField::J0(std::span<const Point> points) const {
  auto J = entropy_.J(field0_, points);
  if (scale_ != 1.0)
    for (auto& j : J) j = scale_ * j;
  return J;
}

Point FrozenField::J0(const Point& v) const { return J0(std::span<const Point>(&v, 1))[0]; }

Point FrozenField::F(const Point& v, const Point& w, const Point& Jv, const Point& Jw) const {
  const Point z = v - w;
  const double c = cutoffs_.phi(v) * cutoffs_.phi(w) * cutoffs_.psi(z);
  if (c == 0.0 || d_ == 1) return {0.0, 0.0, 0.0};
  const double r2 = norm2(z);
  return (c * std::pow(r2, 1.0 + 0.5 * gamma_)) * project_orthogonal(z, Jv - Jw);
}

std::vector<Point> velocity_U(std::span<const Point> sources, std::span<const double> weights,
                              std::span<const Point> J_sources, std::span<const Point> targets,
                              std::span<const Point> J_targets, const FrozenField& field) {
  std::vector<Point> out(targets.size(), Point{0.0, 0.0, 0.0});
  parallel_for(targets.size(), 4, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (field.cutoffs().phi(targets[i]) == 0.0) continue;
      Point acc{0.0, 0.0, 0.0};
      for (std::size_t j = 0; j < sources.size(); ++j)
        acc -= weights[j] * field.F(targets[i], sources[j], J_targets[i], J_sources[j]);
      out[i] = acc;
    }
  });
  return out;
}

Point velocity_U(const ParticleEnsemble& mu, const FrozenField& field, const Point& v) {
  const auto Js = field.J0(mu.positions());
  const Point Jv = field.J0(v);
  return velocity_U(mu.positions(), mu.weights(), Js, std::span<const Point>(&v, 1), std::span<const Point>(&Jv, 1),
                    field)[0];
}

LipschitzConstants lipschitz_constants(const FrozenField& field, int per_axis) {
  const int d = field.dim();
  if (per_axis <= 0) per_axis = d == 1 ? 64 : d == 2 ? 24 : 10;
  const double L = field.cutoffs().R1 + 1.0;
  std::vector<Point> samples;
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(per_axis);
  for (std::size_t k = 0; k < total; ++k) {
    Point p{0.0, 0.0, 0.0};
    std::size_t r = k;
    for (int a = d - 1; a >= 0; --a) {
      const int i = static_cast<int>(r % per_axis);
      r /= per_axis;
      p[a] = -L + 2.0 * L * (i + 0.5) / per_axis;
    }
    samples.push_back(p);
  }
  const double delta = 1e-5 * L;
  const auto J = field.J0(samples);
  std::vector<std::vector<Point>> shifted(2 * d), Jshift(2 * d);
  for (int b = 0; b < d; ++b)
    for (int sgn = 0; sgn < 2; ++sgn) {
      auto& s = shifted[2 * b + sgn];
      s = samples;
      for (auto& p : s) p[b] += sgn ? delta : -delta;
      Jshift[2 * b + sgn] = field.J0(s);
    }
  std::vector<double> cinf(samples.size(), 0.0), clip(samples.size(), 0.0);
  parallel_for(samples.size(), 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      for (std::size_t j = 0; j < samples.size(); ++j) {
        cinf[i] = std::max(cinf[i], norm(field.F(samples[i], samples[j], J[i], J[j])));
        double fro = 0.0;
        for (int b = 0; b < d; ++b) {
          const Point fp = field.F(shifted[2 * b + 1][i], samples[j], Jshift[2 * b + 1][i], J[j]);
          const Point fm = field.F(shifted[2 * b][i], samples[j], Jshift[2 * b][i], J[j]);
          fro += norm2(fp - fm);
        }
        clip[i] = std::max(clip[i], std::sqrt(fro) / (2.0 * delta));
      }
  });
  LipschitzConstants out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out.C_inf = std::max(out.C_inf, cinf[i]);
    out.C_lip = std::max(out.C_lip, clip[i]);
  }
  return out;
}

std::vector<Point> ParticleCurve::at(double t) const {
  require(!times.empty(), "aux_flow.ParticleCurve", "empty curve");
  if (t <= times.front()) return positions.front();
  if (t >= times.back()) return positions.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t n = static_cast<std::size_t>(it - times.begin()) - 1;
  const double s = (t - times[n]) / (times[n + 1] - times[n]);
  std::vector<Point> out(positions[n].size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = positions[n][i] + s * (positions[n + 1][i] - positions[n][i]);
  return out;
}

ParticleEnsemble ParticleCurve::ensemble(std::size_t node) const {
  return ParticleEnsemble(d, positions.at(node), weights);
}

ParticleCurve constant_curve(const ParticleEnsemble& mu0, double T, int nodes) {
  require(nodes >= 2 && T > 0.0, "aux_flow.constant_curve", "need T > 0 and at least two nodes");
  ParticleCurve c;
  c.d = mu0.dim();
  c.weights.assign(mu0.weights().begin(), mu0.weights().end());
  for (int n = 0; n < nodes; ++n) {
    c.times.push_back(T * n / (nodes - 1));
    c.positions.emplace_back(mu0.positions().begin(), mu0.positions().end());
  }
  return c;
}

namespace {

struct Integrator {
  const ParticleCurve& path;
  const FrozenField& field;

  std::vector<Point> U(double t, const std::vector<Point>& targets) const {
    const auto src = path.at(t);
    const auto Js = field.J0(src);
    const auto Jt = field.J0(targets);
    return velocity_U(src, path.weights, Js, targets, Jt, field);
  }

  void rk4(std::vector<Point>& x, double t, double h, const std::vector<double>& bound) const {
    auto axpy = [](const std::vector<Point>& a, double s, const std::vector<Point>& b) {
      std::vector<Point> r(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + s * b[i];
      return r;
    };
    const auto k1 = U(t, x);
    const auto k2 = U(t + 0.5 * h, axpy(x, 0.5 * h, k1));
    const auto k3 = U(t + 0.5 * h, axpy(x, 0.5 * h, k2));
    const auto k4 = U(t + h, axpy(x, h, k3));
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (norm(x[i]) > bound[i] + 1e-8)
        raise(ErrorKind::StepDiverged, "aux_flow.flow_map",
              "characteristic left the ball of radius max(|v0|, R1 + 1)");
    }
  }
};

std::vector<double> growth_bounds(std::span<const Point> starts, const FrozenField& field) {
  std::vector<double> b(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) b[i] = std::max(norm(starts[i]), field.cutoffs().R1 + 1.0);
  return b;
}

}  // namespace

std::vector<std::vector<Point>> transport(const ParticleCurve& mu_path, const FrozenField& field,
                                          std::span<const Point> starts, int substeps) {
  require(substeps >= 1, "aux_flow.transport", "substeps must be positive");
  const Integrator integ{mu_path, field};
  const auto bound = growth_bounds(starts, field);
  std::vector<std::vector<Point>> out;
  std::vector<Point> x(starts.begin(), starts.end());
  out.push_back(x);
  for (std::size_t n = 0; n + 1 < mu_path.times.size(); ++n) {
    const double h = (mu_path.times[n + 1] - mu_path.times[n]) / substeps;
    for (int s = 0; s < substeps; ++s) integ.rk4(x, mu_path.times[n] + s * h, h, bound);
    out.push_back(x);
  }
  return out;
}

Point flow_map(const ParticleCurve& mu_path, const FrozenField& field, const Point& v0, double t, int substeps) {
  require(substeps >= 1, "aux_flow.flow_map", "substeps must be positive");
  require(t >= mu_path.times.front() && t <= mu_path.times.back() + 1e-14, "aux_flow.flow_map",
          "t outside the curve's time range");
  const Integrator integ{mu_path, field};
  const auto bound = growth_bounds(std::span<const Point>(&v0, 1), field);
  std::vector<Point> x{v0};
  const double t0 = mu_path.times.front();
  const double node_dt = mu_path.times.size() > 1 ? mu_path.times[1] - mu_path.times[0] : t - t0;
  const int steps = std::max(1, static_cast<int>(std::ceil((t - t0) / node_dt - 1e-9))) * substeps;
  const double h = (t - t0) / steps;
  for (int s = 0; s < steps; ++s) integ.rk4(x, t0 + s * h, h, bound);
  return x[0];
}

namespace {

double curve_distance(const ParticleCurve& a, const ParticleCurve& b, bool& sliced, std::uint64_t seed) {
  double worst = 0.0;
  const bool equal_weights =
      std::all_of(a.weights.begin(), a.weights.end(), [&](double w) { return w == a.weights.front(); });
  sliced = !(equal_weights && a.weights.size() <= 256);
  for (std::size_t n = 0; n < a.times.size(); ++n) {
    const double w2 = sliced ? sliced_wasserstein2(a.d, a.positions[n], a.weights, b.positions[n], b.weights, 64, seed)
                             : wasserstein2_equal(a.positions[n], b.positions[n]);
    worst = std::max(worst, w2);
  }
  return worst;
}

}  // namespace

FixedPointResult fixed_point_solve(const ParticleEnsemble& mu0, const CutoffSpec& cutoffs, const Kernel& kernel,
                                   double gamma, double T, const FixedPointOptions& opts) {
  const FrozenField field(kernel, mu0, gamma, cutoffs, opts.n_aux);
  return fixed_point_solve(mu0, field, T, opts);
}

FixedPointResult fixed_point_solve(const ParticleEnsemble& mu0, const FrozenField& field, double T,
                                   const FixedPointOptions& opts) {
  const char* where = "aux_flow.fixed_point_solve";
  require(opts.nodes >= 2 && opts.max_iter >= 1 && opts.tol > 0.0 && opts.safety >= 1.0, where,
          "invalid fixed-point options");
  require(T > 0.0, where, "T must be positive");
  FixedPointResult res;
  res.C_lip = lipschitz_constants(field, opts.lipschitz_samples).C_lip;
  res.C = opts.safety * res.C_lip;
  res.T_max = res.C > 0.0 ? std::log(2.0) / res.C : std::numeric_limits<double>::infinity();
  if (T >= res.T_max)
    raise(ErrorKind::TimeTooLarge, where,
          "T = " + std::to_string(T) + " is not below log 2 / C = " + std::to_string(res.T_max));
  res.contraction_bound = std::expm1(res.C * T);
  ParticleCurve cur = constant_curve(mu0, T, opts.nodes);
  for (int it = 1; it <= opts.max_iter; ++it) {
    ParticleCurve next = cur;
    next.positions = transport(cur, field, mu0.positions());
    const double change = curve_distance(next, cur, res.sliced, opts.seed);
    if (!res.changes.empty() && res.changes.back() > 1e-13) res.ratios.push_back(change / res.changes.back());
    res.changes.push_back(change);
    cur = std::move(next);
    res.iterations = it;
    if (change < opts.tol) {
      res.curve = std::move(cur);
      return res;
    }
  }
  raise(ErrorKind::NotConverged, where,
        "Picard iteration did not reach " + std::to_string(opts.tol) + " in " + std::to_string(opts.max_iter) +
            " iterations");
}

}  // namespace landau
