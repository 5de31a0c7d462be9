#include "landau/core/lbfgs.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace landau {

LbfgsResult lbfgs_minimize(const Objective& fg, Eigen::VectorXd x0, const LbfgsOptions& opts) {
  LbfgsResult res;
  const Eigen::Index n = x0.size();
  Eigen::VectorXd g(n);
  Eigen::VectorXd x = std::move(x0);
  double f = fg(x, g);
  res.evaluations = 1;
  std::deque<Eigen::VectorXd> S;
  std::deque<Eigen::VectorXd> Y;
  std::deque<double> rho;
  int stall = 0;
  Eigen::VectorXd xn(n);
  Eigen::VectorXd gn(n);

  auto converged_by_gradient = [&](double fv, const Eigen::VectorXd& gv) {
    const double scale = opts.fscale > 0.0 ? opts.fscale : std::max(1.0, std::abs(fv));
    return n == 0 || gv.lpNorm<Eigen::Infinity>() <= opts.gtol * scale;
  };

  for (int it = 0; it < opts.max_iter; ++it) {
    res.iterations = it;
    if (!std::isfinite(f)) break;
    if (converged_by_gradient(f, g)) {
      res.converged = true;
      break;
    }
    // two-loop recursion
    Eigen::VectorXd q = g;
    std::vector<double> alpha(S.size());
    for (int i = static_cast<int>(S.size()) - 1; i >= 0; --i) {
      alpha[i] = rho[i] * S[i].dot(q);
      q -= alpha[i] * Y[i];
    }
    double step = 1.0;
    if (S.empty()) {
      step = opts.initial_step / std::max(q.lpNorm<Eigen::Infinity>(), 1e-300);
    } else {
      q *= S.back().dot(Y.back()) / Y.back().squaredNorm();
    }
    for (std::size_t i = 0; i < S.size(); ++i) {
      const double beta = rho[i] * Y[i].dot(q);
      q += S[i] * (alpha[i] - beta);
    }
    Eigen::VectorXd dir = -q;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      S.clear();
      Y.clear();
      rho.clear();
      dir = -g;
      slope = -g.squaredNorm();
      step = opts.initial_step / std::max(g.lpNorm<Eigen::Infinity>(), 1e-300);
    }
    double fn = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      xn = x + step * dir;
      fn = fg(xn, gn);
      ++res.evaluations;
      if (std::isfinite(fn) && fn <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // no representable decrease along the direction
      if (S.empty()) break;
      S.clear();
      Y.clear();
      rho.clear();
      ++stall;
      if (stall >= opts.stall_iters) break;
      continue;
    }
    Eigen::VectorXd s = xn - x;
    Eigen::VectorXd y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      rho.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > opts.memory) {
        S.pop_front();
        Y.pop_front();
        rho.pop_front();
      }
    }
    const double decrease = f - fn;
    const double fs = opts.fscale > 0.0 ? opts.fscale : std::max(1.0, std::abs(f));
    stall = decrease <= opts.ftol * fs ? stall + 1 : 0;
    x = xn;
    g = gn;
    f = fn;
    if (stall >= opts.stall_iters) break;
  }
  if (!res.converged) res.converged = converged_by_gradient(f, g) || stall >= opts.stall_iters;
  res.x = std::move(x);
  res.f = f;
  res.grad_inf = g.size() ? g.lpNorm<Eigen::Infinity>() : 0.0;
  return res;
}

}  // namespace landau
