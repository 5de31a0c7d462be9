#include "landau/cli/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "landau/aux/aux_flow.hpp"
#include "landau/collision/collision.hpp"
#include "landau/jko/jko.hpp"
#include "landau/kernels/bounds.hpp"
#include "landau/metric/distance.hpp"
#include "landau/particles/solver.hpp"
#include "landau/simd/kernel_sums.hpp"

namespace landau::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Manifest = std::vector<std::pair<std::string, std::string>>;

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) raise(ErrorKind::InvalidArgument, "cli.run", "cannot create output directory '" + dir.string() + "'");
}

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorKind::InvalidArgument, "cli.run", "cannot write '" + file.string() + "'");
  return out;
}

void write_manifest(const std::filesystem::path& dir, const RunConfig& cfg, const Manifest& tolerances,
                    const Manifest& results) {
  auto out = open_out(dir / "manifest");
  out << "# resolved configuration\n";
  for (const auto& [k, v] : cfg.resolved()) out << k << " = " << v << "\n";
  out << "# build\n";
  out << "code.version = " << kVersion << "\n";
  out << "code.simd_backend = " << simd::to_string(simd::active_backend()) << "\n";
  out << "# tolerances\n";
  for (const auto& [k, v] : tolerances) out << k << " = " << v << "\n";
  out << "# results\n";
  for (const auto& [k, v] : results) out << k << " = " << v << "\n";
}

std::vector<std::size_t> snapshot_indices(std::size_t records, int every) {
  std::vector<std::size_t> idx;
  if (records == 0) return idx;
  if (every <= 0) {
    idx.push_back(0);
    if (records > 1) idx.push_back(records - 1);
    return idx;
  }
  for (std::size_t k = 0; k < records; k += static_cast<std::size_t>(every)) idx.push_back(k);
  if (idx.back() != records - 1) idx.push_back(records - 1);
  return idx;
}

void write_snapshots(const std::filesystem::path& dir, const Trajectory& traj, int every) {
  for (std::size_t k : snapshot_indices(traj.size(), every))
    write_state(dir / ("state_" + std::to_string(k) + ".csv"), traj.states()[k]);
}

/// H(t_k) - H(0) + int_0^{t_k} D (trapezoid).
std::vector<double> cumulative_edi(const Trajectory& traj) {
  const auto t = traj.times();
  const auto H = traj.regularized_entropies();
  const auto D = traj.dissipations();
  std::vector<double> out(t.size(), 0.0);
  double acc = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    acc += 0.5 * (t[k] - t[k - 1]) * (D[k] + D[k - 1]);
    out[k] = H[k] - H[0] + acc;
  }
  return out;
}

Diagnostics grid_diagnostics(const GridDensity& f, const Kernel& kernel, double gamma) {
  Diagnostics d;
  d.mass = total_mass(f);
  d.momentum = momentum(f);
  d.energy = kinetic_energy(f);
  d.entropy = boltzmann_entropy(f);
  d.regularized_entropy = regularized_entropy(kernel, f);
  d.dissipation = dissipation_eps(f, kernel, gamma);
  return d;
}

Manifest conservation_tolerances(const RunConfig& cfg, double mono_tol) {
  return {{"tolerance.mass_drift", "0"},
          {"tolerance.momentum_drift", cfg.solver.integrator == Integrator::Rk4 ? "1e-08" : "1e-12"},
          {"tolerance.energy_drift", "1e-06"},
          {"tolerance.entropy_monotone", format_double(mono_tol)},
          {"tolerance.step_divergence_factor", "10"}};
}

double max_drift(const Trajectory& traj, const std::function<double(const Diagnostics&)>& q) {
  const auto& d = traj.diagnostics();
  double m = 0.0;
  for (const auto& x : d) m = std::max(m, std::abs(q(x) - q(d.front())));
  return m;
}

void run_particle(const RunConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
  const Kernel kernel(cfg.model);
  const auto mu0 = make_particles(cfg, cfg.init);
  const auto traj = run(mu0, cfg.solver, kernel, cfg.model.gamma);
  const auto edi = cumulative_edi(traj);
  write_diagnostics(dir / "diagnostics.csv", cfg.model.d, traj, edi);
  write_snapshots(dir, traj, cfg.snapshot_every);
  const double tol = monotonicity_tolerance(traj, cfg.solver.dt * cfg.solver.record_every);
  const auto mono = check_entropy_monotone(traj, tol);
  const auto audit = edi_audit(traj);
  Manifest res{{"result.records", std::to_string(traj.size())},
               {"result.mass_drift", format_double(max_drift(traj, [](const Diagnostics& d) { return d.mass; }))},
               {"result.momentum_drift", format_double(max_drift(traj, [](const Diagnostics& d) { return norm(d.momentum); }))},
               {"result.energy_drift", format_double(max_drift(traj, [](const Diagnostics& d) { return d.energy; }))},
               {"result.entropy_monotone", mono.pass ? "true" : "false"},
               {"result.entropy_max_increase", format_double(mono.max_increase)},
               {"result.edi_lhs", format_double(audit.lhs)},
               {"result.edi_rhs", format_double(audit.rhs)},
               {"result.edi_residual", format_double(audit.residual)},
               {"result.chain_rule_rms", format_double(traj.size() > 2 ? chain_rule_rms(traj) : kNaN)}};
  write_manifest(dir, cfg, conservation_tolerances(cfg, tol), res);
  out << "particle run: " << traj.size() << " records, edi residual " << format_double(audit.residual)
      << ", entropy monotone " << (mono.pass ? "yes" : "no") << "\n";
}

void run_diagnostics(const RunConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
  const Kernel kernel(cfg.model);
  const auto f = make_grid_density(cfg, cfg.init);
  Trajectory traj;
  traj.push(0.0, f, grid_diagnostics(f, kernel, cfg.model.gamma));
  write_diagnostics(dir / "diagnostics.csv", cfg.model.d, traj, {0.0});
  write_snapshots(dir, traj, 0);
  const double E = kinetic_energy(f) * 2.0;
  Manifest res{{"result.dissipation_exact", format_double(dissipation_exact(f, cfg.model.gamma))},
               {"result.dissipation_eps", format_double(traj.diagnostics()[0].dissipation)},
               {"result.entropy_eps_lower_bound", format_double(regularized_entropy_lower_bound(kernel, E))}};
  if (cfg.model.s <= 1.0) res.emplace_back("result.carlen_carvalho_constant", format_double(carlen_carvalho_constant(kernel, E)));
  write_manifest(dir, cfg, {}, res);
  out << "diagnostics: D_eps = " << format_double(traj.diagnostics()[0].dissipation) << "\n";
}

JkoConfig jko_config(const RunConfig& cfg) {
  JkoConfig j;
  j.tau = cfg.tau;
  j.steps = cfg.steps;
  j.model = cfg.model;
  j.inner.K = cfg.K;
  j.inner.floor = cfg.floor;
  j.inner.max_iter = cfg.max_iter;
  j.inner.gtol = cfg.gtol;
  j.inner.floor_check = cfg.floor_check;
  return j;
}

void run_jko(const RunConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
  const auto f0 = make_grid_density(cfg, cfg.init);
  const auto jc = jko_config(cfg);
  const auto curve = jko_curve(f0, jc);
  const auto& traj = curve.trajectory;
  std::vector<double> speed;
  for (const auto& s : curve.steps) speed.push_back(s.distance_sq / (cfg.tau * cfg.tau));
  const auto H = traj.regularized_entropies();
  const auto D = traj.dissipations();
  std::vector<double> edi(traj.size(), 0.0);
  double acc = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    acc += 0.25 * cfg.tau * (D[k] + D[k - 1]) + 0.5 * cfg.tau * speed[k - 1];
    edi[k] = H[k] - H[0] + acc;
  }
  write_diagnostics(dir / "diagnostics.csv", cfg.model.d, traj, edi);
  write_snapshots(dir, traj, cfg.snapshot_every);
  bool descent = true;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& s : curve.steps) {
    const double gap = s.objective() - s.entropy_prev;
    worst = std::max(worst, gap);
    descent = descent && gap <= 1e-8;
  }
  const auto mono = check_entropy_monotone(traj, 1e-8);
  Manifest tol{{"tolerance.jko_descent", "1e-08"},
               {"tolerance.entropy_monotone", "1e-08"},
               {"tolerance.inner_gtol", format_double(cfg.gtol)},
               {"tolerance.inner_floor", format_double(cfg.floor)}};
  Manifest res{{"result.steps", std::to_string(curve.steps.size())},
               {"result.descent", descent ? "true" : "false"},
               {"result.max_descent_gap", format_double(worst)},
               {"result.entropy_monotone", mono.pass ? "true" : "false"}};
  for (std::size_t n = 0; n < curve.steps.size(); ++n)
    res.emplace_back("result.distance_sq_" + std::to_string(n + 1), format_double(curve.steps[n].distance_sq));
  write_manifest(dir, cfg, tol, res);
  out << "jko run: " << curve.steps.size() << " steps, descent " << (descent ? "holds" : "violated") << "\n";
}

void run_distance(const RunConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
  const auto f0 = make_grid_density(cfg, cfg.init);
  DistanceOptions o;
  o.K = cfg.K;
  o.floor = cfg.floor;
  o.max_iter = cfg.max_iter;
  o.gtol = cfg.gtol;
  o.floor_check = cfg.floor_check;
  check_problem_size(f0.grid(), "grazing_metric.landau_distance");
  const auto op = make_tilde_gradient(f0.grid(), cfg.model.gamma, o.r_max);
  const auto f1 = project_to_moments(*op, make_grid_density(cfg, cfg.target), f0);
  const auto res = landau_distance(f0, f1, op, o);
  const Kernel kernel(cfg.model);
  Trajectory traj;
  for (std::size_t j = 0; j < res.path.densities.size(); ++j)
    traj.push(res.path.times[j], res.path.densities[j], grid_diagnostics(res.path.densities[j], kernel, cfg.model.gamma));
  write_diagnostics(dir / "diagnostics.csv", cfg.model.d, traj, std::vector<double>(traj.size(), kNaN));
  write_snapshots(dir, traj, cfg.snapshot_every);
  std::vector<double> ones(f0.size(), 1.0);
  const double gce = check_gce(res.path, ones);
  Manifest tol{{"tolerance.gtol", format_double(cfg.gtol)},
               {"tolerance.floor", format_double(cfg.floor)},
               {"tolerance.floor_check_floor", "1e-12"},
               {"tolerance.equipartition", "0.05"}};
  double amin = std::numeric_limits<double>::infinity(), amax = 0.0;
  for (double a : res.interval_actions) {
    amin = std::min(amin, a);
    amax = std::max(amax, a);
  }
  Manifest out_res{{"result.distance", format_double(res.distance)},
                   {"result.distance_sq", format_double(res.squared)},
                   {"result.floor_sensitivity", format_double(res.floor_sensitivity)},
                   {"result.iterations", std::to_string(res.iterations)},
                   {"result.action_min", format_double(amin)},
                   {"result.action_max", format_double(amax)},
                   {"result.gce_residual_mass", format_double(gce)}};
  write_manifest(dir, cfg, tol, out_res);
  out << "distance: " << format_double(res.distance) << "\n";
}

void run_aux(const RunConfig& cfg, const std::filesystem::path& dir, std::ostream& out) {
  const Kernel kernel(cfg.model);
  const auto mu0 = make_particles(cfg, cfg.init);
  const CutoffSpec cut{cfg.R1, cfg.R2};
  const FrozenField field(kernel, mu0, cfg.model.gamma, cut, cfg.solver.n_aux);
  FixedPointOptions fo;
  fo.nodes = cfg.nodes;
  fo.safety = cfg.safety;
  fo.seed = derive_seed(cfg.seed, 7);
  const double C = cfg.safety * lipschitz_constants(field).C_lip;
  const double T = C > 0.0 ? cfg.T_fraction * std::log(2.0) / C : 1.0;
  const auto res = fixed_point_solve(mu0, field, T, fo);
  const ParticleEntropy ent(kernel, default_aux_grid(mu0, kernel, cfg.solver.n_aux));
  Trajectory traj;
  for (std::size_t n = 0; n < res.curve.times.size(); ++n) {
    const auto mu = res.curve.ensemble(n);
    Diagnostics d;
    d.mass = total_mass(mu);
    d.momentum = momentum(mu);
    d.energy = kinetic_energy(mu);
    d.entropy = kNaN;
    d.regularized_entropy = ent.field(mu).entropy;
    d.dissipation = dissipation_eps(mu, ent, cfg.model.gamma);
    traj.push(res.curve.times[n], mu, d);
  }
  write_diagnostics(dir / "diagnostics.csv", cfg.model.d, traj, std::vector<double>(traj.size(), kNaN));
  write_snapshots(dir, traj, cfg.snapshot_every);
  double worst_ratio = 0.0;
  for (double r : res.ratios) worst_ratio = std::max(worst_ratio, r);
  Manifest tol{{"tolerance.picard", "1e-08"},
               {"tolerance.growth_bound", "1e-08"},
               {"tolerance.contraction_bound", format_double(res.contraction_bound)}};
  Manifest r{{"result.T", format_double(T)},
             {"result.C_lip", format_double(res.C_lip)},
             {"result.T_max", format_double(res.T_max)},
             {"result.iterations", std::to_string(res.iterations)},
             {"result.max_ratio", format_double(worst_ratio)},
             {"result.sliced_w2", res.sliced ? "true" : "false"}};
  write_manifest(dir, cfg, tol, r);
  if (res.sliced) out << "warning: W2 estimated by slicing\n";
  out << "aux fixed point: " << res.iterations << " iterations, max ratio " << format_double(worst_ratio) << "\n";
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Csv read_csv(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) raise(ErrorKind::IncompatibleRuns, "cli.compare", "cannot read '" + file.string() + "'");
  Csv csv;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    return parts;
  };
  if (!std::getline(in, line)) raise(ErrorKind::IncompatibleRuns, "cli.compare", "empty '" + file.string() + "'");
  csv.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& p : split(line)) row.push_back(std::strtod(p.c_str(), nullptr));
    csv.rows.push_back(std::move(row));
  }
  return csv;
}

std::map<std::string, std::string> read_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest", std::ios::binary);
  if (!in) raise(ErrorKind::IncompatibleRuns, "cli.compare", "no manifest in '" + dir.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str(), (dir / "manifest").string());
}

int handle(const std::function<void()>& body, std::ostream& err) {
  try {
    body();
    return 0;
  } catch (const Error& e) {
    err << "ERROR " << e.where() << ": " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "ERROR cli.run: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotConverged:
    case ErrorKind::StepDiverged:
    case ErrorKind::SingularPair:
    case ErrorKind::ZeroRelativeVelocity:
      return 3;
    default:
      return 2;
  }
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_diagnostics(const std::filesystem::path& file, int d, const Trajectory& traj, const std::vector<double>& edi) {
  require(edi.size() == traj.size(), "cli.write_diagnostics", "edi column length differs from the trajectory");
  auto out = open_out(file);
  static const char* axes[] = {"x", "y", "z"};
  out << "t,mass";
  for (int a = 0; a < d; ++a) out << ",momentum_" << axes[a];
  out << ",energy,entropy,entropy_eps,dissipation_eps,edi_residual\n";
  const auto& diag = traj.diagnostics();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto& x = diag[k];
    out << format_double(traj.times()[k]) << ',' << format_double(x.mass);
    for (int a = 0; a < d; ++a) out << ',' << format_double(x.momentum[a]);
    out << ',' << format_double(x.energy) << ',' << format_double(x.entropy) << ','
        << format_double(x.regularized_entropy) << ',' << format_double(x.dissipation) << ',' << format_double(edi[k])
        << '\n';
  }
}

void write_state(const std::filesystem::path& file, const State& state) {
  auto out = open_out(file);
  if (const auto* mu = std::get_if<ParticleEnsemble>(&state)) {
    out << "w";
    for (int a = 0; a < mu->dim(); ++a) out << ",v" << a + 1;
    out << '\n';
    for (std::size_t i = 0; i < mu->size(); ++i) {
      out << format_double(mu->weight(i));
      for (int a = 0; a < mu->dim(); ++a) out << ',' << format_double(mu->position(i)[a]);
      out << '\n';
    }
    return;
  }
  const auto& f = std::get<GridDensity>(state);
  const int d = f.grid().d;
  for (int a = 0; a < d; ++a) out << (a ? "," : "") << "i" << a + 1;
  out << ",f\n";
  for (std::size_t k = 0; k < f.size(); ++k) {
    const auto idx = f.grid().multi_index(k);
    for (int a = 0; a < d; ++a) out << (a ? "," : "") << idx[a];
    out << ',' << format_double(f[k]) << '\n';
  }
}

State read_state(const std::filesystem::path& file, int d, const GridSpec& grid) {
  const auto csv = read_csv(file);
  const char* where = "cli.read_state";
  require(!csv.header.empty(), where, "empty state file");
  if (csv.header.front() == "w") {
    require(static_cast<int>(csv.header.size()) == d + 1, where, "particle state has the wrong dimension");
    std::vector<Point> pos;
    std::vector<double> w;
    for (const auto& r : csv.rows) {
      require(static_cast<int>(r.size()) == d + 1, where, "malformed particle row");
      Point p{0.0, 0.0, 0.0};
      for (int a = 0; a < d; ++a) p[a] = r[a + 1];
      pos.push_back(p);
      w.push_back(r[0]);
    }
    return ParticleEnsemble(d, std::move(pos), std::move(w));
  }
  require(static_cast<int>(csv.header.size()) == d + 1 && csv.header.back() == "f", where, "grid state has the wrong layout");
  std::vector<double> vals(grid.size(), 0.0);
  for (const auto& r : csv.rows) {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = 0; a < d; ++a) {
      idx[a] = static_cast<int>(r[a]);
      require(idx[a] >= 0 && idx[a] < grid.n, where, "grid index out of range");
    }
    vals[grid.flat_index(idx)] = r[d];
  }
  return GridDensity(grid, std::move(vals));
}

GridSpec experiment_grid(const RunConfig& cfg) {
  GridSpec g;
  g.d = cfg.model.d;
  g.n = cfg.grid_n;
  g.center = {0.0, 0.0, 0.0};
  for (int a = 0; a < g.d; ++a) g.center[a] = cfg.init.mean[a];
  double L = cfg.half_width;
  if (L <= 0.0) {
    for (const auto* init : {&cfg.init, &cfg.target}) {
      double tmax = 0.0;
      for (int a = 0; a < g.d; ++a) tmax = std::max(tmax, init->temperature[a]);
      double shift = 0.0;
      for (int a = 0; a < g.d; ++a) shift = std::max(shift, std::abs(init->mean[a] - cfg.init.mean[a]));
      if (init->kind == InitKind::Bimodal) shift += 0.5 * init->separation;
      L = std::max(L, shift + 6.5 * std::sqrt(tmax));
    }
  }
  g.half_width = L;
  g.validate("cli.experiment_grid");
  return g;
}

namespace {

GridDensity with_background(const GridDensity& f, double fraction) {
  if (fraction <= 0.0) return f;
  const auto v = f.values();
  const double floor = fraction * *std::max_element(v.begin(), v.end());
  std::vector<double> out(v.begin(), v.end());
  for (auto& x : out) x += floor;
  return GridDensity(f.grid(), std::move(out));
}

GridDensity base_grid_density(const RunConfig& cfg, const InitialData& init) {
  const auto grid = experiment_grid(cfg);
  switch (init.kind) {
    case InitKind::Maxwellian: return make_maxwellian(grid, init.mean, init.temperature[0]);
    case InitKind::AnisotropicGaussian: return make_gaussian(grid, init.mean, init.temperature);
    case InitKind::Bimodal: {
      Point a = init.mean, b = init.mean;
      a[0] -= 0.5 * init.separation;
      b[0] += 0.5 * init.separation;
      const auto ga = make_gaussian(grid, a, init.temperature);
      const auto gb = make_gaussian(grid, b, init.temperature);
      std::vector<double> v(grid.size());
      for (std::size_t k = 0; k < v.size(); ++k) v[k] = ga[k] + gb[k];
      return GridDensity(grid, std::move(v));
    }
    case InitKind::File: {
      auto s = read_state(init.file, cfg.model.d, grid);
      if (auto* f = std::get_if<GridDensity>(&s)) return *f;
      raise(ErrorKind::InvalidArgument, "cli.initial_data", "file holds particles, a grid density is required");
    }
  }
  raise(ErrorKind::InvalidArgument, "cli.initial_data", "unknown initial data");
}

}  // namespace

GridDensity make_grid_density(const RunConfig& cfg, const InitialData& init) {
  return with_background(base_grid_density(cfg, init), init.background);
}

ParticleEnsemble make_particles(const RunConfig& cfg, const InitialData& init) {
  const int d = cfg.model.d;
  const auto N = static_cast<std::size_t>(cfg.particles);
  const std::uint64_t seed = derive_seed(cfg.seed, 1);
  switch (init.kind) {
    case InitKind::Maxwellian:
    case InitKind::AnisotropicGaussian: {
      Point T = init.temperature;
      if (init.kind == InitKind::Maxwellian) T = {T[0], T[0], T[0]};
      if (cfg.layout == "lattice") {
        const int per_axis = std::max(2, static_cast<int>(std::lround(std::pow(static_cast<double>(N), 1.0 / d))));
        return lattice_gaussian(d, per_axis, init.mean, T);
      }
      return sample_gaussian(d, N, init.mean, T, seed);
    }
    case InitKind::Bimodal: {
      Point a = init.mean, b = init.mean;
      a[0] -= 0.5 * init.separation;
      b[0] += 0.5 * init.separation;
      const auto A = sample_gaussian(d, N / 2, a, init.temperature, seed);
      const auto B = sample_gaussian(d, N - N / 2, b, init.temperature, derive_seed(cfg.seed, 2));
      std::vector<Point> pos(A.positions().begin(), A.positions().end());
      pos.insert(pos.end(), B.positions().begin(), B.positions().end());
      return ParticleEnsemble::uniform(d, std::move(pos));
    }
    case InitKind::File: {
      auto s = read_state(init.file, d, experiment_grid(cfg));
      if (auto* mu = std::get_if<ParticleEnsemble>(&s)) return *mu;
      raise(ErrorKind::InvalidArgument, "cli.initial_data", "file holds a grid density, particles are required");
    }
  }
  raise(ErrorKind::InvalidArgument, "cli.initial_data", "unknown initial data");
}

void execute(const RunConfig& cfg, std::ostream& out) {
  const std::filesystem::path dir(cfg.output_dir);
  ensure_dir(dir);
  switch (cfg.experiment) {
    case Experiment::Particle:
    case Experiment::EdiAudit: run_particle(cfg, dir, out); break;
    case Experiment::Diagnostics: run_diagnostics(cfg, dir, out); break;
    case Experiment::Jko: run_jko(cfg, dir, out); break;
    case Experiment::Distance: run_distance(cfg, dir, out); break;
    case Experiment::AuxFixedPoint: run_aux(cfg, dir, out); break;
  }
}

int run_command(const std::filesystem::path& config, std::ostream& out, std::ostream& err) {
  return handle([&] { execute(load_run_config(config), out); }, err);
}

int validate_command(const std::filesystem::path& config, std::ostream& out, std::ostream& err) {
  return handle(
      [&] {
        const auto cfg = load_run_config(config);
        out << "config ok: experiment " << to_string(cfg.experiment) << "\n";
      },
      err);
}

int compare_command(const std::filesystem::path& dir_a, const std::filesystem::path& dir_b, std::ostream& out,
                    std::ostream& err) {
  return handle(
      [&] {
        const char* where = "cli.compare";
        const auto ma = read_manifest(dir_a);
        const auto mb = read_manifest(dir_b);
        auto get = [](const std::map<std::string, std::string>& m, const std::string& k) {
          const auto it = m.find(k);
          return it == m.end() ? std::string() : it->second;
        };
        for (const char* k : {"model.d", "model.gamma", "model.epsilon", "model.s"})
          if (get(ma, k) != get(mb, k))
            raise(ErrorKind::IncompatibleRuns, where, std::string("runs differ in ") + k);
        const std::string ea = get(ma, "experiment"), eb = get(mb, "experiment");
        const auto a = read_csv(dir_a / "diagnostics.csv");
        const auto b = read_csv(dir_b / "diagnostics.csv");
        if (a.header != b.header) raise(ErrorKind::IncompatibleRuns, where, "diagnostics headers differ");
        auto evolution = [](const std::string& e) { return e == "particle" || e == "edi-audit" || e == "jko"; };
        if (ea != eb) {
          if (!(evolution(ea) && evolution(eb)))
            raise(ErrorKind::IncompatibleRuns, where, "experiments " + ea + " and " + eb + " cannot be compared");
          // entropy curves on A's times, B interpolated linearly
          const std::size_t col = static_cast<std::size_t>(
              std::find(a.header.begin(), a.header.end(), "entropy_eps") - a.header.begin());
          out << "t,entropy_eps_a,entropy_eps_b\n";
          for (const auto& row : a.rows) {
            const double t = row[0];
            double hb = std::numeric_limits<double>::quiet_NaN();
            for (std::size_t j = 0; j + 1 < b.rows.size(); ++j)
              if (b.rows[j][0] <= t && t <= b.rows[j + 1][0]) {
                const double s = (t - b.rows[j][0]) / std::max(b.rows[j + 1][0] - b.rows[j][0], 1e-300);
                hb = b.rows[j][col] + s * (b.rows[j + 1][col] - b.rows[j][col]);
                break;
              }
            out << format_double(t) << ',' << format_double(row[col]) << ',' << format_double(hb) << '\n';
          }
          return;
        }
        // per-column max abs difference over common times
        std::vector<double> diff(a.header.size(), 0.0);
        std::size_t matched = 0;
        for (const auto& ra : a.rows) {
          for (const auto& rb : b.rows) {
            if (std::abs(ra[0] - rb[0]) > 1e-9 * std::max(1.0, std::abs(ra[0]))) continue;
            ++matched;
            for (std::size_t c = 1; c < diff.size(); ++c) {
              const double d = ra[c] - rb[c];
              if (std::isnan(ra[c]) && std::isnan(rb[c])) continue;
              diff[c] = std::max(diff[c], std::isnan(d) ? std::numeric_limits<double>::infinity() : std::abs(d));
            }
            break;
          }
        }
        if (matched == 0) raise(ErrorKind::IncompatibleRuns, where, "runs share no record times");
        out << "column,max_abs_diff\n";
        for (std::size_t c = 1; c < diff.size(); ++c) out << a.header[c] << ',' << format_double(diff[c]) << '\n';
        // refinement by a factor of two in dt or n
        const double dta = std::strtod(get(ma, "discretization.dt").c_str(), nullptr);
        const double dtb = std::strtod(get(mb, "discretization.dt").c_str(), nullptr);
        const double na = std::strtod(get(ma, "discretization.grid_n").c_str(), nullptr);
        const double nb = std::strtod(get(mb, "discretization.grid_n").c_str(), nullptr);
        const bool coarse_a = std::abs(dta / dtb - 2.0) < 1e-12 || std::abs(nb / na - 2.0) < 1e-12;
        const bool coarse_b = std::abs(dtb / dta - 2.0) < 1e-12 || std::abs(na / nb - 2.0) < 1e-12;
        if (coarse_a || coarse_b) {
          const Csv& coarse = coarse_a ? a : b;
          const Csv& fine = coarse_a ? b : a;
          auto drift = [](const Csv& c, std::size_t col) {
            double m = 0.0;
            for (const auto& r : c.rows) m = std::max(m, std::abs(r[col] - c.rows.front()[col]));
            return m;
          };
          out << "column,drift_coarse,drift_fine,observed_order\n";
          for (std::size_t c = 1; c < a.header.size(); ++c) {
            const double dc = drift(coarse, c), df = drift(fine, c);
            const double order = (dc > 0.0 && df > 0.0) ? std::log2(dc / df) : std::numeric_limits<double>::quiet_NaN();
            out << a.header[c] << ',' << format_double(dc) << ',' << format_double(df) << ',' << format_double(order)
                << '\n';
          }
        }
      },
      err);
}

}  // namespace landau::cli
