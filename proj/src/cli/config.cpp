#include "landau/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "landau/core/error.hpp"
#include "landau/metric/distance.hpp"

namespace landau::cli {

namespace {

constexpr const char* kWhere = "cli.config";

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    raise(ErrorKind::InvalidArgument, kWhere, key + ": expected a number, got '" + v + "'");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    raise(ErrorKind::InvalidArgument, kWhere, key + ": expected an integer, got '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    raise(ErrorKind::InvalidArgument, kWhere, key + ": expected a non-negative integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  raise(ErrorKind::InvalidArgument, kWhere, key + ": expected true or false, got '" + v + "'");
}

/// "a" or "a,b[,c]"; a single value is broadcast.
Point to_point(const std::string& key, const std::string& v) {
  Point p{0.0, 0.0, 0.0};
  std::vector<double> vals;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) vals.push_back(to_double(key, trim(item)));
  if (vals.empty() || vals.size() > 3) raise(ErrorKind::InvalidArgument, kWhere, key + ": expected 1 to 3 numbers");
  for (int a = 0; a < 3; ++a) p[a] = vals.size() == 1 ? vals[0] : (a < static_cast<int>(vals.size()) ? vals[a] : 0.0);
  return p;
}

std::string point_str(const Point& p) { return fmt(p[0]) + "," + fmt(p[1]) + "," + fmt(p[2]); }

Experiment parse_experiment(const std::string& v) {
  if (v == "particle") return Experiment::Particle;
  if (v == "jko") return Experiment::Jko;
  if (v == "distance") return Experiment::Distance;
  if (v == "aux-fixed-point") return Experiment::AuxFixedPoint;
  if (v == "edi-audit") return Experiment::EdiAudit;
  if (v == "diagnostics") return Experiment::Diagnostics;
  raise(ErrorKind::InvalidArgument, kWhere, "experiment: unknown value '" + v + "'");
}

InitKind parse_init(const std::string& key, const std::string& v) {
  if (v == "maxwellian") return InitKind::Maxwellian;
  if (v == "anisotropic-gaussian") return InitKind::AnisotropicGaussian;
  if (v == "bimodal") return InitKind::Bimodal;
  if (v == "file") return InitKind::File;
  raise(ErrorKind::InvalidArgument, kWhere, key + ": unknown initial data '" + v + "'");
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

void add_init_fields(std::vector<Field>& f, const std::string& prefix, InitialData RunConfig::*member) {
  f.push_back({prefix + ".kind", [=](RunConfig& c, const std::string& v) { (c.*member).kind = parse_init(prefix + ".kind", v); },
               [=](const RunConfig& c) { return std::string(to_string((c.*member).kind)); }});
  f.push_back({prefix + ".mean", [=](RunConfig& c, const std::string& v) { (c.*member).mean = to_point(prefix + ".mean", v); },
               [=](const RunConfig& c) { return point_str((c.*member).mean); }});
  f.push_back({prefix + ".temperature",
               [=](RunConfig& c, const std::string& v) { (c.*member).temperature = to_point(prefix + ".temperature", v); },
               [=](const RunConfig& c) { return point_str((c.*member).temperature); }});
  f.push_back({prefix + ".separation",
               [=](RunConfig& c, const std::string& v) { (c.*member).separation = to_double(prefix + ".separation", v); },
               [=](const RunConfig& c) { return fmt((c.*member).separation); }});
  f.push_back({prefix + ".background",
               [=](RunConfig& c, const std::string& v) { (c.*member).background = to_double(prefix + ".background", v); },
               [=](const RunConfig& c) { return fmt((c.*member).background); }});
  f.push_back({prefix + ".file", [=](RunConfig& c, const std::string& v) { (c.*member).file = v; },
               [=](const RunConfig& c) { return (c.*member).file; }});
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
#define LANDAU_DOUBLE(KEY, EXPR) \
  f.push_back({KEY, [](RunConfig& c, const std::string& v) { c.EXPR = to_double(KEY, v); }, [](const RunConfig& c) { return fmt(c.EXPR); }})
#define LANDAU_INT(KEY, EXPR)                                                                             \
  f.push_back({KEY, [](RunConfig& c, const std::string& v) { c.EXPR = static_cast<int>(to_int(KEY, v)); }, \
               [](const RunConfig& c) { return std::to_string(c.EXPR); }})
    f.push_back({"experiment", [](RunConfig& c, const std::string& v) { c.experiment = parse_experiment(v); },
                 [](const RunConfig& c) { return std::string(to_string(c.experiment)); }});
    f.push_back({"output_dir", [](RunConfig& c, const std::string& v) { c.output_dir = v; },
                 [](const RunConfig& c) { return c.output_dir; }});
    f.push_back({"seed", [](RunConfig& c, const std::string& v) { c.seed = to_u64("seed", v); },
                 [](const RunConfig& c) { return std::to_string(c.seed); }});
    LANDAU_INT("model.d", model.d);
    LANDAU_DOUBLE("model.gamma", model.gamma);
    LANDAU_DOUBLE("model.epsilon", model.epsilon);
    LANDAU_DOUBLE("model.s", model.s);
    LANDAU_INT("discretization.particles", particles);
    f.push_back({"discretization.layout", [](RunConfig& c, const std::string& v) { c.layout = v; },
                 [](const RunConfig& c) { return c.layout; }});
    LANDAU_DOUBLE("discretization.dt", solver.dt);
    LANDAU_DOUBLE("discretization.t_end", solver.t_end);
    f.push_back({"discretization.integrator",
                 [](RunConfig& c, const std::string& v) { c.solver.integrator = parse_integrator(v); },
                 [](const RunConfig& c) { return std::string(to_string(c.solver.integrator)); }});
    LANDAU_INT("discretization.record_every", solver.record_every);
    LANDAU_INT("discretization.n_aux", solver.n_aux);
    LANDAU_DOUBLE("discretization.delta_sing", solver.delta_sing);
    LANDAU_INT("discretization.grid_n", grid_n);
    LANDAU_DOUBLE("discretization.half_width", half_width);
    LANDAU_INT("discretization.K", K);
    LANDAU_DOUBLE("discretization.tau", tau);
    LANDAU_INT("discretization.steps", steps);
    LANDAU_DOUBLE("solver.floor", floor);
    LANDAU_INT("solver.max_iter", max_iter);
    LANDAU_DOUBLE("solver.gtol", gtol);
    f.push_back({"solver.floor_check", [](RunConfig& c, const std::string& v) { c.floor_check = to_bool("solver.floor_check", v); },
                 [](const RunConfig& c) { return std::string(c.floor_check ? "true" : "false"); }});
    LANDAU_DOUBLE("aux.R1", R1);
    LANDAU_DOUBLE("aux.R2", R2);
    LANDAU_DOUBLE("aux.T_fraction", T_fraction);
    LANDAU_INT("aux.nodes", nodes);
    LANDAU_DOUBLE("aux.safety", safety);
    add_init_fields(f, "initial_data", &RunConfig::init);
    add_init_fields(f, "target", &RunConfig::target);
    LANDAU_INT("output.snapshot_every", snapshot_every);
#undef LANDAU_DOUBLE
#undef LANDAU_INT
    return f;
  }();
  return table;
}

}  // namespace

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::Particle: return "particle";
    case Experiment::Jko: return "jko";
    case Experiment::Distance: return "distance";
    case Experiment::AuxFixedPoint: return "aux-fixed-point";
    case Experiment::EdiAudit: return "edi-audit";
    case Experiment::Diagnostics: return "diagnostics";
  }
  return "?";
}

std::string_view to_string(InitKind k) {
  switch (k) {
    case InitKind::Maxwellian: return "maxwellian";
    case InitKind::AnisotropicGaussian: return "anisotropic-gaussian";
    case InitKind::Bimodal: return "bimodal";
    case InitKind::File: return "file";
  }
  return "?";
}

std::map<std::string, std::string> parse_key_values(std::string_view text, const std::string& source) {
  std::map<std::string, std::string> out;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    const std::string at = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) raise(ErrorKind::InvalidArgument, kWhere, at + ": expected 'key = value'");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) raise(ErrorKind::InvalidArgument, kWhere, at + ": empty key");
    if (!out.emplace(key, value).second) raise(ErrorKind::InvalidArgument, kWhere, at + ": duplicate key '" + key + "'");
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> RunConfig::resolved() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(*this));
  return out;
}

RunConfig parse_run_config(std::string_view text, const std::string& source) {
  const auto kv = parse_key_values(text, source);
  RunConfig cfg;
  for (const auto& [key, value] : kv) {
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.key == key; });
    if (it == table.end()) raise(ErrorKind::InvalidArgument, kWhere, "unknown key '" + key + "'");
    it->set(cfg, value);
  }
  validate_run_config(cfg);
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::InvalidArgument, kWhere, "cannot read config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.string());
}

void validate_run_config(const RunConfig& c) {
  c.model.validate(kWhere);
  require(!c.output_dir.empty(), kWhere, "output_dir must not be empty");
  require(c.layout == "random" || c.layout == "lattice", kWhere, "discretization.layout must be random or lattice");
  require(c.particles >= 1, kWhere, "discretization.particles must be positive");
  c.solver.validate();
  require(c.grid_n >= 3, kWhere, "discretization.grid_n must be at least 3");
  require(c.half_width >= 0.0, kWhere, "discretization.half_width must be non-negative");
  require(c.K >= 1, kWhere, "discretization.K must be at least 1");
  require(c.tau > 0.0, kWhere, "discretization.tau must be positive");
  require(c.steps >= 1, kWhere, "discretization.steps must be positive");
  require(c.floor > 0.0 && c.gtol > 0.0 && c.max_iter >= 1, kWhere, "solver tolerances must be positive");
  require(c.R1 > 0.0 && c.R2 > 0.0, kWhere, "aux.R1 and aux.R2 must be positive");
  require(c.T_fraction > 0.0 && c.T_fraction < 1.0, kWhere, "aux.T_fraction must lie in (0, 1)");
  require(c.nodes >= 2, kWhere, "aux.nodes must be at least 2");
  require(c.safety >= 1.0, kWhere, "aux.safety must be at least 1");
  require(c.snapshot_every >= 0, kWhere, "output.snapshot_every must be non-negative");
  for (const auto* init : {&c.init, &c.target}) {
    for (int a = 0; a < c.model.d; ++a) require(init->temperature[a] > 0.0, kWhere, "temperatures must be positive");
    require(init->background >= 0.0 && init->background < 1.0, kWhere, "background must lie in [0, 1)");
    if (init->kind == InitKind::File) require(!init->file.empty(), kWhere, "file initial data needs a file path");
  }
  const bool grid_experiment = c.experiment == Experiment::Jko || c.experiment == Experiment::Distance;
  if (grid_experiment) {
    GridSpec g;
    g.d = c.model.d;
    g.n = c.grid_n;
    check_problem_size(g, c.experiment == Experiment::Jko ? "jko.jko_step" : "grazing_metric.landau_distance");
  }
}

}  // namespace landau::cli
