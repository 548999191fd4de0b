#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "stochpot/stochastic.hpp"
#include "stochpot/wos.hpp"

using namespace stochpot;
using geom::Vec;

namespace {

struct RunConfig {
  std::string theorem_id;
  std::string solver_kind;
  std::string domain = "ball:1";
  std::string kernel = "exponential";
  std::string g = "cos:1";
  std::string measure = "surface";
  double lambda = 0.5;
  double alpha = 1.0;
  double xi = 0.5;
  double eta = 0.5;
  double R = 1.0;
  double r = 0.5;
  double theta = 0.0;
  double rho = 1.0;
  double C = 1.0;
  std::string x = "0,0,0.5";
  int P = 2;
  long samples = 0;  // 0 = per-command default
  std::uint64_t seed = 1;
  int resolution = 0;  // 0 = per-command default
  std::string out = ".";
  std::string format = "csv";
  std::string dump_config;
};

Vec parse_point(const std::string& s) {
  Vec v = Vec::Zero();
  std::stringstream ss(s);
  std::string tok;
  int i = 0;
  while (std::getline(ss, tok, ',') && i < 3) v[i++] = std::stod(tok);
  return v;
}

geom::Domain parse_domain(const std::string& s) {
  const auto colon = s.find(':');
  const std::string kind = s.substr(0, colon);
  const double R = colon == std::string::npos ? 1.0 : std::stod(s.substr(colon + 1));
  if (kind == "ball") return geom::Domain::ball(3, R);
  if (kind == "disc") return geom::Domain::disc(R);
  if (kind == "cylinder") return geom::Domain::cylinder(R, 2.0 * R);
  throw std::invalid_argument("unknown domain: " + s);
}

grf::CovKernel parse_kernel(const RunConfig& cfg) {
  if (cfg.kernel == "exponential") return grf::CovKernel::exponential(cfg.alpha, cfg.xi);
  if (cfg.kernel == "gaussian") return grf::CovKernel::gaussian(cfg.alpha, cfg.xi);
  if (cfg.kernel == "power-law") return grf::CovKernel::power_law(cfg.xi, 1.0);
  if (cfg.kernel == "white") return grf::CovKernel::white_noise();
  throw std::invalid_argument("unknown kernel: " + cfg.kernel);
}

void load_config_file(const std::string& path, std::map<std::string, std::string>& kv) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (!key.empty()) kv[key] = val;
  }
}

// applies file values for every key whose flag was not given explicitly
void apply_kv(const std::map<std::string, std::string>& kv, CLI::App* sub, RunConfig& cfg) {
  auto overridden = [&](const char* flag) {
    const auto* opt = sub->get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };
  auto get = [&](const char* key, const char* flag, auto& slot) {
    const auto it = kv.find(key);
    if (it == kv.end() || overridden(flag)) return;
    using T = std::decay_t<decltype(slot)>;
    if constexpr (std::is_same_v<T, std::string>)
      slot = it->second;
    else if constexpr (std::is_same_v<T, double>)
      slot = std::stod(it->second);
    else if constexpr (std::is_same_v<T, int>)
      slot = std::stoi(it->second);
    else if constexpr (std::is_same_v<T, long>)
      slot = std::stol(it->second);
    else
      slot = static_cast<T>(std::stoull(it->second));
  };
  get("domain", "--domain", cfg.domain);
  get("kernel", "--kernel", cfg.kernel);
  get("g", "--g", cfg.g);
  get("measure", "--measure", cfg.measure);
  get("lambda", "--lambda", cfg.lambda);
  get("alpha", "--alpha", cfg.alpha);
  get("xi", "--xi", cfg.xi);
  get("eta", "--eta", cfg.eta);
  get("R", "--R", cfg.R);
  get("r", "--r", cfg.r);
  get("theta", "--theta", cfg.theta);
  get("rho", "--rho", cfg.rho);
  get("C", "--C", cfg.C);
  get("x", "--x", cfg.x);
  get("P", "--P", cfg.P);
  get("samples", "--samples", cfg.samples);
  get("seed", "--seed", cfg.seed);
  get("resolution", "--resolution", cfg.resolution);
  get("format", "--format", cfg.format);
}

void dump_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream os(path);
  os << "# stochpot run configuration\n";
  os << "domain = " << cfg.domain << "\n";
  os << "kernel = " << cfg.kernel << "\n";
  os << "g = " << cfg.g << "\n";
  os << "measure = " << cfg.measure << "\n";
  os << "lambda = " << cfg.lambda << "\n";
  os << "alpha = " << cfg.alpha << "\n";
  os << "xi = " << cfg.xi << "\n";
  os << "eta = " << cfg.eta << "\n";
  os << "R = " << cfg.R << "\n";
  os << "r = " << cfg.r << "\n";
  os << "theta = " << cfg.theta << "\n";
  os << "rho = " << cfg.rho << "\n";
  os << "C = " << cfg.C << "\n";
  os << "x = " << cfg.x << "\n";
  os << "P = " << cfg.P << "\n";
  os << "samples = " << cfg.samples << "\n";
  os << "seed = " << cfg.seed << "\n";
  os << "resolution = " << cfg.resolution << "\n";
  os << "format = " << cfg.format << "\n";
}

long samples_or(const RunConfig& cfg, long fallback) {
  return cfg.samples > 0 ? cfg.samples : fallback;
}
int resolution_or(const RunConfig& cfg, int fallback) {
  return cfg.resolution > 0 ? cfg.resolution : fallback;
}

ReportSet run_verify_one(const std::string& id, const RunConfig& cfg) {
  using namespace stoch;
  if (id == "mvp-stochastic") {
    PerturbedMvpParams p;
    p.base = harmonic::HarmonicFn::linear(0.2, Vec(0.5, 0, 0));
    p.kernel = parse_kernel(cfg);
    p.lambda = cfg.lambda;
    p.resolution = resolution_or(cfg, 10);
    p.n_samples = samples_or(cfg, 100000);
    p.seed = cfg.seed;
    return perturbed_mvp(p);
  }
  if (id == "harnack-stochastic") {
    StochasticHarnackParams p;
    p.kernel = parse_kernel(cfg);
    p.lambda = cfg.lambda;
    p.P = cfg.P;
    p.n_samples = samples_or(cfg, 100000);
    p.seed = cfg.seed;
    return stochastic_harnack(p);
  }
  if (id == "cacciopolli-stochastic") {
    StochasticCacciopolliParams p;
    p.kernel = grf::CovKernel::gaussian(cfg.alpha, std::max(cfg.xi, 1.5));
    p.lambda = cfg.lambda;
    p.n_samples = samples_or(cfg, 400);
    p.seed = cfg.seed;
    return stochastic_cacciopolli(p);
  }
  if (id == "riesz-moments") {
    StochasticRieszParams p;
    p.spec = potentials::RieszSpec::uniform_ball(cfg.R, cfg.rho, resolution_or(cfg, 12));
    p.kernel = parse_kernel(cfg);
    p.lambda = cfg.lambda;
    p.P = cfg.P;
    p.n_samples = samples_or(cfg, 50000);
    p.seed = cfg.seed;
    return stochastic_riesz_moments(p);
  }
  if (id == "noisy-disc") {
    NoisyBoundaryDiscParams p;
    p.g = harmonic::circle_preset(cfg.g);
    p.R = cfg.R;
    p.lambda = cfg.lambda;
    p.alpha = cfg.alpha;
    p.eta = cfg.eta;
    p.r = cfg.r;
    p.theta = cfg.theta;
    p.P = cfg.P % 2 == 0 ? cfg.P : cfg.P + 1;
    p.n_boundary = resolution_or(cfg, 128) * 4;
    p.n_samples = samples_or(cfg, 50000);
    p.seed = cfg.seed;
    return noisy_boundary_disc(p);
  }
  if (id == "noisy-ball") {
    NoisyBoundaryBallParams p;
    p.g = harmonic::sphere_preset("zdir", cfg.R);
    p.R = cfg.R;
    p.lambda = cfg.lambda;
    p.alpha = cfg.alpha;
    p.eta = cfg.eta;
    p.resolution = resolution_or(cfg, 24);
    p.n_samples = samples_or(cfg, 50000);
    p.seed = cfg.seed;
    return noisy_boundary_ball(p);
  }
  if (id == "sadei") {
    SadeiParams p;
    p.kernel = grf::CovKernel::gaussian(cfg.alpha, std::max(cfg.xi, 1.0));
    p.lambda = cfg.lambda;
    p.resolution = resolution_or(cfg, 8);
    p.n_samples = samples_or(cfg, 10000);
    p.seed = cfg.seed;
    return sadei(p);
  }
  if (id == "bochner-stochastic") {
    StochasticBochnerParams p;
    p.kernel = grf::CovKernel::gaussian(cfg.alpha, std::max(cfg.xi, 0.5));
    p.lambda = cfg.lambda;
    p.n_samples = samples_or(cfg, 30000);
    p.seed = cfg.seed;
    return stochastic_bochner(p);
  }
  if (id == "turbulence") {
    TurbulenceParams p;
    p.kernel = grf::CovKernel::gaussian(cfg.alpha, 0.3);
    p.lambda = cfg.lambda;
    p.n_samples = samples_or(cfg, 100000);
    p.seed = cfg.seed;
    return turbulent_flow_stats(p);
  }
  if (id == "line-integral") {
    LineIntegralParams p;
    p.kernel = grf::CovKernel::gaussian(cfg.alpha, std::max(cfg.xi, 0.3));
    p.lambda = cfg.lambda;
    p.n_samples = samples_or(cfg, 20000);
    p.seed = cfg.seed;
    return stochastic_line_integral(p);
  }
  if (id == "newton-density") {
    NoisyNewtonParams p;
    p.R = cfg.R;
    p.rho = cfg.rho;
    p.C = cfg.C;
    p.kernel = parse_kernel(cfg);
    p.lambda = cfg.lambda;
    p.P = cfg.P;
    p.resolution = resolution_or(cfg, 12);
    p.n_samples = samples_or(cfg, 50000);
    p.seed = cfg.seed;
    return noisy_density_newton(p);
  }
  if (id == "kolmogorov-kernels") {
    ReportSet rep;
    rep.id = "prop_a";
    struct Entry {
      const char* name;
      grf::CovKernel kernel;
      bool expected;
    };
    const Entry table[] = {
        {"exponential", grf::CovKernel::exponential(1.0, 1.0), true},
        {"gaussian", grf::CovKernel::gaussian(1.0, 1.0), true},
        {"power-law", grf::CovKernel::power_law(1.0, 1.0), false},
        {"white-noise", grf::CovKernel::white_noise(), false},
    };
    for (const auto& e : table) {
      const auto v = grf::kc_admissible(e.kernel);
      rep.add(MomentReport::exact_row(std::string("kc_admissible[") + e.name + "]",
                                      e.expected ? 1.0 : 0.0, v.admissible ? 1.0 : 0.0, 0.5));
    }
    return rep;
  }
  throw std::out_of_range("unknown theorem id: " + id);
}

int cmd_verify(const RunConfig& cfg) {
  const std::vector<std::string> all_ids = {
      "mvp-stochastic", "harnack-stochastic", "cacciopolli-stochastic", "riesz-moments",
      "noisy-disc",     "noisy-ball",         "sadei",                  "bochner-stochastic",
      "turbulence",     "line-integral",      "newton-density",         "kolmogorov-kernels"};
  std::vector<std::string> ids;
  if (cfg.theorem_id == "all")
    ids = all_ids;
  else
    ids.push_back(cfg.theorem_id);

  std::filesystem::create_directories(cfg.out);
  int failures = 0;
  for (const auto& id : ids) {
    ReportSet rep;
    try {
      rep = run_verify_one(id, cfg);
    } catch (const std::out_of_range& e) {
      std::cerr << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "verify " << id << " failed: " << e.what() << "\n";
      return 1;
    }
    const std::string ext = cfg.format == "json" ? ".json" : ".csv";
    const std::filesystem::path file = std::filesystem::path(cfg.out) / (rep.id + ext);
    std::ofstream os(file);
    if (cfg.format == "json")
      write_json(rep, os);
    else
      write_csv(rep, os);
    std::cout << id << " -> " << file.string() << " [" << (rep.all_passed() ? "PASS" : "FAIL")
              << "]\n";
    print_summary(rep, std::cout);
    failures += rep.fail_count();
  }
  return failures == 0 ? 0 : 1;
}

int cmd_solve(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.out);
  const std::filesystem::path file =
      std::filesystem::path(cfg.out) / ("solve_" + cfg.solver_kind + ".csv");
  std::ofstream os(file);
  if (cfg.solver_kind == "disc") {
    const auto g = harmonic::circle_preset(cfg.g);
    os << "r,theta,value\n";
    if (cfg.r >= cfg.R) {
      os << cfg.r << ',' << cfg.theta << ",out-of-domain\n";
      std::cerr << "point outside the disc\n";
      return 1;
    }
    const double v = harmonic::disc_poisson_eval(g, cfg.R, cfg.r, cfg.theta);
    os << cfg.r << ',' << cfg.theta << ',' << v << '\n';
    std::cout << "value = " << v << "\n";
    return 0;
  }
  if (cfg.solver_kind == "ball") {
    const auto g = harmonic::sphere_preset(cfg.g, cfg.R);
    const Vec x = parse_point(cfg.x);
    os << "x,y,z,value\n";
    if (x.norm() >= cfg.R) {
      os << cfg.x << ",out-of-domain\n";
      std::cerr << "point outside the ball\n";
      return 1;
    }
    const auto surf = geom::build_grid(geom::Domain::ball(3, cfg.R), geom::MeasureKind::Surface,
                                       resolution_or(cfg, 48));
    const double v = harmonic::ball_poisson_eval(g, x, cfg.R, Vec::Zero(), surf);
    os << x.x() << ',' << x.y() << ',' << x.z() << ',' << v << '\n';
    std::cout << "value = " << v << "\n";
    return 0;
  }
  if (cfg.solver_kind == "potential") {
    // dump psi along the ray from the origin through x
    const auto spec = potentials::RieszSpec::uniform_ball(cfg.R, cfg.rho, resolution_or(cfg, 20));
    const Vec xe = parse_point(cfg.x);
    if (xe.norm() == 0.0) {
      std::cerr << "ray direction undefined at the origin\n";
      return 1;
    }
    const int n_pts = 32;
    os << "x,y,z,psi\n";
    for (int i = 1; i <= n_pts; ++i) {
      const Vec q = xe * (static_cast<double>(i) / n_pts);
      os << q.x() << ',' << q.y() << ',' << q.z() << ','
         << cfg.C / (4.0 * 3.14159265358979323846) * potentials::riesz_potential(spec, q) << '\n';
    }
    std::cout << "wrote " << file.string() << "\n";
    return 0;
  }
  if (cfg.solver_kind == "wos") {
    const geom::Domain d = parse_domain(cfg.domain);
    const Vec x = parse_point(cfg.x);
    wos::WalkConfig wc;
    wc.seed = cfg.seed;
    wc.n_walkers = samples_or(cfg, 10000);
    std::function<double(const Vec&)> g;
    if (d.kind == geom::DomainKind::Disc) {
      const auto preset = harmonic::circle_preset(cfg.g);
      g = [preset](const Vec& s) { return preset.g(std::atan2(s.y(), s.x())); };
    } else {
      const auto preset = harmonic::sphere_preset(cfg.g, d.radius);
      g = preset.g;
    }
    os << "x,y,z,estimate,stderr,n_walkers,mean_steps\n";
    if (!d.contains(x)) {
      os << cfg.x << ",out-of-domain\n";
      std::cerr << "point outside the domain\n";
      return 1;
    }
    const auto r = wos::wos_laplace(d, g, x, wc);
    os << x.x() << ',' << x.y() << ',' << x.z() << ',' << r.estimate << ',' << r.stderr_ << ','
       << r.n_walkers << ',' << r.mean_steps << '\n';
    std::cout << "estimate = " << r.estimate << " +- " << r.stderr_ << "\n";
    return 0;
  }
  std::cerr << "unknown solver kind: " << cfg.solver_kind << "\n";
  return 2;
}

int cmd_sample(const RunConfig& cfg) {
  const grf::CovKernel kernel = parse_kernel(cfg);
  const auto verdict = grf::kc_admissible(kernel);
  if (!verdict.admissible) {
    std::cerr << "kernel rejected: " << verdict.reason << "\n";
    return 1;
  }
  const geom::Domain d = parse_domain(cfg.domain);
  const geom::MeasureKind mk =
      cfg.measure == "volume" ? geom::MeasureKind::Volume : geom::MeasureKind::Surface;
  auto grid =
      std::make_shared<geom::DomainGrid>(geom::build_grid(d, mk, resolution_or(cfg, 12)));
  grf::FieldSampler sampler(kernel, grid);
  grf::FieldSample s = sampler.sample(cfg.seed);
  s.values *= cfg.lambda;
  std::filesystem::create_directories(cfg.out);
  const std::filesystem::path file = std::filesystem::path(cfg.out) / "sample.csv";
  std::ofstream os(file);
  grf::write_csv(s, os);
  std::cout << "wrote " << file.string() << " (" << grid->size() << " nodes)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochpot: potential theory on noisy domains"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value configuration file");
    sub->add_option("--seed", cfg.seed, "master random seed");
    sub->add_option("--samples", cfg.samples, "Monte Carlo sample count");
    sub->add_option("--resolution", cfg.resolution, "grid resolution");
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_option("--format", cfg.format, "csv or json");
    sub->add_option("--lambda", cfg.lambda, "noise amplitude");
    sub->add_option("--alpha", cfg.alpha, "field variance");
    sub->add_option("--xi", cfg.xi, "correlation length");
    sub->add_option("--eta", cfg.eta, "boundary correlation length");
    sub->add_option("--kernel", cfg.kernel, "exponential|gaussian|power-law|white");
    sub->add_option("--g", cfg.g, "boundary preset (const:c, cos:m, sin:m, step, zdir)");
    sub->add_option("--domain", cfg.domain, "ball:R, disc:R, or cylinder:R");
    sub->add_option("--measure", cfg.measure, "volume or surface");
    sub->add_option("--r", cfg.r, "polar radius");
    sub->add_option("--theta", cfg.theta, "polar angle");
    sub->add_option("--x", cfg.x, "evaluation point x,y,z");
    sub->add_option("--P", cfg.P, "moment order");
    sub->add_option("--R", cfg.R, "domain radius");
    sub->add_option("--rho", cfg.rho, "density");
    sub->add_option("--C", cfg.C, "coupling constant");
    sub->add_option("--dump-config", cfg.dump_config, "write the effective config and proceed");
  };

  auto* verify = app.add_subcommand("verify", "run a theorem verification suite");
  verify->add_option("id", cfg.theorem_id, "theorem id or 'all'")->required();
  add_common(verify);

  auto* solve = app.add_subcommand("solve", "evaluate a Dirichlet solver");
  solve->add_option("kind", cfg.solver_kind, "disc, ball, or wos")->required();
  add_common(solve);

  auto* sample = app.add_subcommand("sample", "draw and dump one field realization");
  add_common(sample);

  CLI11_PARSE(app, argc, argv);

  CLI::App* active = nullptr;
  if (app.got_subcommand(verify)) active = verify;
  if (app.got_subcommand(solve)) active = solve;
  if (app.got_subcommand(sample)) active = sample;

  try {
    if (!config_path.empty() && active != nullptr) {
      std::map<std::string, std::string> kv;
      load_config_file(config_path, kv);
      apply_kv(kv, active, cfg);
    }
    if (!cfg.dump_config.empty()) dump_config(cfg, cfg.dump_config);

    if (active == verify) return cmd_verify(cfg);
    if (active == solve) return cmd_solve(cfg);
    if (active == sample) return cmd_sample(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
