#include "fracwave/commands.hpp"

#include <iostream>

#include "fracwave/error.hpp"
#include "fracwave/experiments.hpp"
#include "fracwave/fields.hpp"
#include "fracwave/io.hpp"
#include "fracwave/rng.hpp"
#include "fracwave/sht.hpp"
#include "fracwave/validate.hpp"

#ifndef FRACWAVE_VERSION
#define FRACWAVE_VERSION "unknown"
#endif

namespace fracwave::commands {

namespace {

using Json = nlohmann::ordered_json;

Json warnings(const config::RunConfig& cfg) {
  Json w = Json::array();
  for (const auto& [name, spec] : {std::pair{"initial", cfg.cspec()}, std::pair{"noise", cfg.aspec()}}) {
    const std::string msg = spec.decay_warning();
    if (!msg.empty()) {
      std::cerr << "warning: " << name << " " << msg << "\n";
      w.push_back(std::string(name) + " " + msg);
    }
  }
  return w;
}

void write_sidecar(const config::RunConfig& cfg, const std::string& stem, Json body) {
  Json out = provenance(cfg);
  for (auto it = body.begin(); it != body.end(); ++it) out[it.key()] = it.value();
  io::write_file(io::join_path(cfg.out_dir, stem + ".meta.json"), out.dump(2) + "\n");
}

std::string stamp(const config::RunConfig& cfg) {
  return std::string("config_hash=") + cfg.hash() + " version=" + FRACWAVE_VERSION;
}

}  // namespace

Json provenance(const config::RunConfig& cfg) {
  Json j;
  j["version"] = FRACWAVE_VERSION;
  j["config_hash"] = cfg.hash();
  Json rec = Json::object();
  const std::string canon = cfg.canonical();
  std::size_t pos = 0;
  while (pos < canon.size()) {
    const std::size_t nl = canon.find('\n', pos);
    const std::string line = canon.substr(pos, nl - pos);
    const std::size_t eq = line.find(" = ");
    rec[line.substr(0, eq)] = line.substr(eq + 3);
    pos = nl + 1;
  }
  j["config"] = rec;
  return j;
}

int cmd_simulate(const config::RunConfig& cfg) {
  const auto p = cfg.params();
  const auto cs = cfg.cspec();
  const auto as = cfg.aspec();
  const Json warn = warnings(cfg);
  io::ensure_dir(cfg.out_dir);
  const RngStream rng(cfg.seed);
  const fields::SpectralTable tab = fields::make_table(p, cfg.L, cfg.t);
  const fields::SolutionSnapshot snap = fields::sample_snapshot(tab, cs, as, rng, 0, cfg.convention());
  io::write_file(io::join_path(cfg.out_dir, "snapshot.csv"), fields::snapshot_csv(snap));
  write_sidecar(cfg, "snapshot",
                Json{{"kind", "snapshot"},
                     {"columns", {"ell", "m", "hom", "inhom", "combined"}},
                     {"params", experiments::params_json(p)},
                     {"cspec", experiments::spectrum_json(cs)},
                     {"aspec", experiments::spectrum_json(as)},
                     {"seed", cfg.seed},
                     {"t", cfg.t},
                     {"L", cfg.L},
                     {"realization", 0},
                     {"warnings", warn}});

  const sht::SphereGrid grid = sht::make_grid(cfg.grid_degree());
  const std::pair<const char*, const sht::HarmonicCoeffs*> parts[] = {
      {"hom", &snap.hom}, {"inhom", &snap.inhom}, {"combined", &snap.combined}};
  for (const auto& [name, coeffs] : parts) {
    const sht::FieldMap map = sht::synthesize(*coeffs, grid);
    const std::string stem = std::string("map_") + name;
    sht::write_map_csv(map, io::join_path(cfg.out_dir, stem + ".csv"));
    sht::write_map_pgm(map, io::join_path(cfg.out_dir, stem + ".pgm"), stamp(cfg));
    write_sidecar(cfg, stem,
                  Json{{"kind", "map"},
                       {"component", name},
                       {"columns", {"theta", "phi", "value"}},
                       {"n_theta", grid.n_theta},
                       {"n_phi", grid.n_phi},
                       {"mean_square", sht::grid_mean_square(map)},
                       {"raster", stem + ".pgm"}});
  }
  return kOk;
}

int cmd_spectrum(const config::RunConfig& cfg) {
  const auto p = cfg.params();
  const auto cs = cfg.cspec();
  const auto as = cfg.aspec();
  const Json warn = warnings(cfg);
  io::ensure_dir(cfg.out_dir);
  const int n = cfg.ell_max - cfg.ell_min + 1;
  std::vector<double> f(n), s2(n);
  const bool noise = cfg.t > p.tau;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    const int l = cfg.ell_min + i;
    f[i] = spectral::f_coeff(p, l, cfg.t);
    s2[i] = noise ? spectral::sigma2(p, l, cfg.t - p.tau) : 0.0;
  }
  std::string out = "ell,lambda,regime,F,sigma2,C_term,A_term\n";
  for (int i = 0; i < n; ++i) {
    const int l = cfg.ell_min + i;
    const spectral::BranchData br = spectral::branch(p, l);
    out += std::to_string(l) + "," + io::format_double(br.lambda) + "," + spectral::regime_name(br.regime) +
           "," + io::format_double(f[i]) + "," + io::format_double(s2[i]) + "," +
           io::format_double(cs.value(l) * f[i] * f[i]) + "," + io::format_double(as.value(l) * s2[i]) + "\n";
  }
  io::write_file(io::join_path(cfg.out_dir, "spectrum.csv"), out);
  write_sidecar(cfg, "spectrum",
                Json{{"kind", "spectrum"},
                     {"columns", {"ell", "lambda", "regime", "F", "sigma2", "C_term", "A_term"}},
                     {"params", experiments::params_json(p)},
                     {"cspec", experiments::spectrum_json(cs)},
                     {"aspec", experiments::spectrum_json(as)},
                     {"t", cfg.t},
                     {"noise_time", noise ? cfg.t - p.tau : 0.0},
                     {"warnings", warn}});
  return kOk;
}

int cmd_errors(const config::RunConfig& cfg) {
  const auto p = cfg.params();
  const Json warn = warnings(cfg);
  io::ensure_dir(cfg.out_dir);
  const RngStream rng(cfg.seed);
  experiments::StudyTable full = experiments::truncation_error_study(
      p, cfg.cspec(), cfg.aspec(), cfg.L_list, cfg.L_ref, cfg.t, cfg.n_realizations, rng, cfg.convention());
  Json extra = provenance(cfg);
  extra["warnings"] = warn;
  full.write(cfg.out_dir, extra);

  experiments::StudyTable hom = experiments::truncation_error_study(
      p, cfg.cspec(), PowerSpectrum{0.0, 0.0, cfg.kappa2}, cfg.L_list, cfg.L_ref, cfg.t, cfg.n_realizations,
      rng, cfg.convention());
  hom.name = "truncation_error_hom";
  hom.write(cfg.out_dir, extra);
  return kOk;
}

int cmd_hoelder(const config::RunConfig& cfg) {
  const Json warn = warnings(cfg);
  io::ensure_dir(cfg.out_dir);
  const RngStream rng(cfg.seed);
  experiments::StudyTable tbl = experiments::hoelder_study(cfg.params(), cfg.cspec(), cfg.aspec(), cfg.L,
                                                           cfg.t, cfg.n_realizations, cfg.step, rng,
                                                           cfg.beta_star, cfg.convention());
  Json extra = provenance(cfg);
  extra["warnings"] = warn;
  tbl.write(cfg.out_dir, extra);
  return kOk;
}

int cmd_validate(const config::RunConfig& cfg) {
  io::ensure_dir(cfg.out_dir);
  const validate::Report rep = validate::run_suite(cfg.params());
  Json out = provenance(cfg);
  const Json body = validate::report_json(rep);
  for (auto it = body.begin(); it != body.end(); ++it) out[it.key()] = it.value();
  io::write_file(io::join_path(cfg.out_dir, "validation.json"), out.dump(2) + "\n");
  for (const validate::Check& c : rep.checks) {
    std::cout << (c.passed ? "ok    " : "FAIL  ") << c.name << "  " << io::format_double(c.value)
              << " <= " << io::format_double(c.tolerance) << "\n";
  }
  if (!rep.ok) {
    std::cerr << "validation failed at " << rep.failed << "\n";
    return kValidationFailure;
  }
  return kOk;
}

int run(const std::string& command, const config::RunConfig& cfg) {
  try {
    cfg.validate();
    if (command == "simulate") return cmd_simulate(cfg);
    if (command == "spectrum") return cmd_spectrum(cfg);
    if (command == "errors") return cmd_errors(cfg);
    if (command == "hoelder") return cmd_hoelder(cfg);
    if (command == "validate") return cmd_validate(cfg);
    std::cerr << "error: unknown command " << command << "\n";
    return kConfigError;
  } catch (const config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kConfigError;
  } catch (const AccuracyError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  }
}

}  // namespace fracwave::commands
