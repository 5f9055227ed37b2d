#include "qresponse/cli/runner.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <numbers>

#include "qresponse/bath.hpp"
#include "qresponse/berry.hpp"
#include "qresponse/cli/config.hpp"
#include "qresponse/cli/svg.hpp"
#include "qresponse/cli/table.hpp"
#include "qresponse/eig3.hpp"
#include "qresponse/inversion.hpp"
#include "qresponse/propagator.hpp"

namespace qresponse::cli {

namespace {

struct Outputs {
  ResultTable table;
  std::vector<std::pair<std::string, std::string>> summary;
};

Outputs run_eig(const Config& cfg) {
  Outputs out;
  const NvParams p{cfg.get_double("model.d"), cfg.get_double("model.e", 0.0)};
  const std::string mode = cfg.get_string("model.mode", "spherical");
  if (mode == "cartesian") {
    const FieldVector h{cfg.get_double("field.hx"), cfg.get_double("field.hy"),
                        cfg.get_double("field.hz")};
    const EigenSystem sys = eig3_exact(hamiltonian_cartesian(p, h));
    out.table.columns = {"hx", "hy", "hz", "e1", "e2", "e3", "min_gap"};
    out.table.rows.push_back({h.hx, h.hy, h.hz, sys.values(0), sys.values(1),
                              sys.values(2),
                              std::min(sys.values(1) - sys.values(0),
                                       sys.values(2) - sys.values(1))});
  } else if (mode == "spherical") {
    const double phi = cfg.get_double("grid.phi", 0.0);
    out.table.columns = {"theta", "e1", "e2", "e3"};
    for (double theta : cfg.get_grid("grid.theta")) {
      const EigenSystem sys = eig3_exact(hamiltonian_spherical(p, theta, phi));
      out.table.rows.push_back({theta, sys.values(0), sys.values(1), sys.values(2)});
    }
  } else {
    throw ConfigError("eig: model.mode must be cartesian or spherical");
  }
  return out;
}

Outputs run_berry(const Config& cfg) {
  Outputs out;
  const NvParams p{cfg.get_double("model.d"), cfg.get_double("model.e", 0.0)};
  const std::string mode = cfg.get_string("model.mode", "spherical");
  const int band = cfg.get_int("model.band", 0);
  if (mode == "spherical") {
    if (p.e != 0.0) throw ConfigError("berry: spherical mode requires model.e = 0");
    const HamiltonianFamily fam = spherical_family(p.d);
    out.table.columns = {"theta", "f_analytic", "f_numeric", "f_fd"};
    for (double theta : cfg.get_grid("grid.theta")) {
      const double analytic = curvature_spherical_analytic(p.d, theta, band).f_phitheta;
      const double numeric = curvature_numeric(fam, {theta, 0.0}, 1, 0, band);
      const Complex chi =
          geometric_tensor_fd(eigenstate_family(fam, band), {theta, 0.0}, 1, 0);
      out.table.rows.push_back({theta, analytic, numeric, -2.0 * chi.imag()});
    }
  } else if (mode == "cartesian") {
    const FieldVector h{cfg.get_double("field.hx"), cfg.get_double("field.hy"),
                        cfg.get_double("field.hz")};
    const CurvatureCartesian analytic = curvature_cartesian_analytic(p, h, band);
    const HamiltonianFamily fam = cartesian_field_family(p);
    const std::vector<double> at{h.hx, h.hy, h.hz};
    out.table.columns = {"f_xy",         "f_xz",         "f_yz",
                         "f_xy_numeric", "f_xz_numeric", "f_yz_numeric"};
    out.table.rows.push_back({analytic.f_xy, analytic.f_xz, analytic.f_yz,
                              curvature_numeric(fam, at, 0, 1, band),
                              curvature_numeric(fam, at, 0, 2, band),
                              curvature_numeric(fam, at, 1, 2, band)});
  } else {
    throw ConfigError("berry: model.mode must be cartesian or spherical");
  }
  return out;
}

Outputs run_quench(const Config& cfg, int threads) {
  Outputs out;
  const double d = cfg.get_double("model.d");
  const std::vector<double> v_grid = cfg.get_grid("protocol.v_grid");
  const double tol = cfg.get_double("protocol.tol", 1e-8);
  const double reference = quench_reference_value(d);
  const auto results = response_sweep(d, v_grid, tol, threads);
  out.table.columns = {"v", "S_y", "F_retrieved", "F_analytic", "fidelity"};
  for (const auto& r : results) {
    out.table.rows.push_back(
        {r.v, r.observable_value, r.retrieved_curvature, reference, r.adiabatic_fidelity});
  }
  out.summary.emplace_back("F_analytic", format_double(reference));
  return out;
}

Outputs run_bath(const Config& cfg, int threads) {
  Outputs out;
  const double d = cfg.get_double("model.d");
  const int n = cfg.get_int("bath.n", 0);
  const double a = cfg.get_double("bath.a");
  const std::vector<double> p_list = cfg.get_grid("bath.p_list");
  const std::vector<double> v_grid = cfg.get_grid("protocol.v_grid");
  const double tol = cfg.get_double("protocol.tol", 1e-4);
  const double reference = quench_reference_value(d);

  const auto per_p = decoherence_sweep_multi(n, a, p_list, d, v_grid, tol, threads);
  out.table.columns = {"v", "P", "S_y", "F_retrieved", "F_analytic", "abs_error"};
  for (std::size_t pi = 0; pi < p_list.size(); ++pi) {
    for (const auto& r : per_p[pi]) {
      out.table.rows.push_back({r.v, r.p, r.observable_value, r.retrieved_curvature,
                                reference,
                                std::abs(r.retrieved_curvature - reference)});
    }
    out.summary.emplace_back("skipped_weight_P" + format_double(p_list[pi]),
                             format_double(per_p[pi].front().skipped_weight));
  }
  out.summary.emplace_back("F_analytic", format_double(reference));
  return out;
}

Outputs run_invert(const Config& cfg, int /*threads*/) {
  Outputs out;
  EnsembleConfig ens;
  ens.d = {cfg.get_double("model.d"), cfg.get_double("model.e", 0.0)};
  ens.hy = cfg.get_double("scenario.hy");
  ens.hz = cfg.get_grid("scenario.hz_list");
  ens.hy_known = cfg.get_bool("scenario.hy_known", true);
  const double hx_true = cfg.get_double("scenario.hx_true");
  const double vx_true = cfg.get_double("scenario.vx_true");
  const std::string mode = cfg.get_string("scenario.mode", "dynamics");
  const std::string ramp_kind = cfg.get_string("scenario.ramp", "smooth");
  const double tol = cfg.get_double("scenario.tol", 1e-7);

  std::vector<double> measured;
  if (mode == "analytic") {
    for (double hz : ens.hz) {
      measured.push_back(
          vx_true *
          curvature_cartesian_analytic(ens.d, {hx_true, ens.hy, hz}, 0).f_xz);
    }
  } else if (mode == "dynamics") {
    const RampPath ramp = ramp_kind == "cubic" ? cubic_ramp(hx_true, vx_true)
                                               : smooth_ramp(hx_true, vx_true);
    measured = forward_observables(ens, ramp.path, ramp.t_final, tol);
    for (std::size_t i = 0; i < measured.size(); ++i) {
      measured[i] -= static_observable(ens, i, hx_true);
    }
  } else {
    throw ConfigError("invert: scenario.mode must be dynamics or analytic");
  }

  MotionEstimate est;
  if (ens.hz.size() == 2 && ens.hy_known) {
    est = solve_motion(measured, ens);
  } else if (ens.hz.size() == 3 && !ens.hy_known) {
    est = solve_vector(measured, ens);
  } else {
    throw ConfigError(
        "invert: need two ensembles with hy_known or three with hy unknown");
  }

  out.table.columns = {"truth", "estimate", "abs_error"};
  out.table.rows.push_back({hx_true, est.hx_hat, std::abs(est.hx_hat - hx_true)});
  out.table.rows.push_back({vx_true, est.vx_hat, std::abs(est.vx_hat - vx_true)});
  out.summary.emplace_back("row_order", "hx, vx" + std::string(est.hy_hat ? ", hy" : ""));
  if (est.hy_hat) {
    const double hy_true = ens.hy;
    out.table.rows.push_back({hy_true, *est.hy_hat, std::abs(*est.hy_hat - hy_true)});
  }
  out.summary.emplace_back("residual", format_double(est.residual));
  out.summary.emplace_back("iterations", std::to_string(est.iterations));
  return out;
}

Outputs run_bound(const Config& cfg) {
  Outputs out;
  const std::string op_name = cfg.get_string("bound.operator");
  const SpinOperators s = spin_operators(1.0);
  ComplexMatrix op;
  if (op_name == "sz2") {
    op = s.sz * s.sz;
  } else if (op_name == "sz") {
    op = s.sz;
  } else if (op_name == "sx") {
    op = s.sx;
  } else if (op_name == "sy") {
    op = s.sy;
  } else {
    throw ConfigError("bound: operator must be one of sz2, sz, sx, sy");
  }
  const EigenSystem sys = eig3_exact(op);
  const double seminorm = sys.values(2) - sys.values(0);
  out.table.columns = {"t", "seminorm", "bound"};
  for (double t : cfg.get_grid("bound.t_grid")) {
    out.table.rows.push_back({t, seminorm, sensitivity_bound(op, t)});
  }
  return out;
}

Outputs run_sweep(const Config& cfg) {
  Outputs out;
  const double d = cfg.get_double("model.d");
  const double step = cfg.get_double("sweep.step", 1e-5);
  out.table.columns = {"theta", "F_ground", "dF_dD"};
  for (double theta : cfg.get_grid("grid.theta")) {
    out.table.rows.push_back(
        {theta, curvature_spherical_analytic(d, theta, 0).f_phitheta,
         susceptibility(d, theta, step)});
  }
  return out;
}

}  // namespace

int run_experiment(const std::string& kind, const std::string& config_path,
                   const std::string& out_dir, int threads) {
  const auto t_start = std::chrono::steady_clock::now();
  Config cfg;
  Outputs outputs;
  try {
    cfg = Config::parse_file(config_path);
    const std::string declared = cfg.get_string("kind", kind);
    if (declared != kind) {
      throw ConfigError("config kind '" + declared + "' does not match subcommand '" + kind + "'");
    }
    // output keys are shared by all kinds
    const std::string csv_name = cfg.get_string("output.csv", kind + ".csv");
    const std::string summary_name =
        cfg.get_string("output.summary", kind + "_summary.txt");
    const bool want_svg = cfg.get_bool("output.svg", false);
    const std::string svg_name = cfg.get_string("output.svg_file", kind + ".svg");

    if (kind == "eig") {
      outputs = run_eig(cfg);
    } else if (kind == "berry") {
      outputs = run_berry(cfg);
    } else if (kind == "quench") {
      outputs = run_quench(cfg, threads);
    } else if (kind == "bath") {
      outputs = run_bath(cfg, threads);
    } else if (kind == "invert") {
      outputs = run_invert(cfg, threads);
    } else if (kind == "bound") {
      outputs = run_bound(cfg);
    } else if (kind == "sweep") {
      outputs = run_sweep(cfg);
    } else {
      throw ConfigError("unknown experiment kind: " + kind);
    }
    cfg.require_all_consumed();

    outputs.table.config_echo.emplace_back("kind", kind);
    for (const auto& [key, value] : cfg.entries()) {
      if (key != "kind") outputs.table.config_echo.emplace_back(key, value);
    }

    const double wall_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    std::vector<std::pair<std::string, std::string>> summary;
    summary.emplace_back("kind", kind);
    summary.emplace_back("version", kVersion);
    summary.emplace_back("rows", std::to_string(outputs.table.rows.size()));
    for (const auto& kv : outputs.summary) summary.push_back(kv);
    summary.emplace_back("threads", std::to_string(threads));
    summary.emplace_back("wall_time_s", format_double(wall_s));

    const std::string prefix = out_dir.empty() ? "" : out_dir + "/";
    write_csv(outputs.table, prefix + csv_name);
    write_summary(summary, prefix + summary_name);
    if (want_svg) write_line_chart(outputs.table, prefix + svg_name);
    std::cout << "wrote " << prefix + csv_name << "\n";
    return kExitOk;
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const std::ios_base::failure& err) {
    std::cerr << "io error: " << err.what() << "\n";
    return kExitIo;
  } catch (const std::exception& err) {
    std::cerr << "numeric error: " << err.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace qresponse::cli
