#pragma once

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <glance/glance.hpp>

#include "run_config.hpp"
#include "selftest.hpp"

namespace glance::cli {

enum ExitCode { ok = 0, domain_failure = 1, property_failure = 2, usage_failure = 3 };

namespace detail {

inline std::string path_in(const RunConfig& c, const std::string& name) {
  return (std::filesystem::path(c.out) / name).string();
}

inline unsigned resolve_threads(const RunConfig& c) {
  if (c.threads > 0) return unsigned(c.threads);
  if (const char* e = std::getenv("GLANCE_THREADS")) {
    try {
      int v = std::stoi(e);
      if (v > 0) return unsigned(v);
    } catch (const std::exception&) {
    }
    throw config_error("GLANCE_THREADS must be a positive integer");
  }
  return 0;
}

inline ModelParams params_of(const RunConfig& c) { return make_params(c.n, c.lambda, parse_mode(c.mode), c.delta2); }

inline SynthesisSpec synthesis_spec(const RunConfig& c, std::vector<double> rows) {
  SynthesisSpec s;
  s.grid = YGrid{std::size_t(c.points), c.extent};
  s.x_rows = std::move(rows);
  s.epsilon = c.epsilon;
  s.tol = c.synthesis_tol;
  s.threads = resolve_threads(c);
  return s;
}

inline std::vector<ProfileSign> flow_signs(const std::string& s) {
  if (s == "plus") return {ProfileSign::plus};
  if (s == "minus") return {ProfileSign::minus};
  return {ProfileSign::plus, ProfileSign::minus};
}

inline const char* sign_name(ProfileSign s) { return s == ProfileSign::plus ? "plus" : "minus"; }

inline int cmd_spectral(const RunConfig& c, std::ostream& out) {
  auto P = params_of(c);
  std::vector<double> tp(c.theta.begin(), c.theta.end() - 1);
  Covector th(tp, c.theta.back());
  double dx = c.xmax / double(c.nx);
  std::vector<double> grid;
  for (int i = 1; i <= c.nx; ++i) grid.push_back(dx * i);
  auto sol = solve_spectral(P, th, c.xmax, c.spectral_tol, grid);
  io::CsvWriter csv(path_in(c, "spectral.csv"), {"x", "re", "im"});
  io::GridFile g;
  g.nx = sol.x_grid.size();
  g.ny = 1;
  g.x0 = dx;
  g.dx = dx;
  g.is_complex = true;
  for (std::size_t i = 0; i < sol.x_grid.size(); ++i) {
    csv.row(std::vector<double>{sol.x_grid[i], sol.values[i].real(), sol.values[i].imag()});
    g.data.push_back(sol.values[i].real());
    g.data.push_back(sol.values[i].imag());
  }
  io::write_grid(path_in(c, "spectral.glnc"), g);
  out << "spectral: " << sol.x_grid.size() << " points, b_over_a=" << io::fmt(sol.b_over_a.real()) << ","
      << io::fmt(sol.b_over_a.imag()) << "\n";
  return ok;
}

inline std::vector<double> rows_with(std::vector<double> rows, double x) {
  for (double r : rows)
    if (std::fabs(r - x) <= 1e-12 * std::max(1.0, x)) return rows;
  rows.push_back(x);
  std::sort(rows.begin(), rows.end());
  return rows;
}

inline int cmd_synthesize(const RunConfig& c, std::ostream& out) {
  auto P = params_of(c);
  auto F = synthesize_field(P, synthesis_spec(c, rows_with(c.x_rows, c.row_x)));
  io::write_grid(path_in(c, "field.glnc"), io::plane_grid(F, F.row_index(c.row_x)));
  io::CsvWriter csv(path_in(c, "field_slice.csv"), {"x", "y_n", "re", "im"});
  std::size_t mid = F.grid.points / 2;
  for (std::size_t r = 0; r < F.x.size(); ++r)
    for (std::size_t j = 0; j < F.grid.points; ++j) {
      auto v = F.at(r, mid, j);
      csv.row(std::vector<double>{F.x[r], F.grid.y(j), v.real(), v.imag()});
    }
  out << "synthesize: " << F.x.size() << " rows, epsilon=" << io::fmt(F.epsilon)
      << ", pole_columns=" << F.pole_columns.size() << ", skipped_columns=" << F.skipped_columns << "\n";
  return ok;
}

inline int cmd_wavefront(const RunConfig& c, std::ostream& out) {
  auto P = params_of(c);
  if (!(c.row_x > 0.0)) throw domain_error("wavefront: row_x must be positive");
  auto F = synthesize_field(P, synthesis_spec(c, {c.row_x}));
  WindowSpec ws;
  ws.cell = std::size_t(c.cell);
  ws.window = std::size_t(c.window);
  auto curve = predict_singular_support(P, c.row_x);
  auto rep = wavefront_scan(F, 0, ws, {}, curve.points);
  io::CsvWriter csv(path_in(c, "wavefront.csv"), {"y_prime", "y_n", "class", "slope", "shadow"});
  for (std::size_t ci = 0; ci < rep.cells_p; ++ci)
    for (std::size_t cj = 0; cj < rep.cells_n; ++cj) {
      std::size_t k = ci * rep.cells_n + cj;
      auto ctr = rep.center(ci, cj, F.grid, ws.cell);
      csv.row({io::fmt(ctr[0]), io::fmt(ctr[1]), io::class_name(rep.cls[k]), io::fmt(rep.slope[k]),
               rep.shadow[k] ? "1" : "0"});
    }
  io::write_wavefront_svg(path_in(c, "wavefront.svg"), rep, F.grid);
  out << "wavefront: singular=" << rep.singular_cells << " shadow_cells=" << rep.shadow_cells
      << " shadow_singular=" << rep.shadow_singular << " match_max=" << io::fmt(rep.match_max)
      << " match_mean=" << io::fmt(rep.match_mean) << "\n";
  if (rep.shadow_singular > 0) throw property_violation("wavefront: singular cells in the deep shadow");
  return ok;
}

inline int cmd_shadow_fit(const RunConfig& c, std::ostream& out) {
  auto P = params_of(c);
  auto F = synthesize_field(P, synthesis_spec(c, c.x_rows));
  auto fit = shadow_exponent_fit(F, c.beta);
  io::CsvWriter csv(path_in(c, "shadow_fit.csv"), {"y_prime", "y_n", "exponent"});
  for (std::size_t k = 0; k < fit.column_exponent.size(); ++k)
    csv.row(std::vector<double>{fit.column_y[k][0], fit.column_y[k][1], fit.column_exponent[k]});
  out << "s_plus_fit=" << io::fmt(fit.exponent) << "\n";
  out << "columns=" << fit.column_exponent.size() << " excluded=" << fit.excluded << " s_plus=" << io::fmt(P.s_plus)
      << "\n";
  if (std::fabs(fit.exponent - P.s_plus) > 0.1) throw property_violation("shadow-fit: exponent differs from s_plus");
  return ok;
}

inline int cmd_flow(const RunConfig& c, std::ostream& out) {
  io::CsvWriter summary(path_in(c, "flow.csv"), {"sign", "start", "sigma0", "xi0", "escape_time", "energy_drift"});
  io::CsvWriter traj(path_in(c, "flow_trajectories.csv"), {"sign", "start", "t", "sigma", "xi", "energy"});
  std::size_t trapped = 0;
  const std::size_t stride = std::max<std::size_t>(1, std::size_t(std::lround(0.05 / c.dt)));
  for (auto sg : flow_signs(c.sign)) {
    ExtendedProfile v(sg);
    auto starts = characteristic_starts(v, std::size_t(c.starts));
    auto rep = escape_times(v, starts, c.radius, c.t_max, c.dt);
    for (std::size_t k = 0; k < starts.size(); ++k) {
      summary.row({sign_name(sg), std::to_string(k), io::fmt(starts[k].sigma), io::fmt(starts[k].xi),
                   io::fmt(rep.escape_times[k]), io::fmt(rep.energy_drift[k])});
      auto tr = profile_flow(v, starts[k], c.radius, c.t_max, c.dt);
      for (std::size_t i = 0; i < tr.t.size(); i += stride)
        traj.row({sign_name(sg), std::to_string(k), io::fmt(tr.t[i]), io::fmt(tr.sigma[i]), io::fmt(tr.xi[i]),
                  io::fmt(tr.energy[i])});
    }
    trapped += starts.size() - rep.escaped;
    out << "flow " << sign_name(sg) << ": escaped " << rep.escaped << "/" << starts.size()
        << " max_energy_drift=" << io::fmt(rep.max_energy_drift) << "\n";
  }
  if (trapped) throw property_violation("flow: " + std::to_string(trapped) + " trapped trajectories");
  return ok;
}

inline int cmd_resolvent(const RunConfig& c, std::ostream& out) {
  OperatorGrid g;
  g.points = std::size_t(c.grid_points);
  auto sg = c.resolvent_sign == "minus" ? ProfileSign::minus : ProfileSign::plus;
  auto r = resolvent_norm_scan(c.h, c.resolvent_epsilon, sg, g);
  io::CsvWriter csv(path_in(c, "resolvent.csv"), {"h", "norm", "iterations", "points"});
  for (std::size_t k = 0; k < r.h.size(); ++k)
    csv.row({io::fmt(r.h[k]), io::fmt(r.norm[k]), std::to_string(r.iterations[k]), std::to_string(r.points[k])});
  out << "resolvent exponent=" << io::fmt(r.exponent) << " r2=" << io::fmt(r.r2) << "\n";
  return ok;
}

inline int cmd_transport(const RunConfig& c, std::ostream& out) {
  auto P = params_of(c);
  auto tp = transport_params(P);
  auto terms = wkb_hierarchy(c.terms, tp);
  std::vector<std::string> head{"sigma"};
  for (auto& t : terms) {
    head.push_back("re_u" + std::to_string(t.j));
    head.push_back("im_u" + std::to_string(t.j));
  }
  io::CsvWriter csv(path_in(c, "transport.csv"), head);
  for (std::size_t i = 0; i < terms[0].sigma.size(); ++i) {
    std::vector<double> row{terms[0].sigma[i]};
    for (auto& t : terms) row.push_back(t.u[i].real()), row.push_back(t.u[i].imag());
    csv.row(row);
  }
  for (auto& t : terms)
    out << "tail_exponent_" << t.j << "=" << io::fmt(tail_exponent(t).slope) << " expected=" << io::fmt(-0.5 - t.j)
        << "\n";
  return ok;
}

inline int cmd_selftest(std::ostream& out) {
  auto res = run_selftest();
  std::size_t fails = 0;
  for (auto& r : res) {
    out << (r.pass ? "ok   " : "FAIL ") << r.name;
    if (!r.detail.empty()) out << " (" << r.detail << ")";
    out << "\n";
    if (!r.pass) ++fails;
  }
  out << res.size() - fails << "/" << res.size() << " checks passed\n";
  return fails ? property_failure : ok;
}

// --config may appear anywhere; it is applied before the flags so flags win
inline std::string find_config(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw config_error("--config needs a path");
      return args[i + 1];
    }
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"glance: diffractive AdS model laboratory"};
  app.set_help_all_flag("--help-all");
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "sectioned key = value run configuration");
  app.add_option("--out", c.out, "output directory");
  app.add_option("--threads", c.threads, "worker threads (0: GLANCE_THREADS or all cores)");
  app.add_option("--mode", c.mode, "ads | friedlander");
  app.add_option("--n", c.n, "boundary dimension");
  app.add_option("--lambda", c.lambda, "spectral parameter");
  app.add_option("--delta2", c.delta2, "region cutoff threshold");
  std::string write_config;
  app.add_option("--dump-config", write_config, "write the resolved configuration to this path");
  app.fallthrough();

  auto* spectral = app.add_subcommand("spectral", "solve the spectral ODE for one covector");
  spectral->add_option("--theta", c.theta, "theta' components then theta_n")->delimiter(',');
  spectral->add_option("--xmax", c.xmax, "outer boundary");
  spectral->add_option("--nx", c.nx, "uniform output points");
  spectral->add_option("--tol", c.spectral_tol, "solver tolerance");

  auto synth_opts = [&](CLI::App* s) {
    s->add_option("--points", c.points, "y-grid points per axis");
    s->add_option("--extent", c.extent, "y-grid extent");
    s->add_option("--epsilon", c.epsilon, "taper scale (0 = automatic)");
    s->add_option("--tol", c.synthesis_tol, "spectral solve tolerance");
    s->add_option("--x-rows", c.x_rows, "x rows")->delimiter(',');
    s->add_option("--row-x", c.row_x, "x row to export / scan");
  };
  auto* synth = app.add_subcommand("synthesize", "synthesize the physical field");
  synth_opts(synth);
  auto* wave = app.add_subcommand("wavefront", "classify windowed decay against the predicted singular support");
  synth_opts(wave);
  wave->add_option("--cell", c.cell, "cell size in samples");
  wave->add_option("--window", c.window, "window size in samples");
  auto* shadow = app.add_subcommand("shadow-fit", "fit the boundary exponent over y_n > beta");
  synth_opts(shadow);
  shadow->add_option("--beta", c.beta, "lower y_n bound");
  auto* flow = app.add_subcommand("flow", "nontrapping check for the extended profiles");
  flow->add_option("--starts", c.starts, "starts per profile");
  flow->add_option("--radius", c.radius, "escape radius");
  flow->add_option("--t-max", c.t_max, "time limit");
  flow->add_option("--dt", c.dt, "RK4 step");
  flow->add_option("--sign", c.sign, "plus | minus | both");
  auto* res = app.add_subcommand("resolvent-scan", "weighted resolvent norm versus h");
  res->add_option("--h-list", c.h, "h values (ratio 2)")->delimiter(',');
  res->add_option("--epsilon", c.resolvent_epsilon, "weight exponent offset");
  res->add_option("--sign", c.resolvent_sign, "plus | minus");
  res->add_option("--grid-points", c.grid_points, "minimum grid points");
  auto* tr = app.add_subcommand("transport", "transport hierarchy and tail exponents");
  tr->add_option("--terms", c.terms, "number of transport terms");
  app.add_subcommand("selftest", "run the built-in example checks");

  try {
    auto cfg = detail::find_config(args);
    if (!cfg.empty()) c = load_config(cfg);
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return usage_failure;
  } catch (const config_error& e) {
    err << "configuration error: " << e.what() << "\n";
    return usage_failure;
  }

  try {
    auto* sub = app.get_subcommands().front();
    std::string name = sub->get_name();
    if (name == "selftest") return detail::cmd_selftest(out);
    validate(c);
    ensure_writable(c.out);
    if (!write_config.empty()) {
      std::ofstream o(write_config);
      if (!o) throw config_error("cannot write " + write_config);
      o << serialize(c);
    }
    {
      std::ofstream o(detail::path_in(c, "run_config.toml"));
      o << serialize(c);
    }
    if (name == "spectral") return detail::cmd_spectral(c, out);
    if (name == "synthesize") return detail::cmd_synthesize(c, out);
    if (name == "wavefront") return detail::cmd_wavefront(c, out);
    if (name == "shadow-fit") return detail::cmd_shadow_fit(c, out);
    if (name == "flow") return detail::cmd_flow(c, out);
    if (name == "resolvent-scan") return detail::cmd_resolvent(c, out);
    if (name == "transport") return detail::cmd_transport(c, out);
    err << "unknown subcommand\n";
    return usage_failure;
  } catch (const config_error& e) {
    err << "configuration error: " << e.what() << "\n";
    return usage_failure;
  } catch (const property_violation& e) {
    err << "property violation: " << e.what() << "\n";
    return property_failure;
  } catch (const domain_error& e) {
    err << "domain error: " << e.what() << "\n";
    return domain_failure;
  } catch (const range_error& e) {
    err << "range error: " << e.what() << "\n";
    return domain_failure;
  } catch (const pole_error& e) {
    err << "pole: " << e.what() << "\n";
    return domain_failure;
  } catch (const integration_error& e) {
    err << "integration error: " << e.what() << "\n";
    return domain_failure;
  }
}

}  // namespace glance::cli
