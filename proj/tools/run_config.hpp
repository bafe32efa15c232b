#pragma once

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <glance/errors.hpp>
#include <glance/io.hpp>
#include <glance/model.hpp>
#include <glance/synthesis.hpp>

namespace glance::cli {

struct RunConfig {
  // model
  int n = 2;
  double lambda = 0.84;
  std::string mode = "ads";
  double delta2 = 0.25;
  // run
  std::string out = ".";
  int threads = 0;
  // spectral
  std::vector<double> theta{0.5, 10.0};
  double xmax = 3.0;
  int nx = 301;
  double spectral_tol = 1e-10;
  // synthesis
  int points = 512;
  double extent = 16.0;
  double epsilon = 0.0;
  double synthesis_tol = 1e-8;
  std::vector<double> x_rows = default_x_rows();
  double row_x = 0.5;
  // wavefront
  int cell = 32;
  int window = 64;
  // shadow
  double beta = 1.0;
  // flow
  int starts = 64;
  double radius = 10.0;
  double t_max = 100.0;
  double dt = 5e-4;
  std::string sign = "both";
  // resolvent
  std::vector<double> h{0.125, 0.0625, 0.03125, 0.015625};
  double resolvent_epsilon = 0.5;
  std::string resolvent_sign = "plus";
  int grid_points = 4096;
  // transport
  int terms = 3;

  bool operator==(const RunConfig&) const = default;
};

inline std::string quote(const std::string& s) { return "\"" + s + "\""; }

inline std::string list(const std::vector<double>& v) {
  std::string r = "[";
  for (std::size_t i = 0; i < v.size(); ++i) r += (i ? ", " : "") + io::fmt(v[i]);
  return r + "]";
}

inline std::string serialize(const RunConfig& c) {
  using io::fmt;
  std::ostringstream o;
  o << "# glance run configuration\n";
  o << "[model]\nn = " << c.n << "\nlambda = " << fmt(c.lambda) << "\nmode = " << quote(c.mode)
    << "\ndelta2 = " << fmt(c.delta2) << "\n\n";
  o << "[run]\nout = " << quote(c.out) << "\nthreads = " << c.threads << "\n\n";
  o << "[spectral]\ntheta = " << list(c.theta) << "\nxmax = " << fmt(c.xmax) << "\nnx = " << c.nx
    << "\ntol = " << fmt(c.spectral_tol) << "\n\n";
  o << "[synthesis]\npoints = " << c.points << "\nextent = " << fmt(c.extent) << "\nepsilon = " << fmt(c.epsilon)
    << "\ntol = " << fmt(c.synthesis_tol) << "\nx_rows = " << list(c.x_rows) << "\nrow_x = " << fmt(c.row_x)
    << "\n\n";
  o << "[wavefront]\ncell = " << c.cell << "\nwindow = " << c.window << "\n\n";
  o << "[shadow]\nbeta = " << fmt(c.beta) << "\n\n";
  o << "[flow]\nstarts = " << c.starts << "\nradius = " << fmt(c.radius) << "\nt_max = " << fmt(c.t_max)
    << "\ndt = " << fmt(c.dt) << "\nsign = " << quote(c.sign) << "\n\n";
  o << "[resolvent]\nh = " << list(c.h) << "\nepsilon = " << fmt(c.resolvent_epsilon)
    << "\nsign = " << quote(c.resolvent_sign) << "\ngrid_points = " << c.grid_points << "\n\n";
  o << "[transport]\nterms = " << c.terms << "\n";
  return o.str();
}

namespace detail {

inline double to_double(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw config_error("config: " + key + " expects a number, got '" + s + "'");
  }
}

inline int to_int(const std::string& key, const std::string& s) {
  double v = to_double(key, s);
  if (v != double(int(v))) throw config_error("config: " + key + " expects an integer");
  return int(v);
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw config_error(std::string("config: ") + e.what());
  }
  for (const auto& it : items) {
    if (it.name == "++" || it.name == "--") continue;
    std::string key = it.fullname();
    if (it.inputs.empty()) throw config_error("config: " + key + " has no value");
    const std::string& v = it.inputs.front();
    auto num = [&] { return detail::to_double(key, v); };
    auto integer = [&] { return detail::to_int(key, v); };
    auto nums = [&] {
      std::vector<double> r;
      for (const auto& s : it.inputs) r.push_back(detail::to_double(key, s));
      return r;
    };
    if (key == "model.n") c.n = integer();
    else if (key == "model.lambda") c.lambda = num();
    else if (key == "model.mode") c.mode = v;
    else if (key == "model.delta2") c.delta2 = num();
    else if (key == "run.out") c.out = v;
    else if (key == "run.threads") c.threads = integer();
    else if (key == "spectral.theta") c.theta = nums();
    else if (key == "spectral.xmax") c.xmax = num();
    else if (key == "spectral.nx") c.nx = integer();
    else if (key == "spectral.tol") c.spectral_tol = num();
    else if (key == "synthesis.points") c.points = integer();
    else if (key == "synthesis.extent") c.extent = num();
    else if (key == "synthesis.epsilon") c.epsilon = num();
    else if (key == "synthesis.tol") c.synthesis_tol = num();
    else if (key == "synthesis.x_rows") c.x_rows = nums();
    else if (key == "synthesis.row_x") c.row_x = num();
    else if (key == "wavefront.cell") c.cell = integer();
    else if (key == "wavefront.window") c.window = integer();
    else if (key == "shadow.beta") c.beta = num();
    else if (key == "flow.starts") c.starts = integer();
    else if (key == "flow.radius") c.radius = num();
    else if (key == "flow.t_max") c.t_max = num();
    else if (key == "flow.dt") c.dt = num();
    else if (key == "flow.sign") c.sign = v;
    else if (key == "resolvent.h") c.h = nums();
    else if (key == "resolvent.epsilon") c.resolvent_epsilon = num();
    else if (key == "resolvent.sign") c.resolvent_sign = v;
    else if (key == "resolvent.grid_points") c.grid_points = integer();
    else if (key == "transport.terms") c.terms = integer();
    else throw config_error("config: unknown key " + key);
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline Mode parse_mode(const std::string& m) {
  if (m == "ads") return Mode::ads;
  if (m == "friedlander") return Mode::friedlander;
  throw config_error("unknown mode '" + m + "'");
}

inline void validate(const RunConfig& c) {
  parse_mode(c.mode);
  auto pos = [](double v, const char* what) {
    if (!(v > 0.0)) throw config_error(std::string(what) + " must be positive");
  };
  pos(c.spectral_tol, "spectral.tol");
  pos(c.synthesis_tol, "synthesis.tol");
  pos(c.dt, "flow.dt");
  pos(c.t_max, "flow.t_max");
  pos(c.radius, "flow.radius");
  pos(c.resolvent_epsilon, "resolvent.epsilon");
  pos(c.beta, "shadow.beta");
  pos(c.extent, "synthesis.extent");
  if (c.epsilon < 0.0) throw config_error("synthesis.epsilon must be >= 0");
  if (c.theta.size() < 2) throw config_error("spectral.theta needs theta' components and theta_n");
  if (c.nx < 2) throw config_error("spectral.nx must be >= 2");
  if (c.x_rows.empty()) throw config_error("synthesis.x_rows is empty");
  if (c.h.empty()) throw config_error("resolvent.h is empty");
  if (c.points < 16) throw config_error("synthesis.points too small");
  if (c.starts < 1) throw config_error("flow.starts must be >= 1");
  if (c.terms < 1) throw config_error("transport.terms must be >= 1");
  if (c.threads < 0) throw config_error("run.threads must be >= 0");
  if (c.sign != "plus" && c.sign != "minus" && c.sign != "both") throw config_error("flow.sign must be plus|minus|both");
  if (c.resolvent_sign != "plus" && c.resolvent_sign != "minus")
    throw config_error("resolvent.sign must be plus|minus");
}

inline void ensure_writable(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  auto probe = std::filesystem::path(dir) / ".glance_probe";
  std::ofstream o(probe);
  if (!o) throw config_error("output directory " + dir + " is not writable");
  o.close();
  std::filesystem::remove(probe, ec);
}

}  // namespace glance::cli
