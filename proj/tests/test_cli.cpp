#include <glance/glance.hpp>
#include <gtest/gtest.h>

#include <boost/math/special_functions/airy.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <sys/wait.h>

#include "cli_app.hpp"

using namespace glance;
using namespace glance::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("glance_cli_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Proc {
  int code = -1;
  std::string out;
};

Proc exec(const std::string& args, const std::string& env = "") {
  const char* bin = std::getenv("GLANCE_BIN");
  if (!bin) throw std::runtime_error("GLANCE_BIN not set");
  std::string cmd = env + (env.empty() ? "" : " ") + std::string(bin) + " " + args + " 2>&1";
  Proc p;
  FILE* f = ::popen(cmd.c_str(), "r");
  if (!f) return p;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) p.out.append(buf, n);
  int st = ::pclose(f);
  p.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return p;
}

int run_in(const std::vector<std::string>& args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  std::ostringstream o, e;
  int rc = run(args, o, e);
  if (out_text) *out_text = o.str();
  if (err_text) *err_text = e.str();
  return rc;
}

}  // namespace

TEST(Config, RoundTripDefault) {
  RunConfig c;
  EXPECT_EQ(parse_config(serialize(c)), c);
}

TEST(Config, RoundTripModified) {
  RunConfig c;
  c.n = 3;
  c.lambda = 1.9;
  c.mode = "friedlander";
  c.out = "some dir/out";
  c.threads = 3;
  c.theta = {0.1, 0.2, 7.25};
  c.x_rows = {0.01, 0.1 / 3.0, 0.5};
  c.h = {0.2, 0.1, 0.05, 0.025, 0.0125};
  c.dt = 1e-4;
  c.sign = "minus";
  c.epsilon = 0.0123456789012345;
  c.terms = 2;
  EXPECT_EQ(parse_config(serialize(c)), c);
}

TEST(Config, CommentsAndSections) {
  auto c = parse_config("# run\n[model]\nlambda = 0.5 # inline\nmode = \"friedlander\"\n[spectral]\ntheta = [1, 2]\n");
  EXPECT_EQ(c.lambda, 0.5);
  EXPECT_EQ(c.mode, "friedlander");
  EXPECT_EQ(c.theta, (std::vector<double>{1, 2}));
  EXPECT_EQ(c.nx, RunConfig{}.nx);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("[model]\nbogus = 1\n"), config_error);
  EXPECT_THROW(parse_config("lambda = 1\n"), config_error);
  EXPECT_THROW(parse_config("[model]\nlambda = abc\n"), config_error);
  EXPECT_THROW(parse_config("[spectral]\nnx = 2.5\n"), config_error);
  EXPECT_THROW(load_config("/nonexistent/glance.toml"), config_error);
  RunConfig c;
  c.spectral_tol = 0;
  EXPECT_THROW(validate(c), config_error);
  c = RunConfig{};
  c.theta = {1.0};
  EXPECT_THROW(validate(c), config_error);
  c = RunConfig{};
  c.sign = "up";
  EXPECT_THROW(validate(c), config_error);
  c = RunConfig{};
  c.mode = "flat";
  EXPECT_THROW(validate(c), config_error);
  c = RunConfig{};
  c.x_rows.clear();
  EXPECT_THROW(validate(c), config_error);
  EXPECT_NO_THROW(validate(RunConfig{}));
}

TEST(Grid, RoundTripAndCorruption) {
  auto d = scratch("grid");
  io::GridFile g;
  g.nx = 3;
  g.ny = 2;
  g.x0 = -1.5;
  g.dx = 0.25;
  g.y0 = 2;
  g.dy = 1e-3;
  g.is_complex = true;
  for (int k = 0; k < 12; ++k) g.data.push_back(k * 0.1 - 0.3);
  io::write_grid((d / "a.glnc").string(), g);
  auto bytes = slurp(d / "a.glnc");
  ASSERT_EQ(bytes.size(), 4u + 4 + 8 + 8 + 4 * 8 + 1 + 12 * 8);
  EXPECT_EQ(bytes.substr(0, 4), "GLNC");
  auto r = io::read_grid((d / "a.glnc").string());
  EXPECT_EQ(r.nx, 3u);
  EXPECT_EQ(r.ny, 2u);
  EXPECT_EQ(r.x0, g.x0);
  EXPECT_EQ(r.dy, g.dy);
  EXPECT_TRUE(r.is_complex);
  EXPECT_EQ(r.data, g.data);
  bytes[0] = 'X';
  std::ofstream(d / "b.glnc", std::ios::binary) << bytes;
  EXPECT_THROW(io::read_grid((d / "b.glnc").string()), config_error);
  std::ofstream(d / "c.glnc", std::ios::binary) << slurp(d / "a.glnc").substr(0, 40);
  EXPECT_THROW(io::read_grid((d / "c.glnc").string()), config_error);
  g.data.pop_back();
  EXPECT_THROW(io::write_grid((d / "d.glnc").string(), g), config_error);
  fs::remove_all(d);
}

TEST(Run, ExitCodesInProcess) {
  auto d = scratch("codes").string();
  std::string out, err;
  EXPECT_EQ(run_in({"--bogus", "selftest"}, &out, &err), 3);
  EXPECT_NE(err.find("Usage"), std::string::npos);
  EXPECT_EQ(run_in({}, &out, &err), 3);
  EXPECT_EQ(run_in({"--out", d, "resolvent-scan", "--h-list", "0.1,0.05,0.02,0.01"}), 3);
  EXPECT_EQ(run_in({"--out", d, "--lambda", "1.0", "spectral"}), 1);
  EXPECT_EQ(run_in({"--out", d, "flow", "--t-max", "0.01", "--starts", "4"}), 2);
  EXPECT_EQ(run_in({"--out", d, "--mode", "flat", "spectral"}), 3);
  EXPECT_EQ(run_in({"--config", "/nonexistent.toml", "selftest"}), 3);
  EXPECT_EQ(run_in({"--out", d, "transport", "--terms", "2"}, &out), 0);
  EXPECT_NE(out.find("tail_exponent_1"), std::string::npos);
  fs::remove_all(d);
}

TEST(Run, FlagsOverrideConfigFile) {
  auto d = scratch("override");
  std::ofstream(d / "in.toml") << "[model]\nlambda = 0.5\nn = 2\n[spectral]\nnx = 11\nxmax = 2.5\n";
  auto dump = (d / "resolved.toml").string();
  EXPECT_EQ(run_in({"--out", d.string(), "spectral", "--nx", "21", "--config", (d / "in.toml").string(), "--dump-config",
                    dump}),
            0);
  auto c = load_config(dump);
  EXPECT_EQ(c.lambda, 0.5);
  EXPECT_EQ(c.nx, 21);
  EXPECT_EQ(c.xmax, 2.5);
  EXPECT_EQ(load_config((d / "run_config.toml").string()), c);
  fs::remove_all(d);
}

TEST(Run, ThreadsFromEnvironment) {
  RunConfig c;
  ::setenv("GLANCE_THREADS", "3", 1);
  EXPECT_EQ(glance::cli::detail::resolve_threads(c), 3u);
  c.threads = 2;
  EXPECT_EQ(glance::cli::detail::resolve_threads(c), 2u);
  c.threads = 0;
  ::setenv("GLANCE_THREADS", "zero", 1);
  EXPECT_THROW(glance::cli::detail::resolve_threads(c), config_error);
  ::unsetenv("GLANCE_THREADS");
  EXPECT_EQ(glance::cli::detail::resolve_threads(c), 0u);
}

TEST(Binary, ExitCodes) {
  auto d = scratch("bin").string();
  auto p = exec("--no-such-flag selftest");
  EXPECT_EQ(p.code, 3);
  EXPECT_NE(p.out.find("Usage"), std::string::npos);
  p = exec("selftest");
  EXPECT_EQ(p.code, 0) << p.out;
  EXPECT_NE(p.out.find("checks passed"), std::string::npos);
  EXPECT_EQ(exec("--out " + d + " resolvent-scan --h-list 0.125,0.0625").code, 3);
  EXPECT_EQ(exec("--out " + d + " --lambda 1.0 spectral").code, 1);
  EXPECT_EQ(exec("--out " + d + " flow --t-max 0.01 --starts 4").code, 2);
  fs::remove_all(d);
}

TEST(Binary, FriedlanderGridMatchesAiry) {
  auto d = scratch("airy");
  auto p = exec("--out " + d.string() + " spectral --mode friedlander --theta 0.5,10 --xmax 3");
  ASSERT_EQ(p.code, 0) << p.out;
  auto g = io::read_grid((d / "spectral.glnc").string());
  ASSERT_TRUE(g.is_complex);
  ASSERT_EQ(g.nx, 301u);
  double tp = 0.5, tn = 10.0, t23 = std::cbrt(tn * tn);
  auto zeta = [&](double x) { return (tp * tp - (1.0 + x) * tn * tn) / (t23 * t23); };
  double a0 = boost::math::airy_ai(zeta(0.0)), worst = 0.0, scale = 0.0;
  std::vector<double> ref;
  for (std::size_t i = 0; i < g.nx; ++i) {
    double x = g.x0 + double(i) * g.dx;
    ref.push_back(boost::math::airy_ai(zeta(x)) / a0);
    scale = std::max(scale, std::fabs(ref.back()));
  }
  for (std::size_t i = 0; i < g.nx; ++i) {
    worst = std::max(worst, std::fabs(g.data[2 * i] - ref[i]));
    EXPECT_EQ(g.data[2 * i + 1], 0.0);
  }
  EXPECT_LE(worst / scale, 1e-6);
  EXPECT_TRUE(fs::exists(d / "spectral.csv"));
  EXPECT_TRUE(fs::exists(d / "run_config.toml"));
  fs::remove_all(d);
}

TEST(Binary, OutputsIndependentOfThreadCount) {
  auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  std::string synth = " synthesize --points 64 --extent 16 --x-rows 0.01,0.1 --row-x 0.5";
  ASSERT_EQ(exec("--out " + a.string() + " --threads 1" + synth).code, 0);
  ASSERT_EQ(exec("--out " + b.string() + " --threads 3" + synth).code, 0);
  ASSERT_EQ(exec("--out " + c.string() + synth, "GLANCE_THREADS=2").code, 0);
  for (auto f : {"field_slice.csv", "field.glnc"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(c / f)) << f;
  }
  ASSERT_EQ(exec("--out " + a.string() + " --threads 1 spectral").code, 0);
  ASSERT_EQ(exec("--out " + b.string() + " --threads 4 spectral").code, 0);
  EXPECT_EQ(slurp(a / "spectral.csv"), slurp(b / "spectral.csv"));
  ASSERT_EQ(exec("--out " + a.string() + " resolvent-scan").code, 0);
  ASSERT_EQ(exec("--out " + b.string() + " resolvent-scan").code, 0);
  EXPECT_EQ(slurp(a / "resolvent.csv"), slurp(b / "resolvent.csv"));
  for (auto& p : {a, b, c}) fs::remove_all(p);
}

TEST(Binary, ShadowFitPrintsSPlus) {
  auto d = scratch("shadow");
  auto p = exec("--out " + d.string() + " shadow-fit");
  EXPECT_EQ(p.code, 0) << p.out;
  std::smatch m;
  ASSERT_TRUE(std::regex_search(p.out, m, std::regex("s_plus_fit=([-0-9.eE+]+)"))) << p.out;
  EXPECT_NEAR(std::stod(m[1].str()), 1.4, 0.1);
  EXPECT_TRUE(fs::exists(d / "shadow_fit.csv"));
  fs::remove_all(d);
}
