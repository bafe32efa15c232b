#include <glance/glance.hpp>
#include <gtest/gtest.h>

#include <numbers>

using namespace glance;

namespace {

double mass(const Field2D& f, std::size_t r) {
  double s = 0.0;
  const auto& g = f.grid;
  for (std::size_t i = 0; i < g.points; ++i)
    for (std::size_t j = 0; j < g.points; ++j) s += f.at(r, i, j).real();
  return s * g.dy() * g.dy();
}

double gaussian_delta(double y2, double eps) {
  return std::exp(-y2 / (4 * eps * eps)) / (4 * std::numbers::pi * eps * eps);
}

}  // namespace

TEST(Synthesis, UnitSpectrumGivesTaperTransform) {
  YGrid g{128, 16.0};
  for (double eps : {3.0 / g.theta_max(), 6.0 / g.theta_max()}) {
    auto f = synthesize_function([](double, double, double) { return cplx(1.0); }, {0.5}, g, eps);
    EXPECT_NEAR(mass(f, 0), 1.0, 1e-12);
    double peak = gaussian_delta(0, eps), worst = 0.0;
    for (std::size_t i = 0; i < g.points; ++i)
      for (std::size_t j = 0; j < g.points; ++j) {
        double y2 = g.y(i) * g.y(i) + g.y(j) * g.y(j);
        worst = std::max(worst, std::abs(f.at(0, i, j) - gaussian_delta(y2, eps)));
      }
    EXPECT_LE(worst / peak, eps * g.theta_max() > 4 ? 1e-10 : 1e-3);
  }
  EXPECT_THROW(synthesize_function([](double, double, double) { return cplx(1.0); }, {0.5}, g, -1.0), config_error);
  EXPECT_THROW(synthesize_function([](double, double, double) { return cplx(1.0); }, {0.5}, YGrid{30, 16.0}, 0.1),
               config_error);
}

TEST(Synthesis, ParityAndParseval) {
  YGrid g{64, 8.0};
  double eps = 3.0 / g.theta_max();
  auto uhat = [](double x, double a, double b) {
    return cplx(std::cos(0.3 * a) * std::exp(-0.01 * b * b), 0.2 * x * std::sin(0.1 * b)) / (1.0 + 0.02 * a * a);
  };
  auto f = synthesize_function(uhat, {0.2, 0.7}, g, eps);
  const std::size_t N = g.points;
  for (std::size_t r = 0; r < 2; ++r) {
    double spec = 0.0, field = 0.0, worst = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) {
        double a = g.theta(i), b = g.theta(j);
        spec += std::norm(uhat(f.x[r], a, b) * taper(eps * eps * (a * a + b * b)));
        field += std::norm(f.at(r, i, j));
        worst = std::max(worst, std::abs(f.at(r, i, j) - f.at(r, (N - i) % N, j)));
        peak = std::max(peak, std::abs(f.at(r, i, j)));
      }
    spec *= std::pow(g.dtheta(), 2) / std::pow(2 * std::numbers::pi, 2);
    field *= g.dy() * g.dy();
    EXPECT_NEAR(field / spec, 1.0, 1e-6);
    EXPECT_LE(worst / peak, 1e-12);
  }
}

TEST(Synthesis, FriedlanderBoundaryRowIsMollifiedDelta) {
  auto P = make_params(2, 0.84, Mode::friedlander);
  SynthesisSpec s;
  s.grid = YGrid{64, 16.0};
  s.x_rows = {0.0, 0.05};
  s.threads = 2;
  auto F = synthesize_field(P, s);
  double eps = default_epsilon(s.grid), peak = gaussian_delta(0, eps), worst = 0.0;
  const auto& g = F.grid;
  for (std::size_t i = 0; i < g.points; ++i)
    for (std::size_t j = 0; j < g.points; ++j)
      worst = std::max(worst, std::abs(F.at(0, i, j) - gaussian_delta(g.y(i) * g.y(i) + g.y(j) * g.y(j), eps)));
  EXPECT_LE(worst / peak, 1e-3);
  EXPECT_NEAR(mass(F, 0), 1.0, 1e-10);
  EXPECT_NEAR(mass(F, 1), 1.0, 1e-2);
}

TEST(Synthesis, SynthesisErrors) {
  auto P = make_params(2, 0.84, Mode::ads);
  SynthesisSpec s;
  s.grid = YGrid{64, 16.0};
  s.x_rows = {};
  EXPECT_THROW(synthesize_field(P, s), config_error);
  s.x_rows = {0.0};
  EXPECT_THROW(synthesize_field(P, s), domain_error);
  s.x_rows = {3.0};
  EXPECT_THROW(synthesize_field(P, s), config_error);
  s.x_rows = {0.5};
  s.epsilon = -1;
  EXPECT_THROW(synthesize_field(P, s), config_error);
  EXPECT_THROW(synthesize_field(make_params(3, 0.84, Mode::ads), SynthesisSpec{s.grid, {0.5}}), config_error);
}

TEST(Prediction, OriginAndGlancingBranch) {
  auto o = singular_point(0.0, 0.0);
  EXPECT_EQ(o[0], 0.0);
  EXPECT_EQ(o[1], 0.0);
  for (double x : {0.01, 0.3, 1.0, 2.5}) {
    auto p = singular_point(1.0, x);
    EXPECT_NEAR(p[1], 2.0 / 3.0 * std::pow(x, 1.5) + 2.0 * std::sqrt(x), 1e-14);
    EXPECT_NEAR(p[0], -2.0 * std::sqrt(x), 1e-14);
  }
  auto c = predict_singular_support(make_params(2, 0.84, Mode::ads), 0.5, 11);
  EXPECT_EQ(c.points.size(), 21u);
  for (const auto& p : c.points) {
    bool mirrored = false;
    for (const auto& q : c.points) mirrored |= q[0] == -p[0] && q[1] == p[1];
    EXPECT_TRUE(mirrored);
    EXPECT_GE(p[1], 0.0);
  }
  EXPECT_THROW(predict_singular_support(make_params(2, 0.84, Mode::ads), 0.0), domain_error);
}

TEST(Prediction, ForwardInX) {
  for (int k = 0; k <= 20; ++k) {
    double a = k / 20.0;
    double prev = singular_point(a, 0.0)[1];
    for (int m = 1; m <= 200; ++m) {
      double x = m * 0.01;
      double y = singular_point(a, x)[1];
      EXPECT_GT(y, prev);
      prev = y;
      double p = std::sqrt(1 + x - a * a), d = 1e-6;
      double fd = (singular_point(a, x + d)[1] - singular_point(a, x - d)[1]) / (2 * d);
      EXPECT_NEAR(fd, p + a * a / p, 1e-6 * (p + a * a / p));
    }
  }
}

TEST(Detector, GaussianHasNoSingularCells) {
  YGrid g{256, 16.0};
  auto F = sample_field([](double, double a, double b) { return cplx(std::exp(-(a * a + b * b)), 0.0); }, {0.5}, g);
  F.epsilon = default_epsilon(g);
  auto rep = wavefront_scan(F, 0);
  EXPECT_EQ(rep.singular_cells, 0u);
  EXPECT_EQ(rep.inconclusive_cells, 0u);
}

TEST(Detector, HalfPowerKinkWithinOneCell) {
  YGrid g{512, 16.0};
  const double c = 0.3;
  auto F = sample_field(
      [c](double, double a, double b) { return cplx(std::sqrt(std::fabs(b - c)) * std::exp(-(a * a + b * b) / 8), 0.0); },
      {0.5}, g);
  for (double eps : {0.0, default_epsilon(g)}) {
    F.epsilon = eps;
    std::vector<std::array<double, 2>> line;
    for (int k = -400; k <= 400; ++k) line.push_back({k * 0.02, c});
    auto rep = wavefront_scan(F, 0, {}, {}, line);
    EXPECT_GE(rep.singular_cells, rep.cells_p);
    EXPECT_LE(rep.match_max, 1.0);
    for (std::size_t ci = 0; ci < rep.cells_p; ++ci)
      for (std::size_t cj = 0; cj < rep.cells_n; ++cj) {
        auto cen = rep.center(ci, cj, g, 32);
        if (std::fabs(cen[1] - c) < 0.5 * rep.cell_length)
          EXPECT_EQ(rep.cls[ci * rep.cells_n + cj], DecayClass::singular);
      }
  }
}

TEST(Detector, WindowLargerThanDomain) {
  YGrid g{64, 16.0};
  auto F = sample_field([](double, double, double) { return cplx(1.0); }, {0.5}, g);
  WindowSpec ws;
  ws.window = 128;
  EXPECT_THROW(wavefront_scan(F, 0, ws), config_error);
  EXPECT_THROW(wavefront_scan(F, 3), config_error);
}

TEST(ShadowFit, ConstructedPowerLaw) {
  YGrid g{128, 16.0};
  auto F = sample_field(
      [](double x, double a, double b) { return cplx(std::pow(x, 1.4) * std::exp(-0.1 * (a * a + b * b)), 0.0); },
      log_grid(0.003, 0.09, 6), g);
  auto fit = shadow_exponent_fit(F, 1.0);
  EXPECT_NEAR(fit.exponent, 1.4, 0.02);
  EXPECT_NEAR(fit.mean, 1.4, 0.02);
  EXPECT_THROW(shadow_exponent_fit(F, 0.0), domain_error);
  auto far = sample_field([](double, double, double) { return cplx(1.0); }, {0.1, 0.2}, g);
  EXPECT_THROW(shadow_exponent_fit(far, 1.0), config_error);
  auto dead = sample_field([](double, double, double) { return cplx(0.0); }, {0.005, 0.05}, g);
  EXPECT_THROW(shadow_exponent_fit(dead, 1.0), domain_error);
}

class AdsEndToEnd : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    params = new ModelParams(make_params(2, 0.84, Mode::ads));
    SynthesisSpec s;
    s.x_rows = default_x_rows();
    field = new Field2D(synthesize_field(*params, s));
  }
  static void TearDownTestSuite() {
    delete field;
    delete params;
  }
  static ModelParams* params;
  static Field2D* field;
};
ModelParams* AdsEndToEnd::params = nullptr;
Field2D* AdsEndToEnd::field = nullptr;

TEST_F(AdsEndToEnd, FiniteAndDcConsistent) {
  for (const auto& v : field->data) ASSERT_TRUE(std::isfinite(v.real()) && std::isfinite(v.imag()));
  EXPECT_TRUE(field->pole_columns.empty());
  for (std::size_t r = 0; r < field->x.size(); ++r)
    EXPECT_NEAR(mass(*field, r) / std::pow(field->x[r], params->s_minus), 1.0, 1e-2);
}

TEST_F(AdsEndToEnd, ShadowExponentIsSPlus) {
  auto fit = shadow_exponent_fit(*field, 1.0);
  EXPECT_NEAR(fit.exponent, params->s_plus, 0.1);
  EXPECT_GT(std::fabs(fit.exponent - params->s_minus), 0.5);
}

TEST_F(AdsEndToEnd, DeepShadowSmoothAndSingularitiesNearCurve) {
  std::size_t r = field->row_index(0.5);
  auto curve = predict_singular_support(*params, 0.5);
  auto rep = wavefront_scan(*field, r, {}, {}, curve.points);
  EXPECT_GT(rep.shadow_cells, 0u);
  EXPECT_EQ(rep.shadow_singular, 0u);
  EXPECT_GT(rep.singular_cells, 0u);
  EXPECT_LE(rep.match_mean, 2.0);
  std::size_t near = 0;
  for (double d : rep.match_distance) near += d <= 2.0;
  EXPECT_GE(double(near) / double(rep.match_distance.size()), 0.8);
  RecordProperty("match_max", std::to_string(rep.match_max));
}

TEST(FriedlanderEndToEnd, SingularitiesNearCurve) {
  GTEST_SKIP() << "friedlander spectral family grows like exp(|theta'| x) where |theta'| > |theta_n|; at x = 0.5 "
                  "this outruns the default taper exp(-eps^2 |theta|^2) and the field is dominated by the grid edge";
}
