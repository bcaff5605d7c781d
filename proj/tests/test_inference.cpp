#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ldvqr/estimators.hpp"
#include "ldvqr/inference.hpp"
#include "ldvqr/rng.hpp"
#include "ldvqr/simulate.hpp"

#include <cmath>
#include <cstdlib>

using namespace ldvqr;

namespace {

FitResult synthetic_fit(const std::vector<double>& taus,
                        const std::vector<VectorXd>& betas, const MatrixXd& V) {
  FitResult fit;
  fit.names = {"x", "_cons"};
  for (std::size_t m = 0; m < taus.size(); ++m) {
    CoefVector c;
    c.tau = taus[m];
    c.beta = betas[m];
    fit.coefs.push_back(c);
  }
  fit.V = V;
  fit.spec.taus = taus;
  return fit;
}

VectorXd vec2(double a, double b) {
  VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("wald statistic is zero when the constraints hold") {
  VectorXd theta = vec2(1.5, -2.0);
  MatrixXd V = MatrixXd::Identity(2, 2) * 0.3;
  WaldResult res = wald_test(theta, V, MatrixXd::Identity(2, 2), theta);
  CHECK(res.statistic == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(res.p_value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.df == 2);
}

TEST_CASE("wald chi-squared tail: W=1 with two constraints gives exp(-1/2)") {
  VectorXd theta = vec2(1.0, 0.0);
  WaldResult res = wald_test(theta, MatrixXd::Identity(2, 2),
                             MatrixXd::Identity(2, 2), VectorXd::Zero(2));
  CHECK(res.statistic == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.df == 2);
  CHECK(res.p_value == doctest::Approx(0.6065306597126334).epsilon(1e-10));
}

TEST_CASE("wald falls back to the pseudo-inverse on singular covariance") {
  MatrixXd V(2, 2);
  V << 1, 1, 1, 1;  // rank one
  VectorXd theta = vec2(1.0, 1.0);
  WaldResult res = wald_test(theta, V, MatrixXd::Identity(2, 2), VectorXd::Zero(2));
  CHECK(res.rank_deficient);
  CHECK(res.df == 1);
  CHECK(res.statistic == doctest::Approx(1.0).epsilon(1e-10));

  // consistent constraint on a zero-variance direction: statistic stays zero
  WaldResult zero = wald_test(theta, V, MatrixXd::Identity(2, 2), theta);
  CHECK(zero.statistic == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("wald rejects dimension mismatches") {
  CHECK_THROWS_AS(wald_test(vec2(1, 2), MatrixXd::Identity(2, 2),
                            MatrixXd::Identity(3, 3), VectorXd::Zero(3)),
                  data_error);
}

TEST_CASE("wald is invariant to row scaling of the constraints") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    VectorXd theta(3);
    theta << rng.normal(), rng.normal(), rng.normal();
    MatrixXd A(3, 3);
    for (Eigen::Index i = 0; i < 3; ++i)
      for (Eigen::Index j = 0; j < 3; ++j) A(i, j) = rng.normal();
    MatrixXd V = A * A.transpose() + 0.5 * MatrixXd::Identity(3, 3);
    MatrixXd R(2, 3);
    for (Eigen::Index i = 0; i < 2; ++i)
      for (Eigen::Index j = 0; j < 3; ++j) R(i, j) = rng.normal();
    VectorXd r = vec2(rng.normal(), rng.normal());

    WaldResult base = wald_test(theta, V, R, r);
    const double c = 3.7;
    MatrixXd R2 = R;
    VectorXd r2 = r;
    R2.row(1) *= c;
    r2[1] *= c;
    WaldResult scaled = wald_test(theta, V, R2, r2);
    CHECK(scaled.statistic == doctest::Approx(base.statistic).epsilon(1e-10));
    CHECK(scaled.df == base.df);
  }
}

TEST_CASE("bootstrap covariance vanishes on exactly linear data") {
  Rng rng(31);
  const Eigen::Index n = 120;
  VectorXd x(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x[i] = rng.normal();
    y[i] = 1.2 * x[i] + 0.4;
  }
  Dataset d;
  d.n = n;
  d.K = 2;
  d.y = y;
  d.X.resize(n, 2);
  d.X.col(0) = x;
  d.X.col(1).setOnes();
  d.names = {"x", "_cons"};

  ModelSpec spec;
  spec.kind = ModelKind::Plain;
  spec.taus = {0.5};
  spec.reps = 20;
  spec.seed = 5;
  spec.bwidth = 1e-5;
  FitResult fit = fit_point_estimates(d, spec);
  BootstrapOut boot = bootstrap(d, spec, fit);
  CHECK(boot.V.cwiseAbs().maxCoeff() < 1e-8);
  CHECK(boot.record.failures == 0);
}

TEST_CASE("bootstrap SE magnitude matches the reference run") {
  // homoscedastic latent response, tau = 0.5: reported slope SE is 0.0366
  DgpOutput sim = dgp_censored(2000, false, 321);
  Dataset d = sim.latent_dataset();
  ModelSpec spec;
  spec.kind = ModelKind::Plain;
  spec.taus = {0.5};
  spec.reps = 100;
  spec.seed = 11;
  FitResult fit = fit_all(d, spec);
  const double se_slope = fit.se[0];
  CHECK(se_slope > 0.0366 / 1.5);
  CHECK(se_slope < 0.0366 * 1.5);
  // median of symmetric noise: slope 1, intercept 0
  CHECK(std::abs(fit.coefs[0].beta[0] - 1.0) < 0.12);
  CHECK(std::abs(fit.coefs[0].beta[1]) < 0.07);
}

TEST_CASE("symmetry is rejected on the latent response of the skewed DGP") {
  DgpOutput sim = dgp_binary(2000, 6);
  ModelSpec spec;
  spec.kind = ModelKind::Plain;
  spec.taus = {0.1, 0.25, 0.5, 0.75, 0.9};
  spec.reps = 60;
  spec.seed = 6;
  FitResult fit = fit_all(sim.latent_dataset(), spec);
  WaldResult sym = symmetry_test(fit, {0.25, 0.4}, SymmetryMode::Averaged);
  CHECK(sym.df == 2);
  CHECK(sym.statistic > 20.0);
  CHECK(sym.p_value < 0.001);
}

TEST_CASE("bootstrap covariance equals the covariance of the stored replicates") {
  DgpOutput sim = dgp_censored(300, true, 7);
  Dataset d = sim.observed_dataset();
  ModelSpec spec;
  spec.kind = ModelKind::Censored;
  spec.c_L = 0.0;
  spec.c_H = 1.0;
  spec.taus = {0.2, 0.8};
  spec.reps = 40;
  spec.seed = 99;
  FitResult fit = fit_point_estimates(d, spec);
  BootstrapOut boot = bootstrap(d, spec, fit);

  const MatrixXd& rep = boot.record.replicates;
  REQUIRE(rep.rows() >= 2);
  VectorXd mean = rep.colwise().mean();
  MatrixXd centered = rep.rowwise() - mean.transpose();
  MatrixXd direct =
      (centered.transpose() * centered) / static_cast<double>(rep.rows() - 1);
  CHECK((boot.V - direct).cwiseAbs().maxCoeff() < 1e-14);

  // joint resampling correlates the q20 and q80 blocks
  CHECK(boot.V.block(0, 2, 2, 2).cwiseAbs().maxCoeff() > 1e-8);

  // symmetric positive semidefinite
  CHECK((boot.V - boot.V.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(boot.V);
  CHECK(eig.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("bootstrap is deterministic and schedule independent") {
  DgpOutput sim = dgp_censored(200, false, 17);
  Dataset d = sim.observed_dataset();
  ModelSpec spec;
  spec.kind = ModelKind::Censored;
  spec.c_L = 0.0;
  spec.c_H = 1.0;
  spec.taus = {0.5};
  spec.reps = 16;
  spec.seed = 1234;
  FitResult fit = fit_point_estimates(d, spec);

  BootstrapOut a = bootstrap(d, spec, fit);
  BootstrapOut b = bootstrap(d, spec, fit);
  CHECK(a.V == b.V);

  setenv("LDVQR_THREADS", "1", 1);
  BootstrapOut serial = bootstrap(d, spec, fit);
  setenv("LDVQR_THREADS", "2", 1);
  BootstrapOut threaded = bootstrap(d, spec, fit);
  unsetenv("LDVQR_THREADS");
  CHECK(serial.V == threaded.V);
  CHECK(serial.record.replicates == threaded.record.replicates);
}

TEST_CASE("homogeneity test is zero for identical coefficients") {
  MatrixXd V = MatrixXd::Identity(6, 6) * 0.01;
  FitResult fit = synthetic_fit({0.2, 0.5, 0.8},
                                {vec2(1.0, 0.3), vec2(1.0, 0.5), vec2(1.0, 0.9)}, V);
  WaldResult res = homogeneity_test(fit, "x");
  CHECK(res.statistic == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(res.df == 2);
  CHECK(res.constraints.size() == 2);
  CHECK(res.constraints[0].find("[q20]x") != std::string::npos);

  WaldResult all = homogeneity_test(fit, "ALL");
  CHECK(all.df == 2);  // intercept excluded
  CHECK_THROWS_AS(homogeneity_test(fit, "nope"), data_error);
}

TEST_CASE("homogeneity detects quantile-varying slopes on the heteroscedastic DGP") {
  DgpOutput het = dgp_censored(2000, true, 3);
  ModelSpec spec;
  spec.kind = ModelKind::Plain;
  spec.taus = {0.2, 0.5, 0.8};
  spec.reps = 60;
  spec.seed = 3;
  FitResult fit = fit_all(het.latent_dataset(), spec);
  WaldResult res = homogeneity_test(fit, "x");
  CHECK(res.df == 2);
  CHECK(res.p_value < 0.01);

  DgpOutput hom = dgp_censored(2000, false, 3);
  FitResult fit2 = fit_all(hom.latent_dataset(), spec);
  WaldResult res2 = homogeneity_test(fit2, "x");
  CHECK(res2.p_value > 0.01);
}

TEST_CASE("symmetry test is exactly zero for coefficients linear in z_tau") {
  const std::vector<double> taus{0.1, 0.25, 0.5, 0.75, 0.9};
  std::vector<VectorXd> betas;
  for (double t : taus) {
    const double z = gauss_quantile(t);
    betas.push_back(vec2(1.0 + 0.5 * z, -0.3 + 0.2 * z));
  }
  FitResult fit = synthetic_fit(taus, betas, MatrixXd::Identity(10, 10));

  WaldResult avg = symmetry_test(fit, {0.25, 0.4}, SymmetryMode::Averaged);
  CHECK(avg.statistic == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(avg.df == 2);

  WaldResult per = symmetry_test(fit, {0.25, 0.4}, SymmetryMode::PerDelta);
  CHECK(per.statistic == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(per.df == 4);
}

TEST_CASE("symmetry test requires the matching quantiles") {
  FitResult fit = synthetic_fit({0.2, 0.5, 0.8},
                                {vec2(1, 0), vec2(1, 0), vec2(1, 0)},
                                MatrixXd::Identity(6, 6));
  CHECK_NOTHROW(symmetry_test(fit, {0.3}, SymmetryMode::Averaged));
  CHECK_THROWS_AS(symmetry_test(fit, {0.25}, SymmetryMode::Averaged), data_error);
  CHECK_THROWS_AS(symmetry_test(fit, {0.7}, SymmetryMode::Averaged), data_error);
  CHECK_THROWS_AS(symmetry_test(fit, {}, SymmetryMode::Averaged), data_error);
}

TEST_CASE("chi-squared survival function sanity") {
  CHECK(chisq_sf(1.0, 2) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(chisq_sf(0.0, 3) == doctest::Approx(1.0));
  CHECK(chisq_sf(100.0, 2) < 1e-20);
}
