#include "argox/solver.hpp"

#include "../common/oracles.hpp"
#include "argox/errors.hpp"
#include "doctest.h"

using namespace argox;

TEST_CASE("lambda zero reproduces least squares on a full-rank design") {
    oracle::Rng rng(11);
    auto inst = oracle::random_lasso_instance(rng, 30, 6);
    FitResult ls = ols_fit(inst.design, inst.y);
    FitResult l0 = lasso_fit(inst.design, inst.y, 0.0);
    CHECK(l0.intercept == doctest::Approx(ls.intercept).epsilon(1e-6));
    for (long j = 0; j < inst.design.cols(); ++j)
        CHECK(l0.beta[j] ==
              doctest::Approx(ls.beta[j]).epsilon(1e-6).scale(std::abs(ls.beta[j]) + 1.0));
}

TEST_CASE("lambda at or above lambda_max kills every coefficient") {
    oracle::Rng rng(12);
    auto inst = oracle::random_lasso_instance(rng);
    double lmax = lasso_lambda_max(inst.design, inst.y);
    for (double lambda : {lmax, 2.0 * lmax}) {
        FitResult fit = lasso_fit(inst.design, inst.y, lambda);
        CHECK(fit.nonzero == 0);
        CHECK(fit.intercept == doctest::Approx(inst.y.mean()).epsilon(1e-12));
    }
}

TEST_CASE("objective matches the proximal-gradient oracle") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        oracle::Rng rng(100 + seed);
        auto inst = oracle::random_lasso_instance(rng);
        double lmax = lasso_lambda_max(inst.design, inst.y);
        for (double frac : {0.5, 0.05, 0.005}) {
            double lambda = frac * lmax;
            FitResult fit = lasso_fit(inst.design, inst.y, lambda);
            double reference = oracle::fista_lasso_objective(inst.design, inst.y, lambda);
            CHECK(fit.objective ==
                  doctest::Approx(reference).epsilon(1e-6).scale(std::abs(reference) + 1.0));
            CHECK(oracle::lasso_kkt_residual(inst.design, inst.y, fit) < 1e-6);
        }
    }
}

TEST_CASE("objective is non-increasing across coordinate sweeps") {
    oracle::Rng rng(13);
    auto inst = oracle::random_lasso_instance(rng);
    double lambda = 0.1 * lasso_lambda_max(inst.design, inst.y);
    LassoDiagnostics diag;
    lasso_fit(inst.design, inst.y, lambda, &diag);
    REQUIRE(!diag.objective_per_sweep.empty());
    for (size_t i = 1; i < diag.objective_per_sweep.size(); ++i)
        CHECK(diag.objective_per_sweep[i] <= diag.objective_per_sweep[i - 1] + 1e-12);
}

TEST_CASE("l1 norm shrinks as lambda grows") {
    oracle::Rng rng(14);
    auto inst = oracle::random_lasso_instance(rng);
    double lmax = lasso_lambda_max(inst.design, inst.y);
    double prev_norm = std::numeric_limits<double>::infinity();
    for (double frac : {0.001, 0.01, 0.1, 0.4, 0.9}) {
        FitResult fit = lasso_fit(inst.design, inst.y, frac * lmax);
        Eigen::VectorXd beta_std = fit.beta;
        for (long j = 0; j < beta_std.size(); ++j) beta_std[j] *= inst.design.col_std[j];
        double norm = beta_std.lpNorm<1>();
        CHECK(norm <= prev_norm + 1e-9);
        prev_norm = norm;
    }
}

TEST_CASE("fitted values are invariant to raw column rescaling") {
    oracle::Rng rng(15);
    auto inst = oracle::random_lasso_instance(rng, 25, 6);
    double lambda = 0.05 * lasso_lambda_max(inst.design, inst.y);
    FitResult base = lasso_fit(inst.design, inst.y, lambda);

    DesignMatrix scaled = inst.design;
    scaled.X.col(1) *= 37.5;
    scaled.finalize();
    FitResult rescaled = lasso_fit(scaled, inst.y, lambda);

    for (long i = 0; i < inst.design.rows(); ++i) {
        double f1 = base.intercept + inst.design.X.row(i).dot(base.beta);
        double f2 = rescaled.intercept + scaled.X.row(i).dot(rescaled.beta);
        CHECK(f1 == doctest::Approx(f2).epsilon(1e-8));
    }
}

TEST_CASE("zero-variance columns get coefficient zero") {
    oracle::Rng rng(16);
    const int n = 25, p = 5;
    DesignMatrix d;
    d.X.resize(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) d.X(i, j) = rng.normal();
    d.X.col(2).setConstant(4.2);
    for (int j = 0; j < p; ++j) d.names.push_back("x" + std::to_string(j));
    d.finalize();
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = d.X(i, 0) + rng.normal();
    FitResult fit = lasso_fit(d, y, 0.01);
    CHECK(fit.beta[2] == 0.0);
}

TEST_CASE("invalid inputs are rejected") {
    oracle::Rng rng(17);
    auto inst = oracle::random_lasso_instance(rng);
    CHECK_THROWS_AS(lasso_fit(inst.design, inst.y, -1.0), Error);
    Eigen::VectorXd bad = inst.y;
    bad[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(lasso_fit(inst.design, bad, 0.1), Error);
    DesignMatrix nan_design = inst.design;
    nan_design.X(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(nan_design.finalize(), Error);
}

TEST_CASE("cross-validation recovers a planted linear signal") {
    oracle::Rng rng(18);
    const int n = 60, p = 8;
    DesignMatrix d;
    d.X.resize(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) d.X(i, j) = rng.normal();
    for (int j = 0; j < p; ++j) d.names.push_back("x" + std::to_string(j));
    d.finalize();
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = 3.0 * d.X(i, 2) + 0.05 * rng.normal();
    double lambda = cross_validate_lambda(d, y);
    FitResult fit = lasso_fit(d, y, lambda);
    CHECK(fit.beta[2] != 0.0);
    CHECK(std::abs(fit.beta[2] - 3.0) < 0.3);
}

TEST_CASE("cross-validation on pure noise prefers heavy penalties") {
    int top_decile = 0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        oracle::Rng rng(300 + static_cast<std::uint64_t>(s));
        const int n = 48, p = 10;
        DesignMatrix d;
        d.X.resize(n, p);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < p; ++j) d.X(i, j) = rng.normal();
        for (int j = 0; j < p; ++j) d.names.push_back("x" + std::to_string(j));
        d.finalize();
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) y[i] = rng.normal();

        DesignMatrix train;
        train.X = d.X.topRows(n - n / 4);
        train.names = d.names;
        train.finalize();
        double lmax = lasso_lambda_max(train, y.head(n - n / 4));
        double chosen = cross_validate_lambda(d, y);
        // Top decile of the grid = largest 10 of 100 log-spaced values.
        double cutoff = lmax * std::pow(1e-4, 9.0 / 99.0);
        if (chosen >= cutoff * (1.0 - 1e-12)) ++top_decile;
    }
    CHECK(top_decile >= seeds / 2 + 1);  // median selection in the top decile
}

TEST_CASE("cross-validation degenerate grids and row minimums") {
    oracle::Rng rng(19);
    auto inst = oracle::random_lasso_instance(rng, 40, 6);
    if (inst.design.rows() < 20) inst = oracle::random_lasso_instance(rng, 40, 6);
    while (inst.design.rows() < 20) inst = oracle::random_lasso_instance(rng, 40, 6);
    DesignMatrix train;
    train.X = inst.design.X.topRows(inst.design.rows() - inst.design.rows() / 4);
    train.names = inst.design.names;
    train.finalize();
    double lmax = lasso_lambda_max(train, inst.y.head(train.rows()));
    CHECK(cross_validate_lambda(inst.design, inst.y, 1) == doctest::Approx(lmax));

    DesignMatrix small;
    small.X = inst.design.X.topRows(10);
    small.names = inst.design.names;
    small.finalize();
    CHECK_THROWS_AS(cross_validate_lambda(small, inst.y.head(10)), Error);
}

TEST_CASE("ols recovers an exact line") {
    DesignMatrix d;
    const int n = 12;
    d.X.resize(n, 1);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        d.X(i, 0) = i * 0.7 - 2.0;
        y[i] = 3.0 * d.X(i, 0) + 2.0;
    }
    d.names = {"x"};
    d.finalize();
    FitResult fit = ols_fit(d, y);
    CHECK(fit.intercept == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(fit.beta[0] == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("ols rejects constant columns") {
    DesignMatrix d;
    d.X.resize(10, 1);
    d.X.setConstant(5.0);
    d.names = {"x"};
    d.finalize();
    Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(10, 0, 9);
    try {
        ols_fit(d, y);
        FAIL("expected SingularDesign");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SingularDesign);
    }
}

TEST_CASE("ols residuals are orthogonal to the columns") {
    oracle::Rng rng(20);
    const int n = 100, p = 5;
    DesignMatrix d;
    d.X.resize(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) d.X(i, j) = rng.normal() * (j + 1);
    for (int j = 0; j < p; ++j) d.names.push_back("x" + std::to_string(j));
    d.finalize();
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = rng.normal() * 2.0 + d.X(i, 0);
    FitResult fit = ols_fit(d, y);
    Eigen::VectorXd resid = y;
    for (int i = 0; i < n; ++i) resid[i] -= fit.intercept + d.X.row(i).dot(fit.beta);
    for (int j = 0; j < p; ++j)
        CHECK(std::abs(d.X.col(j).dot(resid)) / n < 1e-8 * std::max(1.0, y.norm()));
}
