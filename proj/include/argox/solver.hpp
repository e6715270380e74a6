#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace argox {

/// Regression design with per-column standardization stats. Columns with
/// zero variance are flagged and receive coefficient zero in every fit.
struct DesignMatrix {
    Eigen::MatrixXd X;
    std::vector<std::string> names;

    Eigen::VectorXd col_mean;
    Eigen::VectorXd col_std;  // population std (1/n)
    std::vector<bool> zero_std;

    long rows() const { return X.rows(); }
    long cols() const { return X.cols(); }

    /// Compute stats and validate (no NaN). Must be called after filling X.
    void finalize();
};

struct FitResult {
    double intercept = 0.0;
    Eigen::VectorXd beta;  // original scale
    double lambda = 0.0;
    double objective = 0.0;  // (1/2n)*RSS + lambda*||beta_std||_1
    int nonzero = 0;
};

struct LassoDiagnostics {
    std::vector<double> objective_per_sweep;
    int sweeps = 0;
};

/// Smallest penalty that zeroes every coefficient:
/// max_j |x_j^T (y - ybar)| / n on standardized columns.
double lasso_lambda_max(const DesignMatrix& design, const Eigen::VectorXd& y);

/// Cyclic coordinate descent with soft-thresholding on standardized
/// columns, unpenalized intercept, objective
/// (1/2n)*sum((y - mu - X beta)^2) + lambda*||beta_std||_1.
/// Converged when the largest standardized-coefficient change in a sweep
/// falls below 1e-7 (at most 10,000 sweeps).
FitResult lasso_fit(const DesignMatrix& design, const Eigen::VectorXd& y, double lambda,
                    LassoDiagnostics* diag = nullptr);

/// Rolling-origin holdout: fit on the first 75% of rows (time order),
/// validate on the last 25%, over a log-spaced grid of `grid_size` values
/// from lambda_max down to 1e-4*lambda_max. Ties go to the larger lambda.
double cross_validate_lambda(const DesignMatrix& design, const Eigen::VectorXd& y,
                             int grid_size = 100);

/// Exact least squares on standardized columns via normal equations with
/// 1e-10 ridge jitter on the Gram diagonal. Zero-variance columns make the
/// design singular here (unlike lasso_fit, which zeroes them).
FitResult ols_fit(const DesignMatrix& design, const Eigen::VectorXd& y);

}  // namespace argox
