#include "argox/solver.hpp"

#include <cmath>

#include "argox/errors.hpp"

namespace argox {

namespace {

constexpr double kTol = 1e-7;
constexpr int kMaxSweeps = 10000;

double soft_threshold(double z, double lambda) {
    if (z > lambda) return z - lambda;
    if (z < -lambda) return z + lambda;
    return 0.0;
}

// Standardized subproblem over the nonconstant columns.
struct Standardized {
    Eigen::MatrixXd Xs;            // n x a
    Eigen::VectorXd yc;            // centered y
    Eigen::VectorXd g;             // Xs^T yc / n
    Eigen::MatrixXd G;             // Xs^T Xs / n (unit diagonal)
    std::vector<long> active;      // original column indices
    double y_mean = 0.0;
    double yc_sq_over_n = 0.0;
};

Standardized standardize(const DesignMatrix& d, const Eigen::VectorXd& y) {
    const long n = d.rows();
    if (y.size() != n) fail(ErrorKind::InvalidInput, "y length does not match design rows");
    if (!y.allFinite()) fail(ErrorKind::InvalidInput, "NaN in response");

    Standardized s;
    for (long j = 0; j < d.cols(); ++j)
        if (!d.zero_std[static_cast<size_t>(j)]) s.active.push_back(j);

    s.y_mean = y.mean();
    s.yc = y.array() - s.y_mean;
    s.yc_sq_over_n = s.yc.squaredNorm() / static_cast<double>(n);

    const long a = static_cast<long>(s.active.size());
    s.Xs.resize(n, a);
    for (long k = 0; k < a; ++k) {
        long j = s.active[static_cast<size_t>(k)];
        s.Xs.col(k) = (d.X.col(j).array() - d.col_mean[j]) / d.col_std[j];
    }
    s.g = s.Xs.transpose() * s.yc / static_cast<double>(n);
    s.G.noalias() = s.Xs.transpose() * s.Xs / static_cast<double>(n);
    return s;
}

double objective_of(const Standardized& s, const Eigen::VectorXd& beta, const Eigen::VectorXd& q,
                    double lambda) {
    return 0.5 * (s.yc_sq_over_n - 2.0 * s.g.dot(beta) + beta.dot(q)) +
           lambda * beta.lpNorm<1>();
}

// In-place coordinate descent; beta and q = G*beta are kept consistent.
int descend(const Standardized& s, double lambda, Eigen::VectorXd& beta, Eigen::VectorXd& q,
            LassoDiagnostics* diag) {
    const long a = beta.size();
    int sweep = 0;
    for (; sweep < kMaxSweeps; ++sweep) {
        double max_change = 0.0;
        for (long j = 0; j < a; ++j) {
            double old = beta[j];
            double z = s.g[j] - q[j] + old;  // unit G diagonal
            double next = soft_threshold(z, lambda);
            if (next != old) {
                q.noalias() += (next - old) * s.G.col(j);
                beta[j] = next;
                max_change = std::max(max_change, std::abs(next - old));
            }
        }
        if (diag) diag->objective_per_sweep.push_back(objective_of(s, beta, q, lambda));
        if (max_change < kTol) break;
    }
    return sweep + 1;
}

// Map standardized coefficients back to the original scale.
void unstandardize(const DesignMatrix& d, const Standardized& s, const Eigen::VectorXd& beta_std,
                   Eigen::VectorXd& beta, double& intercept) {
    beta = Eigen::VectorXd::Zero(d.cols());
    for (size_t k = 0; k < s.active.size(); ++k) {
        long j = s.active[k];
        beta[j] = beta_std[static_cast<long>(k)] / d.col_std[j];
    }
    intercept = s.y_mean - beta.dot(d.col_mean);
}

FitResult assemble(const DesignMatrix& d, const Standardized& s, const Eigen::VectorXd& beta_std,
                   double lambda) {
    FitResult r;
    r.lambda = lambda;
    unstandardize(d, s, beta_std, r.beta, r.intercept);
    r.nonzero = static_cast<int>((beta_std.array() != 0.0).count());
    double rss = (s.yc - s.Xs * beta_std).squaredNorm();
    r.objective = rss / (2.0 * static_cast<double>(d.rows())) + lambda * beta_std.lpNorm<1>();
    return r;
}

}  // namespace

void DesignMatrix::finalize() {
    if (!X.allFinite()) fail(ErrorKind::InvalidInput, "NaN in design matrix");
    const auto n = static_cast<double>(X.rows());
    col_mean = X.colwise().mean();
    col_std.resize(X.cols());
    zero_std.assign(static_cast<size_t>(X.cols()), false);
    for (long j = 0; j < X.cols(); ++j) {
        col_std[j] = std::sqrt((X.col(j).array() - col_mean[j]).square().sum() / n);
        if (col_std[j] == 0.0) {
            zero_std[static_cast<size_t>(j)] = true;
            col_std[j] = 1.0;  // placeholder; column is excluded from fits
        }
    }
}

double lasso_lambda_max(const DesignMatrix& design, const Eigen::VectorXd& y) {
    Standardized s = standardize(design, y);
    return s.g.size() == 0 ? 0.0 : s.g.cwiseAbs().maxCoeff();
}

FitResult lasso_fit(const DesignMatrix& design, const Eigen::VectorXd& y, double lambda,
                    LassoDiagnostics* diag) {
    if (lambda < 0.0) fail(ErrorKind::InvalidPenalty, "lambda must be nonnegative");
    if (design.rows() < 2) fail(ErrorKind::InsufficientRows, "lasso needs at least 2 rows");

    Standardized s = standardize(design, y);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<long>(s.active.size()));
    Eigen::VectorXd q = Eigen::VectorXd::Zero(beta.size());
    int sweeps = descend(s, lambda, beta, q, diag);
    if (diag) diag->sweeps = sweeps;
    return assemble(design, s, beta, lambda);
}

double cross_validate_lambda(const DesignMatrix& design, const Eigen::VectorXd& y,
                             int grid_size) {
    const long n = design.rows();
    if (n < 20) fail(ErrorKind::InsufficientRows, "cross-validation needs at least 20 rows");
    if (grid_size < 1) fail(ErrorKind::ConfigError, "grid_size must be >= 1");

    const long n_val = std::max<long>(1, n / 4);
    const long n_train = n - n_val;

    DesignMatrix train;
    train.X = design.X.topRows(n_train);
    train.names = design.names;
    train.finalize();
    Eigen::VectorXd y_train = y.head(n_train);

    Standardized s = standardize(train, y_train);
    double lambda_max = s.g.size() == 0 ? 0.0 : s.g.cwiseAbs().maxCoeff();
    if (lambda_max == 0.0) return 0.0;  // no usable regressors; any penalty is equivalent

    std::vector<double> grid(static_cast<size_t>(grid_size));
    for (int i = 0; i < grid_size; ++i) {
        double frac = grid_size == 1 ? 0.0 : static_cast<double>(i) / (grid_size - 1);
        grid[static_cast<size_t>(i)] = lambda_max * std::pow(1e-4, frac);
    }

    const Eigen::MatrixXd X_val = design.X.bottomRows(n_val);
    const Eigen::VectorXd y_val = y.tail(n_val);

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<long>(s.active.size()));
    Eigen::VectorXd q = Eigen::VectorXd::Zero(beta.size());

    double best_lambda = grid.front();
    double best_mse = std::numeric_limits<double>::infinity();
    Eigen::VectorXd beta_orig;
    double intercept = 0.0;
    for (double lambda : grid) {  // descending; warm start carries over
        descend(s, lambda, beta, q, nullptr);
        unstandardize(train, s, beta, beta_orig, intercept);
        double mse = (y_val.array() - (X_val * beta_orig).array() - intercept).square().mean();
        if (mse < best_mse) {  // strict: ties keep the larger lambda
            best_mse = mse;
            best_lambda = lambda;
        }
    }
    return best_lambda;
}

FitResult ols_fit(const DesignMatrix& design, const Eigen::VectorXd& y) {
    for (bool z : design.zero_std)
        if (z) fail(ErrorKind::SingularDesign, "constant column in OLS design");
    if (design.rows() < design.cols() + 1)
        fail(ErrorKind::SingularDesign, "OLS needs more rows than columns");

    Standardized s = standardize(design, y);
    const long a = static_cast<long>(s.active.size());
    Eigen::MatrixXd gram = s.Xs.transpose() * s.Xs;
    gram.diagonal().array() += 1e-10;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success)
        fail(ErrorKind::SingularDesign, "Gram factorization failed");
    Eigen::VectorXd beta_std = ldlt.solve(s.Xs.transpose() * s.yc);
    if (!beta_std.allFinite()) fail(ErrorKind::SingularDesign, "non-finite OLS solution");

    // Jitter can mask exact collinearity; reject solutions that do not
    // actually satisfy the normal equations.
    Eigen::VectorXd resid = s.Xs.transpose() * (s.yc - s.Xs * beta_std);
    double scale = std::max(1.0, s.yc.norm());
    if (a > 0 && resid.lpNorm<Eigen::Infinity>() > 1e-6 * scale)
        fail(ErrorKind::SingularDesign, "design is rank deficient");

    return assemble(design, s, beta_std, 0.0);
}

}  // namespace argox
