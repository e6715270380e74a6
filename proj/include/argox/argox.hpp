#pragma once

#include <Eigen/Dense>
#include <map>

#include "argox/argo.hpp"

namespace argox {

/// Joint / stand-alone / sum-constrained state partitions for the second
/// step. Defaults follow the shipped grouping (six stand-alone states;
/// HI and VT excluded from the sum constraint), intersected with the
/// states actually present.
struct StateGrouping {
    std::vector<std::string> joint;
    std::vector<std::string> alone;
    std::vector<std::string> constrained;

    static StateGrouping make(const std::vector<std::string>& states,
                              const std::vector<std::string>& alone_states,
                              const std::vector<std::string>& excluded_from_constraint);
};

inline const std::vector<std::string> kDefaultAloneStates = {"AK", "HI", "DE",
                                                             "KY", "VT", "ME"};
inline const std::vector<std::string> kDefaultConstraintExclusions = {"HI", "VT"};

/// First-step weekly aggregates at one anchor: search-only state/region
/// estimates, the full national estimate, and full per-state estimates.
struct AnchorForecasts {
    Date anchor{};
    std::map<std::string, std::array<double, 4>> gt_weekly;  // states and regions
    std::array<double, 4> nat_weekly{};
    std::map<std::string, std::array<double, 4>> argo_state_weekly;
};

/// Inputs to one second-step prediction: all vectors share `states` order.
struct WeeklyEstimateBundle {
    Date anchor{};
    int horizon = 1;                  // weeks ahead
    std::vector<std::string> states;
    Eigen::VectorXd gt_state;    // search-only state estimates for the target week
    Eigen::VectorXd gt_region;   // regional estimates broadcast to member states
    Eigen::VectorXd nat;         // national estimate broadcast
    Eigen::VectorXd y_prev;      // latest fully observed week
    Eigen::VectorXd z_prev;      // y_prev minus the week before
};

AnchorForecasts compute_anchor_forecasts(const ArgoContext& ctx, const RegionTable& regions,
                                         const std::vector<std::string>& states, Date anchor);

WeeklyEstimateBundle first_step_estimates(const AnchorForecasts& forecasts,
                                          const SurveillancePanel& input,
                                          const RegionTable& regions,
                                          const std::vector<std::string>& states, int horizon);

/// Predictors for the states at `idx`, stacked
/// (Z_prev, gt - y_prev, reg - y_prev, nat - y_prev).
Eigen::VectorXd stack_predictors(const WeeklyEstimateBundle& bundle, const std::vector<int>& idx);

/// Stand-alone variant: the regional block is dropped.
Eigen::Vector3d alone_predictors(const WeeklyEstimateBundle& bundle, int state_idx);

/// Empirical moments of (Z, W) pairs over a trailing window.
struct CovStats {
    Eigen::VectorXd mu_z, mu_w;
    Eigen::MatrixXd sigma_zz, sigma_zw, sigma_ww;
    double epsilon = 1e-8;
    double shrink_mix = 0.5;  // weight on the full covariance vs its diagonal
    int window = 0;

    static CovStats from_pairs(const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& zw,
                               double epsilon = 1e-8);

    /// Shrunk predictor covariance mix*sigma_ww + (1-mix)*D_ww + eps*I.
    Eigen::MatrixXd shrunk_ww() const;
};

/// Best linear predictor with ridge-inspired shrinkage:
/// Zhat = mu_z + mix*sigma_zw * shrunk_ww^{-1} * (w - mu_w).
/// The default half/half mix halves both covariance blocks; shrink_mix = 1
/// with epsilon = 0 recovers the textbook best linear predictor.
Eigen::VectorXd blp_shrunk_increment(const CovStats& cov, const Eigen::VectorXd& w_now);

struct ConstrainedIncrement {
    Eigen::VectorXd z_hat;
    double lagrange = 0.0;  // multiplier of the sum constraint
};

/// Closed-form sum-constrained variant of blp_shrunk_increment:
/// 1^T z_hat = y_tilde + 1^T mu_z exactly.
ConstrainedIncrement blp_constrained_increment(const CovStats& cov, const Eigen::VectorXd& w_now,
                                               double y_tilde);

/// Second-step predictions y_hat = y_prev + Zhat for the given states.
std::vector<double> blp_joint(const WeeklyEstimateBundle& bundle, const CovStats& cov,
                              const std::vector<int>& idx);

double blp_alone(const WeeklyEstimateBundle& bundle, const CovStats& cov3, int state_idx);

struct ConstrainedPrediction {
    std::vector<double> y_hat;
    double lagrange = 0.0;
};

/// Constrained second step: predictions over `idx` sum to national_target.
ConstrainedPrediction blp_nat_constrained(const WeeklyEstimateBundle& bundle, const CovStats& cov,
                                          const std::vector<int>& idx, double national_target);

/// Multiple correlation of a state's weekly increments against the nation,
/// the other regions, and the other states over `n_weeks` weeks ending at
/// week index `last_week`. Ridge jitter 1e-6 (more predictors than weeks).
double multiple_correlation(const SurveillancePanel& panel, const RegionTable& regions,
                            const GeoId& state, int last_week, int n_weeks);

}  // namespace argox
