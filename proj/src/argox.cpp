#include "argox/argox.hpp"

#include <algorithm>
#include <set>

#include "argox/errors.hpp"

namespace argox {

StateGrouping StateGrouping::make(const std::vector<std::string>& states,
                                  const std::vector<std::string>& alone_states,
                                  const std::vector<std::string>& excluded_from_constraint) {
    std::set<std::string> present(states.begin(), states.end());
    std::set<std::string> alone_set, excluded_set;
    for (const auto& s : alone_states)
        if (present.count(s)) alone_set.insert(s);
    for (const auto& s : excluded_from_constraint)
        if (present.count(s)) excluded_set.insert(s);

    StateGrouping g;
    for (const auto& s : states) {
        (alone_set.count(s) ? g.alone : g.joint).push_back(s);
        if (!excluded_set.count(s)) g.constrained.push_back(s);
    }
    return g;
}

AnchorForecasts compute_anchor_forecasts(const ArgoContext& ctx, const RegionTable& regions,
                                         const std::vector<std::string>& states, Date anchor) {
    AnchorForecasts out;
    out.anchor = anchor;
    for (const auto& s : states) {
        GeoId geo = GeoId::state(s);
        out.gt_weekly[s] = weekly_aggregate(daily_forecast(ctx, geo, anchor, FeatureMode::GtOnly));
        out.argo_state_weekly[s] =
            weekly_aggregate(daily_forecast(ctx, geo, anchor, FeatureMode::Full));
    }
    std::set<std::string> region_codes;
    for (const auto& s : states) region_codes.insert(regions.region_of(GeoId::state(s)).code);
    for (const auto& r : region_codes)
        out.gt_weekly[r] =
            weekly_aggregate(daily_forecast(ctx, GeoId::region(r), anchor, FeatureMode::GtOnly));
    out.nat_weekly =
        weekly_aggregate(daily_forecast(ctx, GeoId::nation(), anchor, FeatureMode::Full));
    return out;
}

WeeklyEstimateBundle first_step_estimates(const AnchorForecasts& forecasts,
                                          const SurveillancePanel& input,
                                          const RegionTable& regions,
                                          const std::vector<std::string>& states, int horizon) {
    if (horizon < 1 || horizon > 4) fail(ErrorKind::ConfigError, "horizon must be in 1..4");
    const auto h = static_cast<size_t>(horizon - 1);
    const long n = static_cast<long>(states.size());

    WeeklyEstimateBundle b;
    b.anchor = forecasts.anchor;
    b.horizon = horizon;
    b.states = states;
    b.gt_state.resize(n);
    b.gt_region.resize(n);
    b.nat.resize(n);
    b.y_prev.resize(n);
    b.z_prev.resize(n);

    EpiWeek latest = week_of(forecasts.anchor);
    EpiWeek before = week_at(latest.index - 1);
    for (long i = 0; i < n; ++i) {
        const auto& code = states[static_cast<size_t>(i)];
        GeoId geo = GeoId::state(code);
        b.gt_state[i] = forecasts.gt_weekly.at(code)[h];
        b.gt_region[i] = forecasts.gt_weekly.at(regions.region_of(geo).code)[h];
        b.nat[i] = forecasts.nat_weekly[h];
        b.y_prev[i] = input.deaths(geo).weekly_sum(latest);
        b.z_prev[i] = b.y_prev[i] - input.deaths(geo).weekly_sum(before);
    }
    return b;
}

Eigen::VectorXd stack_predictors(const WeeklyEstimateBundle& bundle,
                                 const std::vector<int>& idx) {
    const long k = static_cast<long>(idx.size());
    Eigen::VectorXd w(4 * k);
    for (long i = 0; i < k; ++i) {
        int j = idx[static_cast<size_t>(i)];
        w[i] = bundle.z_prev[j];
        w[k + i] = bundle.gt_state[j] - bundle.y_prev[j];
        w[2 * k + i] = bundle.gt_region[j] - bundle.y_prev[j];
        w[3 * k + i] = bundle.nat[j] - bundle.y_prev[j];
    }
    return w;
}

Eigen::Vector3d alone_predictors(const WeeklyEstimateBundle& bundle, int state_idx) {
    return {bundle.z_prev[state_idx], bundle.gt_state[state_idx] - bundle.y_prev[state_idx],
            bundle.nat[state_idx] - bundle.y_prev[state_idx]};
}

CovStats CovStats::from_pairs(
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& zw, double epsilon) {
    if (zw.size() < 2) fail(ErrorKind::InsufficientHistory, "covariance needs at least 2 pairs");
    const long m = static_cast<long>(zw.size());
    const long nz = zw.front().first.size();
    const long nw = zw.front().second.size();

    CovStats c;
    c.epsilon = epsilon;
    c.window = static_cast<int>(m);
    c.mu_z = Eigen::VectorXd::Zero(nz);
    c.mu_w = Eigen::VectorXd::Zero(nw);
    for (const auto& [z, w] : zw) {
        c.mu_z += z;
        c.mu_w += w;
    }
    c.mu_z /= static_cast<double>(m);
    c.mu_w /= static_cast<double>(m);

    c.sigma_zz = Eigen::MatrixXd::Zero(nz, nz);
    c.sigma_zw = Eigen::MatrixXd::Zero(nz, nw);
    c.sigma_ww = Eigen::MatrixXd::Zero(nw, nw);
    for (const auto& [z, w] : zw) {
        Eigen::VectorXd zc = z - c.mu_z;
        Eigen::VectorXd wc = w - c.mu_w;
        c.sigma_zz.noalias() += zc * zc.transpose();
        c.sigma_zw.noalias() += zc * wc.transpose();
        c.sigma_ww.noalias() += wc * wc.transpose();
    }
    double ddof = static_cast<double>(m - 1);
    c.sigma_zz /= ddof;
    c.sigma_zw /= ddof;
    c.sigma_ww /= ddof;
    return c;
}

Eigen::MatrixXd CovStats::shrunk_ww() const {
    Eigen::MatrixXd h = shrink_mix * sigma_ww;
    h.diagonal() += (1.0 - shrink_mix) * sigma_ww.diagonal();
    h.diagonal().array() += epsilon;
    return h;
}

namespace {

Eigen::LLT<Eigen::MatrixXd> factor_shrunk(const CovStats& cov) {
    if (cov.sigma_ww.trace() <= 0.0)
        fail(ErrorKind::NumericalFailure, "predictor covariance is identically zero");
    Eigen::LLT<Eigen::MatrixXd> llt(cov.shrunk_ww());
    if (llt.info() != Eigen::Success)
        fail(ErrorKind::NumericalFailure, "shrunk predictor covariance is not positive definite");
    return llt;
}

}  // namespace

Eigen::VectorXd blp_shrunk_increment(const CovStats& cov, const Eigen::VectorXd& w_now) {
    auto llt = factor_shrunk(cov);
    Eigen::VectorXd s = llt.solve(w_now - cov.mu_w);
    return cov.mu_z + cov.shrink_mix * cov.sigma_zw * s;
}

ConstrainedIncrement blp_constrained_increment(const CovStats& cov, const Eigen::VectorXd& w_now,
                                               double y_tilde) {
    auto llt = factor_shrunk(cov);
    Eigen::VectorXd w_tilde = w_now - cov.mu_w;
    Eigen::VectorXd s = llt.solve(w_tilde);
    const double quad = w_tilde.dot(s);
    const auto n = static_cast<double>(cov.mu_z.size());
    if (quad == 0.0)
        fail(ErrorKind::ConstraintDegenerate,
             "demeaned predictor annihilated by the shrunk covariance");

    Eigen::VectorXd base = cov.shrink_mix * cov.sigma_zw * s;  // unconstrained shrunk BLP term
    const double multiplier_half = (y_tilde - base.sum()) / (n * quad);

    ConstrainedIncrement out;
    out.z_hat = cov.mu_z + base +
                Eigen::VectorXd::Constant(cov.mu_z.size(), multiplier_half * quad);
    out.lagrange = 2.0 * multiplier_half;
    return out;
}

std::vector<double> blp_joint(const WeeklyEstimateBundle& bundle, const CovStats& cov,
                              const std::vector<int>& idx) {
    Eigen::VectorXd z = blp_shrunk_increment(cov, stack_predictors(bundle, idx));
    std::vector<double> out(idx.size());
    for (size_t i = 0; i < idx.size(); ++i)
        out[i] = bundle.y_prev[idx[i]] + z[static_cast<long>(i)];
    return out;
}

double blp_alone(const WeeklyEstimateBundle& bundle, const CovStats& cov3, int state_idx) {
    Eigen::VectorXd z = blp_shrunk_increment(cov3, alone_predictors(bundle, state_idx));
    return bundle.y_prev[state_idx] + z[0];
}

ConstrainedPrediction blp_nat_constrained(const WeeklyEstimateBundle& bundle, const CovStats& cov,
                                          const std::vector<int>& idx, double national_target) {
    Eigen::VectorXd w = stack_predictors(bundle, idx);
    double y_prev_sum = 0.0;
    for (int j : idx) y_prev_sum += bundle.y_prev[j];
    double y_tilde = national_target - y_prev_sum - cov.mu_z.sum();

    ConstrainedIncrement inc = blp_constrained_increment(cov, w, y_tilde);
    ConstrainedPrediction out;
    out.lagrange = inc.lagrange;
    out.y_hat.resize(idx.size());
    for (size_t i = 0; i < idx.size(); ++i)
        out.y_hat[i] = bundle.y_prev[idx[i]] + inc.z_hat[static_cast<long>(i)];
    return out;
}

double multiple_correlation(const SurveillancePanel& panel, const RegionTable& regions,
                            const GeoId& state, int last_week, int n_weeks) {
    if (n_weeks < 10)
        fail(ErrorKind::InsufficientHistory, "multiple correlation needs at least 10 weeks");
    if (state.level != GeoLevel::State) fail(ErrorKind::NotAState, state.code);

    auto increments = [&](const GeoId& geo) {
        Eigen::VectorXd z(n_weeks);
        for (int k = 0; k < n_weeks; ++k) {
            EpiWeek w = week_at(last_week - n_weeks + 1 + k);
            z[k] = panel.deaths(geo).weekly_sum(w) -
                   panel.deaths(geo).weekly_sum(week_at(w.index - 1));
        }
        return z;
    };

    Eigen::VectorXd y = increments(state);
    std::string own_region = regions.region_of(state).code;

    std::vector<Eigen::VectorXd> cols;
    cols.push_back(increments(GeoId::nation()));
    for (const auto& r : regions.region_codes())
        if (r != own_region && panel.has(GeoId::region(r)))
            cols.push_back(increments(GeoId::region(r)));
    for (const auto& s : panel.state_codes())
        if (s != state.code) cols.push_back(increments(GeoId::state(s)));

    const long n = n_weeks;
    const long p = static_cast<long>(cols.size());
    Eigen::MatrixXd x(n, p);
    for (long j = 0; j < p; ++j) x.col(j) = cols[static_cast<size_t>(j)];

    Eigen::VectorXd yc = y.array() - y.mean();
    Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
    double tss = yc.squaredNorm();
    if (tss == 0.0) return 0.0;

    Eigen::MatrixXd gram = xc.transpose() * xc;
    gram.diagonal().array() += 1e-6;
    Eigen::VectorXd b = gram.ldlt().solve(xc.transpose() * yc);
    double rss = (yc - xc * b).squaredNorm();
    double r2 = 1.0 - rss / tss;
    return std::sqrt(std::clamp(r2, 0.0, 1.0));
}

}  // namespace argox
