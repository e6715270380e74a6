#pragma once

#include "argox/ingest.hpp"

namespace argox {

struct IqrConfig {
    double upper_quantile = 0.999;
    double lower_quantile = 0.01;
    double sigma_mult = 3.0;
    int rolling_window_days = 7;
    int replacement_window_days = 3;

    void validate() const;
};

/// Drop queries whose mean frequency falls strictly below the median of all
/// queries' mean frequencies. The rule runs independently at each geo level
/// (nation / region / state, series pooled within the level); a query is
/// kept when it survives at any level. At least one query always survives.
QueryPanel prune_low_volume(const QueryPanel& panel);

/// Overwrite outliers with the trailing 3-day mean, single left-to-right
/// pass. Large outliers must exceed both the whole-series upper quantile
/// (computed once on the input) and the trailing-week mean plus
/// sigma_mult standard deviations (both on post-replacement values);
/// small outliers only need to fall below the lower quantile. The first
/// replacement_window_days days are never modified.
DailySeries iqr_filter(const DailySeries& series, const IqrConfig& cfg);

/// iqr_filter over every (geo, query) series in the panel.
QueryPanel iqr_filter_panel(const QueryPanel& panel, const IqrConfig& cfg);

/// Blend sparse state series with their regional aggregate:
/// state <- 2/3 state + 1/3 region, datewise. Region/nation unchanged.
QueryPanel enrich_states(const QueryPanel& panel);

}  // namespace argox
