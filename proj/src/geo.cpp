#include "argox/geo.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "argox/errors.hpp"

namespace argox {

namespace {

// Standard ten-region federal assignment, 50 states + DC.
const std::pair<const char*, const char*> kStateRegion[] = {
    {"CT", "R01"}, {"ME", "R01"}, {"MA", "R01"}, {"NH", "R01"}, {"RI", "R01"}, {"VT", "R01"},
    {"NJ", "R02"}, {"NY", "R02"},
    {"DE", "R03"}, {"DC", "R03"}, {"MD", "R03"}, {"PA", "R03"}, {"VA", "R03"}, {"WV", "R03"},
    {"AL", "R04"}, {"FL", "R04"}, {"GA", "R04"}, {"KY", "R04"}, {"MS", "R04"}, {"NC", "R04"},
    {"SC", "R04"}, {"TN", "R04"},
    {"IL", "R05"}, {"IN", "R05"}, {"MI", "R05"}, {"MN", "R05"}, {"OH", "R05"}, {"WI", "R05"},
    {"AR", "R06"}, {"LA", "R06"}, {"NM", "R06"}, {"OK", "R06"}, {"TX", "R06"},
    {"IA", "R07"}, {"KS", "R07"}, {"MO", "R07"}, {"NE", "R07"},
    {"CO", "R08"}, {"MT", "R08"}, {"ND", "R08"}, {"SD", "R08"}, {"UT", "R08"}, {"WY", "R08"},
    {"AZ", "R09"}, {"CA", "R09"}, {"HI", "R09"}, {"NV", "R09"},
    {"AK", "R10"}, {"ID", "R10"}, {"OR", "R10"}, {"WA", "R10"},
};

}  // namespace

RegionTable::RegionTable() {
    std::map<std::string, std::string> sorted;
    for (auto [state, region] : kStateRegion) sorted.emplace(state, region);
    for (auto& [state, region] : sorted) {
        states_.push_back(state);
        region_by_state_.push_back(region);
    }
    for (int r = 1; r <= 10; ++r) {
        char buf[4];
        std::snprintf(buf, sizeof(buf), "R%02d", r);
        regions_.push_back(buf);
    }
}

RegionTable RegionTable::load_overrides(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) fail(ErrorKind::IoError, "cannot open region override " + csv_path);

    std::map<std::string, std::string> rows;
    std::string line;
    std::getline(in, line);  // header: state,region
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            fail(ErrorKind::ParseError,
                 csv_path + ":" + std::to_string(lineno) + ": expected state,region");
        rows[line.substr(0, comma)] = line.substr(comma + 1);
    }

    RegionTable table;
    table.states_.clear();
    table.region_by_state_.clear();
    std::vector<std::string> regions;
    for (auto& [state, region] : rows) {
        table.states_.push_back(state);
        table.region_by_state_.push_back(region);
        regions.push_back(region);
    }
    std::sort(regions.begin(), regions.end());
    regions.erase(std::unique(regions.begin(), regions.end()), regions.end());
    table.regions_ = std::move(regions);
    return table;
}

GeoId RegionTable::region_of(const GeoId& state) const {
    if (state.level != GeoLevel::State)
        fail(ErrorKind::NotAState, "'" + state.code + "' is not a state-level geo");
    auto it = std::lower_bound(states_.begin(), states_.end(), state.code);
    if (it == states_.end() || *it != state.code)
        fail(ErrorKind::NotAState, "unknown state code '" + state.code + "'");
    return GeoId::region(region_by_state_[it - states_.begin()]);
}

std::vector<std::string> RegionTable::members_of(const std::string& region_code) const {
    std::vector<std::string> out;
    for (size_t i = 0; i < states_.size(); ++i)
        if (region_by_state_[i] == region_code) out.push_back(states_[i]);
    return out;
}

bool RegionTable::is_state(const std::string& code) const {
    return std::binary_search(states_.begin(), states_.end(), code);
}

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NotAState: return "NotAState";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::OrderError: return "OrderError";
        case ErrorKind::GapError: return "GapError";
        case ErrorKind::ValueError: return "ValueError";
        case ErrorKind::EmptyPanel: return "EmptyPanel";
        case ErrorKind::SeriesTooShort: return "SeriesTooShort";
        case ErrorKind::InsufficientHistory: return "InsufficientHistory";
        case ErrorKind::InvalidPenalty: return "InvalidPenalty";
        case ErrorKind::InvalidInput: return "InvalidInput";
        case ErrorKind::InsufficientRows: return "InsufficientRows";
        case ErrorKind::SingularDesign: return "SingularDesign";
        case ErrorKind::NumericalFailure: return "NumericalFailure";
        case ErrorKind::ConstraintDegenerate: return "ConstraintDegenerate";
        case ErrorKind::IncompleteWeek: return "IncompleteWeek";
        case ErrorKind::EmptyEvaluation: return "EmptyEvaluation";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::IoError: return "IoError";
    }
    return "Error";
}

}  // namespace argox
