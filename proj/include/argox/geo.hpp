#pragma once

#include <string>
#include <vector>

namespace argox {

enum class GeoLevel { Nation, Region, State };

/// Geographic identity: "US", "R01".."R10", or a two-letter state code
/// (50 states plus DC).
struct GeoId {
    GeoLevel level;
    std::string code;

    bool operator==(const GeoId&) const = default;
    auto operator<=>(const GeoId&) const = default;

    static GeoId nation() { return {GeoLevel::Nation, "US"}; }
    static GeoId region(const std::string& code) { return {GeoLevel::Region, code}; }
    static GeoId state(const std::string& code) { return {GeoLevel::State, code}; }
};

/// State -> region assignment. The built-in table is the standard federal
/// ten-region grouping; load_overrides replaces it wholesale from a CSV
/// with header `state,region`.
class RegionTable {
public:
    RegionTable();  // built-in assignment

    static RegionTable load_overrides(const std::string& csv_path);

    /// Region containing the state. Throws NotAState for unknown codes.
    GeoId region_of(const GeoId& state) const;

    const std::vector<std::string>& state_codes() const { return states_; }    // 51, sorted
    const std::vector<std::string>& region_codes() const { return regions_; }  // R01..R10
    std::vector<std::string> members_of(const std::string& region_code) const;

    bool is_state(const std::string& code) const;

private:
    std::vector<std::string> states_;
    std::vector<std::string> regions_;
    std::vector<std::string> region_by_state_;  // parallel to states_
};

}  // namespace argox
