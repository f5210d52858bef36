#pragma once

#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "geosocial/ali/places.hpp"
#include "geosocial/api/service.hpp"
#include "geosocial/common/clock.hpp"
#include "geosocial/geoloc/estimators.hpp"

namespace testing {

namespace fs = std::filesystem;
using geosocial::geoloc::Vector2;

// Removed with everything in it on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

std::string source_path(const std::string& relative);
std::string tool_path(const std::string& name);
std::string places_csv();
std::shared_ptr<const geosocial::ali::PlacesDataset> places();

// 2020-01-01T00:00:00Z
geosocial::Timestamp epoch();
std::shared_ptr<geosocial::ManualClock> manual_clock();

// Service config on a fresh database in dir, cheap password hashing.
geosocial::api::ServiceConfig test_config(const TempDir& dir);

geosocial::SignupFields signup_fields(const std::string& email,
                                      const std::string& first = "Ada",
                                      const std::string& last = "Obi");

// Runs a shell command and returns its exit status.
int run_command(const std::string& cmd);

// A loopback port that nothing listens on (bound, then released).
int unused_port();
std::string read_file(const std::string& path);

// Brute-force reference solver: evaluates the unweighted residual sum of
// squares on a regular grid and returns the best grid point and its cost.
struct RangeObs {
    Vector2<double> anchor;
    double range;
};
struct BearingObs {
    Vector2<double> anchor;
    double bearing;
};
struct GridResult {
    Vector2<double> point;
    double cost;
};
GridResult grid_oracle(const std::vector<RangeObs>& ranges, const std::vector<BearingObs>& bearings,
                       Vector2<double> lo, Vector2<double> hi, double cell);

// Independent cost used to compare against the oracle.
double oracle_cost(const std::vector<RangeObs>& ranges, const std::vector<BearingObs>& bearings,
                   const Vector2<double>& x);

}  // namespace testing
