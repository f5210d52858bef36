#include "support.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

namespace testing {

TempDir::TempDir() {
    std::random_device rd;
    for (;;) {
        auto candidate = fs::temp_directory_path() /
                         ("geosocial-test-" + std::to_string(rd()) + std::to_string(rd()));
        if (fs::create_directory(candidate)) {
            path_ = candidate;
            return;
        }
    }
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::string source_path(const std::string& relative) {
    return (fs::path(GEOSOCIAL_SOURCE_DIR) / relative).string();
}

std::string tool_path(const std::string& name) {
    return (fs::path(GEOSOCIAL_TOOLS_DIR) / name).string();
}

std::string places_csv() { return source_path("data/places.csv"); }

std::shared_ptr<const geosocial::ali::PlacesDataset> places() {
    static const auto dataset = [] {
        auto d = geosocial::ali::PlacesDataset::load(places_csv());
        if (!d) throw std::runtime_error("cannot load " + places_csv());
        return std::make_shared<const geosocial::ali::PlacesDataset>(std::move(*d));
    }();
    return dataset;
}

geosocial::Timestamp epoch() {
    return geosocial::Timestamp{std::chrono::sys_days{std::chrono::year{2020} / 1 / 1}};
}

std::shared_ptr<geosocial::ManualClock> manual_clock() {
    return std::make_shared<geosocial::ManualClock>(epoch());
}

geosocial::api::ServiceConfig test_config(const TempDir& dir) {
    geosocial::api::ServiceConfig c;
    c.bind_address = "127.0.0.1:0";
    c.db_path = dir.file("test.db");
    c.places_dataset_path = places_csv();
    c.pbkdf2_iterations = 1000;
    c.worker_threads = 4;
    return c;
}

geosocial::SignupFields signup_fields(const std::string& email, const std::string& first,
                                      const std::string& last) {
    geosocial::SignupFields f;
    f.first_name = first;
    f.last_name = last;
    f.email = email;
    f.password = "correct-horse";
    f.country = "Nigeria";
    f.gender = "female";
    f.date_of_birth = "1995-06-15";
    return f;
}

int run_command(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double oracle_cost(const std::vector<RangeObs>& ranges, const std::vector<BearingObs>& bearings,
                   const Vector2<double>& x) {
    double c = 0;
    for (const auto& r : ranges) {
        const double e = std::hypot(x.x() - r.anchor.x(), x.y() - r.anchor.y()) - r.range;
        c += e * e;
    }
    for (const auto& b : bearings) {
        double e = std::atan2(x.y() - b.anchor.y(), x.x() - b.anchor.x()) - b.bearing;
        e = std::remainder(e, 2 * std::numbers::pi);
        c += e * e;
    }
    return c;
}

GridResult grid_oracle(const std::vector<RangeObs>& ranges, const std::vector<BearingObs>& bearings,
                       Vector2<double> lo, Vector2<double> hi, double cell) {
    const auto nx = static_cast<Eigen::Index>(std::floor((hi.x() - lo.x()) / cell)) + 1;
    const auto ny = static_cast<Eigen::Index>(std::floor((hi.y() - lo.y()) / cell)) + 1;
    const Eigen::ArrayXd xs = Eigen::ArrayXd::LinSpaced(nx, 0, double(nx - 1)) * cell + lo.x();
    Eigen::ArrayXd cost(nx), dx(nx), e(nx);
    GridResult best{lo, std::numeric_limits<double>::infinity()};
    for (Eigen::Index j = 0; j < ny; ++j) {
        const double y = lo.y() + double(j) * cell;
        cost.setZero();
        for (const auto& r : ranges) {
            dx = xs - r.anchor.x();
            const double dy = y - r.anchor.y();
            e = (dx.square() + dy * dy).sqrt() - r.range;
            cost += e.square();
        }
        for (const auto& b : bearings) {
            const double dy = y - b.anchor.y();
            for (Eigen::Index i = 0; i < nx; ++i) {
                const double a = std::remainder(
                    std::atan2(dy, xs(i) - b.anchor.x()) - b.bearing, 2 * std::numbers::pi);
                cost(i) += a * a;
            }
        }
        Eigen::Index i;
        const double m = cost.minCoeff(&i);
        if (m < best.cost) best = {{xs(i), y}, m};
    }
    return best;
}

int unused_port() {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) return -1;
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    socklen_t len = sizeof addr;
    int port = -1;
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0 &&
        ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) == 0)
        port = ntohs(addr.sin_port);
    ::close(fd);
    return port;
}

}  // namespace testing
