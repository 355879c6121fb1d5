#pragma once

#include "agc/bounds.hpp"
#include "agc/experiments.hpp"
#include "agc/matrix.hpp"
#include "agc/training.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace agc {

using Json = nlohmann::ordered_json;

// Shortest round-trip representation; "nan" / "inf" / "-inf" otherwise.
std::string format_double(double v);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

std::string matrix_to_csv(const Matrix& m);
Matrix matrix_from_csv(const std::string& text);

inline constexpr const char* kSweepHeader =
    "scheme,family,m,epsilon,x_kind,x,mean_err,std_err,min_err,max_err,upper_bound,lower_bound,seed";

std::string sweep_row_csv(const SweepRow& r);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string train_csv(const std::vector<Trajectory>& runs);

struct PlotSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

// Standalone SVG 1.1 line chart: axes with ticks, legend, one polyline per
// series. Non-finite points are dropped.
std::string render_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<PlotSeries>& series);

// Reads config values while recording every value used (defaults included)
// into a resolved copy. Unknown keys are reported by finish().
class ConfigReader {
public:
    ConfigReader(const Json& doc, std::string where);

    bool has(const std::string& key) const;
    double number(const std::string& key);
    double number(const std::string& key, double fallback);
    long long integer(const std::string& key);
    long long integer(const std::string& key, long long fallback);
    std::uint64_t u64(const std::string& key, std::uint64_t fallback);
    bool boolean(const std::string& key, bool fallback);
    std::string string(const std::string& key);
    std::string string(const std::string& key, const std::string& fallback);
    std::vector<double> numbers(const std::string& key);
    std::vector<int> integers(const std::string& key);
    ConfigReader& child(const std::string& key);
    std::vector<ConfigReader*> children(const std::string& key);
    void put(const std::string& key, Json value);

    // Throws InvalidArgument for keys that were never read.
    void finish();
    // Resolved document, including children that were finished.
    Json resolved() const;

private:
    const Json& raw(const std::string& key) const;
    [[noreturn]] void bad(const std::string& key, const std::string& what) const;

    Json doc_;
    std::string where_;
    Json resolved_ = Json::object();
    std::vector<std::string> seen_;
    std::vector<std::pair<std::string, std::shared_ptr<ConfigReader>>> kids_;
    std::vector<std::pair<std::string, std::vector<std::shared_ptr<ConfigReader>>>> kid_lists_;
};

Json parse_json(const std::string& text, const std::string& where);

// Relative file paths inside specs resolve against base_dir.
AssignmentSpec parse_assignment(ConfigReader& r, const std::filesystem::path& base_dir);
SchemeSpec parse_scheme(ConfigReader& r);

// {"sets": [{"v": .., "set": [..]}, ...]} or a single {"v": .., "set": [..]}.
std::vector<DifferenceSet> load_difference_sets(const std::filesystem::path& path);
Json difference_sets_to_json(const std::vector<DifferenceSet>& sets);

Json report_to_json(const BoundReport& r);

}  // namespace agc
