#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyperball/hyperball.hpp"

namespace hyperball::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed CSV or JSON input.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal string that reads back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

/// Points as CSV with a mandatory header `x1,...,xn[,label]`.
struct CsvPoints {
  PointSet points;
  std::vector<int> labels;  // empty when the file has no label column
};

CsvPoints read_points_csv(std::istream& in, const std::string& origin = "<stream>");
CsvPoints read_points_csv(const std::filesystem::path& path);
void write_points_csv(std::ostream& out, const PointSet& points, const std::vector<int>* labels = nullptr);

/// One-column CSV with header `w`.
Eigen::VectorXd read_weights_csv(const std::filesystem::path& path);

/// Two-column CSV `iteration,value`.
void write_trace_csv(std::ostream& out, const std::vector<double>& trace);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

Json to_json(const Eigen::VectorXd& v);
Json to_json(const BallPoint& p);
Json to_json(const MoebiusComponent& c);
Json to_json(const MixtureModel& m);
Json to_json(const ExperimentSpec& spec);

BallPoint ball_point_from_json(const Json& j);
MoebiusComponent component_from_json(const Json& j);
MixtureModel mixture_from_json(const Json& j);
ExperimentSpec spec_from_json(const Json& j);

Json parse_json(const std::string& text, const std::string& origin);

}  // namespace hyperball::cli
