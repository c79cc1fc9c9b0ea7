#include "hyperball/cli/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace hyperball::cli {

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ParseError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

}  // namespace

CsvPoints read_points_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(origin + ": empty file, header expected");
  const auto header = split(line);
  int dim = 0;
  bool has_label = false;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto name = trim(header[c]);
    if (name == "label" && c + 1 == header.size()) {
      has_label = true;
    } else if (name == "x" + std::to_string(c + 1)) {
      ++dim;
    } else {
      throw ParseError(origin + ": bad header column '" + std::string(name) + "', expected x" +
                       std::to_string(c + 1));
    }
  }
  if (dim < 2) throw ParseError(origin + ": need at least two coordinate columns");

  std::vector<double> coords;
  std::vector<int> labels;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw ParseError(origin + ":" + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                       " columns, found " + std::to_string(cells.size()));
    }
    try {
      for (int k = 0; k < dim; ++k) coords.push_back(parse_double(cells[static_cast<std::size_t>(k)]));
      if (has_label) {
        const auto text = trim(cells.back());
        int label = 0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), label);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size() || label < 0) {
          throw ParseError("bad label '" + std::string(text) + "'");
        }
        labels.push_back(label);
      }
    } catch (const ParseError& e) {
      throw ParseError(origin + ":" + std::to_string(row) + ": " + e.what());
    }
  }
  if (coords.empty()) throw ParseError(origin + ": no data rows");
  const auto count = static_cast<Eigen::Index>(coords.size() / static_cast<std::size_t>(dim));
  Eigen::MatrixXd m = Eigen::Map<const Eigen::MatrixXd>(coords.data(), dim, count);
  return {PointSet(std::move(m)), std::move(labels)};
}

CsvPoints read_points_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_points_csv(in, path.string());
}

void write_points_csv(std::ostream& out, const PointSet& points, const std::vector<int>* labels) {
  for (int k = 0; k < points.dim(); ++k) out << (k ? "," : "") << 'x' << k + 1;
  if (labels) out << ",label";
  out << '\n';
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto col = points.col(i);
    for (int k = 0; k < points.dim(); ++k) out << (k ? "," : "") << format_double(col[k]);
    if (labels) out << ',' << (*labels)[i];
    out << '\n';
  }
}

Eigen::VectorXd read_weights_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "w") {
    throw ParseError(path.string() + ": header 'w' expected");
  }
  std::vector<double> w;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    try {
      w.push_back(parse_double(line));
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ":" + std::to_string(row) + ": " + e.what());
    }
  }
  return Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
}

void write_trace_csv(std::ostream& out, const std::vector<double>& trace) {
  out << "iteration,value\n";
  for (std::size_t i = 0; i < trace.size(); ++i) out << i << ',' << format_double(trace[i]) << '\n';
}

std::string read_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << contents;
  out.flush();
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

Json to_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) arr.push_back(v[k]);
  return arr;
}

Json to_json(const BallPoint& p) { return to_json(p.coords()); }

Json to_json(const MoebiusComponent& c) {
  return Json{{"location", to_json(c.location())}, {"concentration", c.concentration()}};
}

Json to_json(const MixtureModel& m) {
  Json comps = Json::array();
  for (const auto& c : m.components()) comps.push_back(to_json(c));
  return Json{{"mixing", m.mixing()}, {"components", std::move(comps)}};
}

Json to_json(const ExperimentSpec& spec) {
  return Json{{"schema_version", kSchemaVersion},
              {"name", spec.name},
              {"dim", spec.dim},
              {"sample_count", spec.sample_count},
              {"seed", spec.seed},
              {"mixture", to_json(spec.ground_truth)}};
}

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw ParseError("JSON object expected");
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

template <class T>
T get_as(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

BallPoint ball_point_from_json(const Json& j) {
  std::vector<double> v;
  try {
    v = j.get<std::vector<double>>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError("point must be an array of numbers");
  }
  return BallPoint(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
}

MoebiusComponent component_from_json(const Json& j) {
  return MoebiusComponent(ball_point_from_json(field(j, "location")), get_as<double>(j, "concentration"));
}

MixtureModel mixture_from_json(const Json& j) {
  const Json& comps = field(j, "components");
  if (!comps.is_array()) throw ParseError("'components' must be an array");
  std::vector<MoebiusComponent> components;
  for (const auto& c : comps) components.push_back(component_from_json(c));
  return MixtureModel(std::move(components), get_as<std::vector<double>>(j, "mixing"));
}

ExperimentSpec spec_from_json(const Json& j) {
  if (get_as<int>(j, "schema_version") != kSchemaVersion) throw ParseError("unsupported schema_version");
  ExperimentSpec spec{get_as<std::string>(j, "name"), get_as<int>(j, "dim"), mixture_from_json(field(j, "mixture")),
                      get_as<std::size_t>(j, "sample_count"), get_as<std::uint64_t>(j, "seed")};
  if (spec.ground_truth.dim() != spec.dim) throw DimensionError("spec dim does not match its mixture");
  if (spec.sample_count == 0) throw DomainError("sample_count must be positive");
  return spec;
}

Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

}  // namespace hyperball::cli
