#include "logconc/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "logconc/errors.hpp"

namespace logconc {

namespace {

using nlohmann::json;

Eigen::VectorXd vec_from(const json& j, const char* what) {
  if (!j.is_array()) throw config_error(std::string(what) + " must be an array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw config_error(std::string(what) + " entries must be numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd mat_from(const json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw config_error(std::string(what) + " must be an array of rows");
  const std::size_t n = j.size();
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!j[i].is_array() || j[i].size() != n)
      throw config_error(std::string(what) + " must be square");
    for (std::size_t k = 0; k < n; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          j[i][k].get<double>();
  }
  return m;
}

}  // namespace

std::string format_g17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

LogConcaveMeasure measure_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw config_error(std::string("bad measure JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
    throw config_error("measure JSON needs a \"family\" string");
  const std::string family = j["family"].get<std::string>();
  const int dim = j.contains("dim") ? j["dim"].get<int>() : 0;

  if (family == "gaussian") {
    if (j.contains("mean") || j.contains("cov")) {
      Eigen::VectorXd mean =
          j.contains("mean") ? vec_from(j["mean"], "mean") : Eigen::VectorXd();
      Eigen::MatrixXd cov =
          j.contains("cov") ? mat_from(j["cov"], "cov") : Eigen::MatrixXd();
      if (mean.size() == 0) mean = Eigen::VectorXd::Zero(cov.rows());
      if (cov.size() == 0) {
        cov = Eigen::MatrixXd::Identity(mean.size(), mean.size());
      }
      return LogConcaveMeasure::gaussian(mean, cov);
    }
    if (dim <= 0) throw config_error("gaussian needs dim or mean/cov");
    return LogConcaveMeasure::standard_gaussian(dim);
  }
  if (family == "uniform_box") {
    if (j.contains("half_widths")) {
      Eigen::VectorXd hw = vec_from(j["half_widths"], "half_widths");
      Eigen::VectorXd c = j.contains("center")
                              ? vec_from(j["center"], "center")
                              : Eigen::VectorXd::Zero(hw.size()).eval();
      return LogConcaveMeasure::uniform_box(c, hw);
    }
    if (dim <= 0 || !j.contains("side"))
      throw config_error("uniform_box needs half_widths or dim+side");
    return LogConcaveMeasure::uniform_cube(dim, j["side"].get<double>());
  }
  if (family == "uniform_ball") {
    if (!j.contains("radius")) throw config_error("uniform_ball needs radius");
    double r = j["radius"].get<double>();
    if (j.contains("center")) {
      Eigen::VectorXd c = vec_from(j["center"], "center");
      return LogConcaveMeasure::uniform_ball(static_cast<int>(c.size()), c, r);
    }
    if (dim <= 0) throw config_error("uniform_ball needs dim or center");
    return LogConcaveMeasure::uniform_ball(dim, Eigen::VectorXd::Zero(dim), r);
  }
  if (family == "product_exponential") {
    if (j.contains("rates"))
      return LogConcaveMeasure::product_exponential(
          vec_from(j["rates"], "rates"));
    if (dim <= 0) throw config_error("product_exponential needs rates or dim");
    double rate = j.contains("rate") ? j["rate"].get<double>() : 1.0;
    return LogConcaveMeasure::product_exponential(
        Eigen::VectorXd::Constant(dim, rate));
  }
  if (family == "custom")
    throw config_error(
        "custom potentials cannot be built from JSON; use the library API");
  throw config_error("unknown measure family: " + family);
}

void write_density_csv(std::ostream& os, const Density1D& d) {
  os << "# source: " << d.source << "\n";
  os << "# left: " << format_g17(d.left) << "\n";
  os << "# step: " << format_g17(d.step) << "\n";
  os << "# support_lo: " << format_g17(d.support_lo) << "\n";
  os << "# support_hi: " << format_g17(d.support_hi) << "\n";
  os << "# head_mass: " << format_g17(d.head_mass) << "\n";
  os << "# tail_mass: " << format_g17(d.tail_mass) << "\n";
  if (!d.singular_points.empty()) {
    os << "# singular_points:";
    for (double s : d.singular_points) os << " " << format_g17(s);
    os << "\n";
    os << "# singular_powers:";
    for (double s : d.singular_powers) os << " " << format_g17(s);
    os << "\n";
  }
  os << "# columns: t,density\n";
  for (int i = 0; i < d.count(); ++i)
    os << format_g17(d.left + d.step * i) << ","
       << format_g17(d.values[static_cast<std::size_t>(i)]) << "\n";
}

Density1D read_density_csv(std::istream& is) {
  Density1D d;
  bool have_left = false, have_step = false;
  std::string line;
  auto num_list = [](const std::string& rest) {
    std::vector<double> out;
    std::istringstream ss(rest);
    double v;
    while (ss >> v) out.push_back(v);
    return out;
  };
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      std::string key = line.substr(2, colon - 2);
      std::string rest = line.substr(colon + 1);
      if (key == "source") {
        auto b = rest.find_first_not_of(' ');
        d.source = b == std::string::npos ? "" : rest.substr(b);
      } else if (key == "left") {
        d.left = std::strtod(rest.c_str(), nullptr);
        have_left = true;
      } else if (key == "step") {
        d.step = std::strtod(rest.c_str(), nullptr);
        have_step = true;
      } else if (key == "support_lo") {
        d.support_lo = std::strtod(rest.c_str(), nullptr);
      } else if (key == "support_hi") {
        d.support_hi = std::strtod(rest.c_str(), nullptr);
      } else if (key == "head_mass") {
        d.head_mass = std::strtod(rest.c_str(), nullptr);
      } else if (key == "tail_mass") {
        d.tail_mass = std::strtod(rest.c_str(), nullptr);
      } else if (key == "singular_points") {
        d.singular_points = num_list(rest);
      } else if (key == "singular_powers") {
        d.singular_powers = num_list(rest);
      }
      continue;
    }
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw config_error("density CSV rows must be t,density");
    d.values.push_back(std::strtod(line.c_str() + comma + 1, nullptr));
  }
  if (!have_left || !have_step || d.values.size() < 2)
    throw config_error("density CSV is missing grid metadata or rows");
  if (d.singular_points.size() != d.singular_powers.size())
    throw config_error("singular point and power lists differ in length");
  return d;
}

void write_samples_csv(std::ostream& os, const Eigen::MatrixXd& points) {
  os << "# dim: " << points.cols() << "\n";
  os << "# count: " << points.rows() << "\n";
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      if (j) os << ",";
      os << format_g17(points(i, j));
    }
    os << "\n";
  }
}

namespace {

void append_indent(std::string& out, int depth) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
}

void append_series(std::string& out,
                   const std::map<std::string, std::vector<double>>& series,
                   int depth) {
  out += "{";
  bool first = true;
  for (const auto& [k, v] : series) {
    if (!first) out += ",";
    first = false;
    out += "\n";
    append_indent(out, depth + 1);
    out += "\"" + json_escape(k) + "\": [";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ", ";
      out += format_g17(v[i]);
    }
    out += "]";
  }
  if (!first) {
    out += "\n";
    append_indent(out, depth);
  }
  out += "}";
}

}  // namespace

std::string report_to_json(const InequalityReport& rep, bool deterministic,
                           int indent) {
  std::string out;
  const int d = indent;
  auto field = [&](const char* name, const std::string& raw, bool last = false) {
    append_indent(out, d + 1);
    out += "\"";
    out += name;
    out += "\": ";
    out += raw;
    if (!last) out += ",";
    out += "\n";
  };
  out += "{\n";
  field("id", "\"" + json_escape(rep.id) + "\"");
  field("criterion", "\"" + json_escape(rep.criterion) + "\"");
  field("engine", "\"" + json_escape(rep.engine) + "\"");
  field("pass", rep.pass ? "true" : "false");
  field("constant", format_g17(rep.constant));
  field("stability", format_g17(rep.stability));
  field("slope", format_g17(rep.slope));
  field("slope_err", format_g17(rep.slope_err));
  field("seed", std::to_string(rep.seed));
  field("samples", std::to_string(rep.samples));
  if (!deterministic) field("runtime_sec", format_g17(rep.runtime_sec));

  std::string params = "{";
  bool first = true;
  for (const auto& [k, v] : rep.params) {
    if (!first) params += ",";
    first = false;
    params += "\n";
    append_indent(params, d + 2);
    params += "\"" + json_escape(k) + "\": \"" + json_escape(v) + "\"";
  }
  if (!first) {
    params += "\n";
    append_indent(params, d + 1);
  }
  params += "}";
  field("params", params);

  std::string scalars = "{";
  first = true;
  for (const auto& [k, v] : rep.scalars) {
    if (!first) scalars += ",";
    first = false;
    scalars += "\n";
    append_indent(scalars, d + 2);
    scalars += "\"" + json_escape(k) + "\": " + format_g17(v);
  }
  if (!first) {
    scalars += "\n";
    append_indent(scalars, d + 1);
  }
  scalars += "}";
  field("scalars", scalars);

  std::string series;
  append_series(series, rep.series, d + 1);
  field("series", series);

  std::string warn = "[";
  for (std::size_t i = 0; i < rep.warnings.size(); ++i) {
    if (i) warn += ", ";
    warn += "\"" + json_escape(rep.warnings[i]) + "\"";
  }
  warn += "]";
  field("warnings", warn, true);

  append_indent(out, d);
  out += "}";
  return out;
}

std::string reports_to_json(const std::vector<InequalityReport>& reps,
                            bool deterministic) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < reps.size(); ++i) {
    std::string r = report_to_json(reps[i], deterministic, 1);
    out += "  " + r;
    if (i + 1 < reps.size()) out += ",";
    out += "\n";
  }
  out += "]\n";
  return out;
}

}  // namespace logconc
