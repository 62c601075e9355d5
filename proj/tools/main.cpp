#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "logconc/constants.hpp"
#include "logconc/errors.hpp"
#include "logconc/io.hpp"
#include "logconc/metrics.hpp"
#include "logconc/pushforward.hpp"
#include "logconc/sampler.hpp"
#include "logconc/verifier.hpp"

namespace {

using logconc::Density1D;
using logconc::InequalityReport;
using nlohmann::json;

std::string num6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << text;
  if (!os) throw std::runtime_error("write to " + path + " failed");
}

logconc::Engine engine_from(const std::string& s) {
  if (s == "auto") return logconc::Engine::Auto;
  if (s == "quadrature" || s == "quad") return logconc::Engine::Quadrature;
  if (s == "mc" || s == "monte_carlo") return logconc::Engine::MonteCarlo;
  throw logconc::config_error("unknown engine: " + s);
}

std::map<std::string, double> params_from_json(const std::string& text) {
  std::map<std::string, double> out;
  if (text.empty()) return out;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw logconc::config_error(std::string("bad params JSON: ") + e.what());
  }
  if (!j.is_object())
    throw logconc::config_error("params must be a JSON object of numbers");
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number())
      throw logconc::config_error("param " + k + " must be a number");
    out[k] = v.get<double>();
  }
  return out;
}

void print_report_line(const InequalityReport& r) {
  std::string head = r.pass ? "[PASS]" : "[FAIL]";
  std::string who;
  auto f = r.params.find("f");
  if (f != r.params.end()) who += " f=" + f->second;
  auto g = r.params.find("g");
  if (g != r.params.end()) who += " g=" + g->second;
  auto mm = r.params.find("measure");
  if (mm != r.params.end()) who += " measure=" + mm->second;
  std::cout << head << " " << r.id << " engine=" << r.engine
            << " constant=" << num6(r.constant) << " slope=" << num6(r.slope)
            << " stability=" << num6(r.stability)
            << " warnings=" << r.warnings.size() << who << "\n";
  for (const auto& w : r.warnings) std::cout << "    warning: " << w << "\n";
}

void print_plotdata(const std::vector<InequalityReport>& reports) {
  auto dump = [](const InequalityReport& r, std::size_t idx, const char* xk,
                 const char* yk) {
    auto xi = r.series.find(xk);
    auto yi = r.series.find(yk);
    if (xi == r.series.end() || yi == r.series.end()) return;
    std::cout << "plotdata " << idx << " " << r.id << " log_" << xk << " log_"
              << yk << "\n";
    for (std::size_t i = 0; i < xi->second.size() && i < yi->second.size();
         ++i) {
      double x = xi->second[i], y = yi->second[i];
      if (x <= 0.0 || y <= 0.0) continue;
      std::cout << logconc::format_g17(std::log(x)) << " "
                << logconc::format_g17(std::log(y)) << "\n";
    }
  };
  for (std::size_t i = 0; i < reports.size(); ++i) {
    dump(reports[i], i, "M", "growth");
    dump(reports[i], i, "h", "delta");
    dump(reports[i], i, "t", "prob");
  }
}

struct VerifyArgs {
  std::string suite, config, measure, poly, poly2, engine = "auto", out;
  std::size_t samples = 200000;
  std::uint64_t seed = 42;
  int threads = 1;
  bool deterministic = false;
  bool plotdata = false;
};

int cmd_verify(VerifyArgs a, bool samples_set, bool seed_set,
               bool engine_set) {
  if (!a.config.empty()) {
    std::ifstream is(a.config);
    if (!is) throw std::runtime_error("cannot read config " + a.config);
    json j;
    try {
      j = json::parse(is);
    } catch (const json::exception& e) {
      throw logconc::config_error(std::string("bad config JSON: ") + e.what());
    }
    if (a.suite.empty() && j.contains("suite"))
      a.suite = j["suite"].get<std::string>();
    if (a.measure.empty() && j.contains("measure"))
      a.measure = j["measure"].dump();
    if (a.poly.empty() && j.contains("poly"))
      a.poly = j["poly"].get<std::string>();
    if (a.poly2.empty() && j.contains("poly2"))
      a.poly2 = j["poly2"].get<std::string>();
    if (!samples_set && j.contains("samples"))
      a.samples = j["samples"].get<std::size_t>();
    if (!seed_set && j.contains("seed"))
      a.seed = j["seed"].get<std::uint64_t>();
    if (!engine_set && j.contains("engine"))
      a.engine = j["engine"].get<std::string>();
  }
  if (a.suite.empty())
    throw logconc::config_error("verify needs --suite (or a config file)");

  logconc::SuiteSpec spec;
  spec.id = a.suite;
  if (!a.measure.empty()) spec.measure = logconc::measure_from_json(a.measure);
  if (!a.poly.empty()) spec.poly = logconc::Polynomial::parse(a.poly);
  if (!a.poly2.empty()) spec.poly2 = logconc::Polynomial::parse(a.poly2);

  logconc::VerifyOptions vo;
  vo.samples = a.samples;
  vo.seed = a.seed;
  vo.workers = a.threads;
  vo.engine = engine_from(a.engine);

  auto reports = logconc::run_suite(spec, vo);
  bool all_pass = true;
  for (const auto& r : reports) {
    print_report_line(r);
    all_pass = all_pass && r.pass;
  }
  if (!a.out.empty())
    write_file(a.out, logconc::reports_to_json(reports, a.deterministic));
  if (a.plotdata) print_plotdata(reports);
  return all_pass ? 0 : 2;
}

struct DensityArgs {
  std::string measure, poly, oracle, params, method = "exact", out;
  int grid = 2001;
  int bins = 0;
  std::size_t samples = 200000;
  std::uint64_t seed = 42;
  int threads = 1;
};

int cmd_density(const DensityArgs& a) {
  Density1D d;
  if (!a.oracle.empty()) {
    d = logconc::analytic_density(a.oracle, params_from_json(a.params),
                                  a.grid);
  } else {
    if (a.measure.empty() || a.poly.empty())
      throw logconc::config_error(
          "density needs --measure and --poly (or --oracle)");
    auto m = logconc::measure_from_json(a.measure);
    auto f = logconc::Polynomial::parse(a.poly);
    if (a.method == "exact") {
      d = logconc::image_density_1d(f, m, a.grid);
    } else if (a.method == "sample") {
      logconc::SamplerOptions so;
      so.stream = logconc::SeededStream(a.seed, 1);
      so.workers = a.threads;
      auto s = logconc::image_sample(f, m, a.samples, so);
      logconc::DensityOptions dopt;
      dopt.bins = a.bins;
      d = logconc::estimate_density(s, dopt);
    } else {
      throw logconc::config_error("unknown density method: " + a.method);
    }
  }
  std::cout << "density source=" << d.source << " nodes=" << d.count()
            << " mass=" << num6(d.mass()) << " support=["
            << num6(d.support_lo) << ", " << num6(d.support_hi) << "]\n";
  if (a.out.empty()) {
    logconc::write_density_csv(std::cout, d);
  } else {
    std::ofstream os(a.out, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + a.out);
    logconc::write_density_csv(os, d);
  }
  return 0;
}

struct MetricsArgs {
  std::string a, b, out;
  double alpha = 0.5;
};

int cmd_metrics(const MetricsArgs& ar) {
  std::ifstream ia(ar.a), ib(ar.b);
  if (!ia) throw std::runtime_error("cannot read " + ar.a);
  if (!ib) throw std::runtime_error("cannot read " + ar.b);
  Density1D da = logconc::read_density_csv(ia);
  Density1D db = logconc::read_density_csv(ib);
  double tv = logconc::tv_distance(da, db);
  logconc::FmResult fm = logconc::fm_distance(da, db);
  double w1 = logconc::w1_distance(da, db);
  logconc::BesovFit bf = logconc::besov_fit(da, ar.alpha);
  std::string out = "{\n";
  out += "  \"tv\": " + logconc::format_g17(tv) + ",\n";
  out += "  \"fm\": " + logconc::format_g17(fm.value) + ",\n";
  out += "  \"w1\": " + logconc::format_g17(w1) + ",\n";
  out += "  \"besov\": {\n";
  out += "    \"alpha\": " + logconc::format_g17(ar.alpha) + ",\n";
  out += "    \"seminorm\": " + logconc::format_g17(bf.seminorm) + ",\n";
  out += "    \"slope\": " + logconc::format_g17(bf.slope) + "\n";
  out += "  }\n";
  out += "}\n";
  std::cout << "metrics tv=" << num6(tv) << " fm=" << num6(fm.value)
            << " w1=" << num6(w1) << " besov_slope=" << num6(bf.slope)
            << (fm.coarse_flag ? " (fm grid coarse)" : "") << "\n";
  if (ar.out.empty())
    std::cout << out;
  else
    write_file(ar.out, out);
  return 0;
}

struct ConstantsArgs {
  std::string name, params, out;
};

int cmd_constants(const ConstantsArgs& a) {
  auto params = params_from_json(a.params);
  logconc::ConstantValue cv = logconc::evaluate_constant(a.name, params);
  std::cout << a.name << " = " << num6(cv.value);
  if (cv.has_crosscheck)
    std::cout << " (crosscheck error " << num6(cv.crosscheck_error) << ")";
  std::cout << "\n";
  std::string out = "{\n  \"name\": \"" + logconc::json_escape(a.name) +
                    "\",\n  \"params\": {";
  bool first = true;
  for (const auto& [k, v] : params) {
    if (!first) out += ",";
    first = false;
    out += "\n    \"" + logconc::json_escape(k) +
           "\": " + logconc::format_g17(v);
  }
  if (!first) out += "\n  ";
  out += "},\n  \"value\": " + logconc::format_g17(cv.value) +
         ",\n  \"crosscheck_error\": " +
         logconc::format_g17(cv.crosscheck_error) + "\n}\n";
  if (a.out.empty())
    std::cout << out;
  else
    write_file(a.out, out);
  return 0;
}

struct SampleArgs {
  std::string measure, out;
  std::size_t samples = 1000;
  std::uint64_t seed = 42;
  std::size_t burnin = 0, thin = 0;
  int threads = 1;
};

int cmd_sample(const SampleArgs& a) {
  if (a.measure.empty()) throw logconc::config_error("sample needs --measure");
  auto m = logconc::measure_from_json(a.measure);
  logconc::SamplerOptions so;
  so.stream = logconc::SeededStream(a.seed, 0);
  so.workers = a.threads;
  so.burnin = a.burnin;
  so.thin = a.thin;
  auto res = logconc::sample(m, a.samples, so);
  std::cout << "sample count=" << res.points.rows() << " dim="
            << res.points.cols() << " method=" << res.method
            << " burnin=" << res.burnin << " thin=" << res.thin << "\n";
  if (a.out.empty()) {
    logconc::write_samples_csv(std::cout, res.points);
  } else {
    std::ofstream os(a.out, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + a.out);
    logconc::write_samples_csv(os, res.points);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"log-concave measures, polynomial image laws, and inequality "
               "verification"};
  app.require_subcommand(1);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run an inequality suite");
  verify->add_option("--suite", va.suite, "suite id (see README)");
  verify->add_option("--config", va.config, "JSON config file");
  verify->add_option("--measure", va.measure, "measure JSON");
  verify->add_option("--poly", va.poly, "polynomial, e.g. x1^2");
  verify->add_option("--poly2", va.poly2, "second polynomial for pair checks");
  auto* vs = verify->add_option("--samples", va.samples, "Monte Carlo budget");
  auto* vseed = verify->add_option("--seed", va.seed, "RNG seed");
  verify->add_option("--threads", va.threads, "worker threads");
  auto* veng =
      verify->add_option("--engine", va.engine, "auto|quadrature|mc");
  verify->add_option("--out", va.out, "write the report JSON here");
  verify->add_flag("--deterministic", va.deterministic,
                   "omit wall-clock fields so reruns are byte-identical");
  verify->add_flag("--plotdata", va.plotdata,
                   "print log-log pairs for the fitted exponents");

  DensityArgs da;
  auto* density = app.add_subcommand("density", "emit a 1D image density");
  density->add_option("--measure", da.measure, "measure JSON");
  density->add_option("--poly", da.poly, "polynomial");
  density->add_option("--oracle", da.oracle,
                      "closed-form density id instead of measure+poly");
  density->add_option("--params", da.params, "oracle parameter JSON");
  density->add_option("--method", da.method, "exact|sample");
  density->add_option("--grid", da.grid, "grid node count");
  density->add_option("--bins", da.bins, "histogram bins (sample method)");
  density->add_option("--samples", da.samples, "sample count");
  density->add_option("--seed", da.seed, "RNG seed");
  density->add_option("--threads", da.threads, "worker threads");
  density->add_option("--out", da.out, "CSV output path (default stdout)");

  MetricsArgs ma;
  auto* metrics =
      app.add_subcommand("metrics", "distances between two density CSVs");
  metrics->add_option("--a", ma.a, "first density CSV")->required();
  metrics->add_option("--b", ma.b, "second density CSV")->required();
  metrics->add_option("--alpha", ma.alpha, "Besov exponent for the fit");
  metrics->add_option("--out", ma.out, "JSON output path (default stdout)");

  ConstantsArgs ca;
  auto* constants =
      app.add_subcommand("constants", "evaluate an explicit constant");
  constants->add_option("--name", ca.name, "constant id")->required();
  constants->add_option("--params", ca.params, "parameter JSON");
  constants->add_option("--out", ca.out, "JSON output path (default stdout)");

  SampleArgs sa;
  auto* samplecmd =
      app.add_subcommand("sample", "draw points from a measure");
  samplecmd->add_option("--measure", sa.measure, "measure JSON");
  samplecmd->add_option("--samples", sa.samples, "number of draws");
  samplecmd->add_option("--seed", sa.seed, "RNG seed");
  samplecmd->add_option("--burnin", sa.burnin, "chain burn-in (0 = auto)");
  samplecmd->add_option("--thin", sa.thin, "chain thinning (0 = auto)");
  samplecmd->add_option("--threads", sa.threads, "worker threads");
  samplecmd->add_option("--out", sa.out, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(verify))
      return cmd_verify(va, vs->count() > 0, vseed->count() > 0,
                        veng->count() > 0);
    if (app.got_subcommand(density)) return cmd_density(da);
    if (app.got_subcommand(metrics)) return cmd_metrics(ma);
    if (app.got_subcommand(constants)) return cmd_constants(ca);
    if (app.got_subcommand(samplecmd)) return cmd_sample(sa);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
