#include "ltrawl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ltrawl/error.hpp"
#include "ltrawl/extremes.hpp"
#include "ltrawl/inference.hpp"
#include "ltrawl/trawl.hpp"
#include "svg.hpp"

namespace ltrawl {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json threshold_json(const ThresholdSpec& t) {
  return {{"kind", t.kind == ThresholdSpec::Kind::Percentile ? "percentile" : "absolute"},
          {"value", t.value}};
}

json config_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["input"] = c.input;
  j["columns"] = {{"time", c.columns.time}, {"value", c.columns.value}};
  j["threshold"] = threshold_json(c.threshold);
  j["variant"] = to_string(c.variant);
  j["delta"] = c.delta;
  j["run_length"] = c.run_length;
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  j["length"] = c.length;
  j["step"] = c.step;
  j["params"] = c.params ? json(*c.params) : json(nullptr);
  j["fit_model"] = c.fit_model;
  j["max_lag"] = c.max_lag;
  j["lags"] = c.lags;
  j["levels"] = c.levels;
  j["percentiles"] = c.percentiles;
  j["out"] = c.out;
  j["plot"] = c.plot;
  return j;
}

json info_json(const ThresholdInfo& info) {
  json j;
  j["threshold"] = info.threshold;
  j["percentile"] = info.percentile ? json(*info.percentile) : json(nullptr);
  j["convention"] = info.convention;
  j["exceedances"] = info.exceedances;
  j["non_exceedances"] = info.non_exceedances;
  j["missing"] = info.missing;
  j["warnings"] = info.warnings;
  return j;
}

// Writes to the configured path or the given stream.
void emit(const RunConfig& c, std::ostream& out, const std::string& text) {
  if (c.out.empty() || c.out == "-") {
    out << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw Error("cannot write output file '" + c.out + "'");
  f << text;
  if (!f) throw Error("failed writing output file '" + c.out + "'");
}

void emit_plot(const RunConfig& c, const std::string& svg) {
  if (c.plot.empty()) return;
  std::ofstream f(c.plot, std::ios::binary);
  if (!f) throw Error("cannot write plot file '" + c.plot + "'");
  f << svg;
}

std::string csv_header(const RunConfig& c, const json& extra = json()) {
  std::string s = "# config: " + config_json(c).dump() + "\n";
  if (!extra.is_null()) s += "# metadata: " + extra.dump() + "\n";
  return s;
}

std::string row(std::initializer_list<std::string> cells) {
  std::string s;
  bool first = true;
  for (const auto& cell : cells) {
    if (!first) s += ',';
    s += cell;
    first = false;
  }
  return s + "\n";
}

ExceedanceData load(const RunConfig& c) {
  if (c.input.empty()) throw Error(c.command + " needs --input");
  return to_exceedances(ingest_csv(c.input, c.columns), c.threshold);
}

double median_step(const ExceedanceSeries& s) {
  std::vector<double> d;
  for (std::size_t i = 1; i < s.size(); ++i) {
    d.push_back((s.times[i] - s.times[i - 1]) / static_cast<double>(s.positions[i] - s.positions[i - 1]));
  }
  if (d.empty()) return 1.0;
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2), d.end());
  return d[d.size() / 2];
}

PLConfig pl_config(const RunConfig& c) {
  PLConfig pl;
  pl.delta = c.delta;
  return pl;
}

std::uint64_t require_seed(const RunConfig& c) {
  if (!c.seed) throw Error(c.command + " needs --seed");
  return *c.seed;
}

// Model parameters from the config, or a fit of the input when allowed.
std::optional<ModelParams> model_params(const RunConfig& c, const std::optional<ExceedanceData>& data,
                                        bool required) {
  if (c.params) return ModelParams::from_natural(c.variant, *c.params);
  if ((c.fit_model || required) && data) return fit(data->series, c.variant, pl_config(c)).params;
  if (required) throw Error(c.command + " needs --params or an --input to fit");
  return std::nullopt;
}

// Dense view on the row index with NaN for missing rows.
std::vector<double> dense_values(const ExceedanceSeries& s) {
  if (s.size() == 0) return {};
  const auto n = static_cast<std::size_t>(s.positions.back() - s.positions.front() + 1);
  std::vector<double> v(n, kNaN);
  for (std::size_t i = 0; i < s.size(); ++i) {
    v[static_cast<std::size_t>(s.positions[i] - s.positions.front())] = s.values[i];
  }
  return v;
}

double empirical_acf(const std::vector<double>& v, int lag) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double x : v) {
    if (!std::isnan(x)) sum += x, ++n;
  }
  const double mean = sum / static_cast<double>(n);
  double var = 0.0;
  for (double x : v) {
    if (!std::isnan(x)) var += (x - mean) * (x - mean);
  }
  var /= static_cast<double>(n);
  double cov = 0.0;
  std::size_t pairs = 0;
  for (std::size_t t = 0; t + static_cast<std::size_t>(lag) < v.size(); ++t) {
    const double a = v[t];
    const double b = v[t + static_cast<std::size_t>(lag)];
    if (std::isnan(a) || std::isnan(b)) continue;
    cov += (a - mean) * (b - mean);
    ++pairs;
  }
  if (pairs == 0 || !(var > 0.0)) return kNaN;
  return cov / static_cast<double>(pairs) / var;
}

int cmd_simulate(const RunConfig& c, std::ostream& out) {
  if (!c.params) throw Error("simulate needs --params");
  const auto params = ModelParams::from_natural(c.variant, *c.params);
  const auto times = regular_grid(c.length, c.step);
  const auto series = simulate_exceedances(params, times, require_seed(c));
  std::string text = csv_header(c);
  text += "time,value\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    text += row({format_double(series.times[i]), format_double(series.values[i])});
  }
  emit(c, out, text);
  if (!c.plot.empty()) {
    emit_plot(c, detail::line_plot_svg("Simulated exceedances", "time", "exceedance",
                                       {{"X", series.times, series.values}}));
  }
  return 0;
}

int cmd_fit(const RunConfig& c, std::ostream& out) {
  const auto data = load(c);
  const auto r = fit(data.series, c.variant, pl_config(c), c.params ? std::optional(ModelParams::from_natural(c.variant, *c.params)) : std::nullopt);
  const auto names = ModelParams::parameter_names(c.variant);
  json j;
  j["config"] = config_json(c);
  j["threshold"] = info_json(data.info);
  j["variant"] = to_string(c.variant);
  j["parameters"] = names;
  for (std::size_t i = 0; i < 4; ++i) {
    j["estimates"][names[i]] = r.estimate[i];
    j["standard_errors"][names[i]] =
        std::isfinite(r.standard_error[i]) ? json(r.standard_error[i]) : json(nullptr);
  }
  json cov = json::array();
  for (int a = 0; a < 4; ++a) {
    json line = json::array();
    for (int b = 0; b < 4; ++b) {
      const double v = r.covariance(a, b);
      line.push_back(std::isfinite(v) ? json(v) : json(nullptr));
    }
    cov.push_back(line);
  }
  j["covariance"] = cov;
  j["log_pairwise_likelihood"] = r.log_pl;
  j["gradient_norm"] = r.gradient_norm;
  j["converged"] = r.converged;
  j["iterations"] = {{"simplex", r.simplex_iterations}, {"polish", r.polish_iterations}};
  j["message"] = r.message;
  j["observations"] = data.series.size();
  emit(c, out, j.dump(2) + "\n");
  return 0;
}

int cmd_acf(const RunConfig& c, std::ostream& out) {
  std::optional<ExceedanceData> data;
  if (!c.input.empty()) data = load(c);
  const auto params = model_params(c, data, !data.has_value());
  const double dt = data ? median_step(data->series) : c.step;

  std::vector<double> model(static_cast<std::size_t>(c.max_lag) + 1, kNaN);
  std::string method = "none";
  if (params) {
    if (params->variant == Variant::Original && params->alpha > 2.0) {
      method = "quadrature";
      for (int h = 1; h <= c.max_lag; ++h) model[static_cast<std::size_t>(h)] = acf_exceedance(*params, h * dt);
    } else {
      method = "simulation";
      const auto sim = simulate_exceedances(*params, regular_grid(c.length, dt), require_seed(c));
      for (int h = 1; h <= c.max_lag; ++h) model[static_cast<std::size_t>(h)] = empirical_acf(sim.values, h);
    }
  }
  std::vector<double> empirical(model.size(), kNaN);
  if (data) {
    const auto dense = dense_values(data->series);
    for (int h = 1; h <= c.max_lag; ++h) empirical[static_cast<std::size_t>(h)] = empirical_acf(dense, h);
  }
  json meta = {{"model_method", method}};
  if (data) meta["threshold"] = info_json(data->info);
  std::string text = csv_header(c, meta) + "lag,empirical,model\n";
  std::vector<double> lags;
  for (int h = 1; h <= c.max_lag; ++h) {
    lags.push_back(h);
    text += row({std::to_string(h), format_double(empirical[static_cast<std::size_t>(h)]),
                 format_double(model[static_cast<std::size_t>(h)])});
  }
  emit(c, out, text);
  if (!c.plot.empty()) {
    std::vector<detail::PlotSeries> s;
    if (data) s.push_back({"empirical", lags, {empirical.begin() + 1, empirical.end()}});
    if (params) s.push_back({"model", lags, {model.begin() + 1, model.end()}});
    emit_plot(c, detail::line_plot_svg("Exceedance autocorrelation", "lag", "acf", s));
  }
  return 0;
}

int cmd_taildep(const RunConfig& c, std::ostream& out) {
  std::optional<ExceedanceData> data;
  if (!c.input.empty()) data = load(c);
  const auto params = *model_params(c, data, true);
  const double dt = data ? median_step(data->series) : c.step;
  const auto dense = data ? dense_values(data->series) : std::vector<double>{};

  json meta = {{"scale", params.variant == Variant::MarginalTransform ? "latent" : "observation"}};
  if (data) meta["threshold"] = info_json(data->info);
  std::string text = csv_header(c, meta) + "lag,u,phi,empirical,standard_error,count\n";
  std::vector<detail::PlotSeries> plots;
  for (int lag : c.lags) {
    const auto curve = tail_dep_curve(params, lag * dt, c.levels);
    std::vector<ChiPoint> emp;
    if (data) {
      try {
        emp = empirical_cond_tail_dep(dense, c.levels, static_cast<std::size_t>(lag));
      } catch (const std::invalid_argument&) {
        emp.clear();
      }
    }
    for (std::size_t i = 0; i < c.levels.size(); ++i) {
      const bool has = i < emp.size();
      text += row({std::to_string(lag), format_double(c.levels[i]), format_double(curve.values[i]),
                   format_double(has ? emp[i].value : kNaN),
                   format_double(has ? emp[i].standard_error : kNaN),
                   has ? std::to_string(emp[i].conditioning_count) : std::string("NA")});
    }
    plots.push_back({"h=" + std::to_string(lag), curve.levels, curve.values});
  }
  emit(c, out, text);
  if (!c.plot.empty()) {
    emit_plot(c, detail::line_plot_svg("Conditional tail dependence", "u", "phi(h,u,u)", plots));
  }
  return 0;
}

int cmd_extremal_index(const RunConfig& c, std::ostream& out) {
  std::optional<RawSeries> raw;
  std::optional<ExceedanceData> data;
  if (!c.input.empty()) {
    raw = ingest_csv(c.input, c.columns);
    data = to_exceedances(*raw, c.threshold);
  }
  const auto params = model_params(c, data, !data.has_value());
  std::vector<double> simulated;
  if (params) {
    const double dt = data ? median_step(data->series) : c.step;
    simulated = simulate_exceedances(*params, regular_grid(c.length, dt), require_seed(c)).values;
  }
  std::vector<double> observed;
  if (raw) {
    for (double v : raw->values) {
      if (!std::isnan(v)) observed.push_back(v);
    }
  }

  const auto theta = [&](const std::vector<double>& values, const std::vector<double>& sample, double p,
                         double& threshold) {
    threshold = quantile_linear(sample, p);
    try {
      return extremal_index_runs(values, threshold, c.run_length).theta;
    } catch (const std::invalid_argument&) {
      return kNaN;
    }
  };

  std::string text = csv_header(c, {{"quantile_convention", kQuantileConvention}}) +
                     "percentile,data_threshold,data_theta,model_threshold,model_theta\n";
  std::vector<double> ps, dtheta, mtheta;
  for (double p : c.percentiles) {
    if (!(p > 0.0 && p < 1.0)) throw Error("percentiles must lie in (0, 1)");
    double du = kNaN, dth = kNaN, mu = kNaN, mth = kNaN;
    if (raw) dth = theta(raw->values, observed, p, du);
    if (!simulated.empty()) {
      mth = theta(simulated, simulated, p, mu);
      // Below the model's exceedance probability the quantile sits on the atom at zero.
      if (!(mu > 0.0)) mth = kNaN;
    }
    ps.push_back(p);
    dtheta.push_back(dth);
    mtheta.push_back(mth);
    text += row({format_double(p), format_double(du), format_double(dth), format_double(mu),
                 format_double(mth)});
  }
  emit(c, out, text);
  if (!c.plot.empty()) {
    std::vector<detail::PlotSeries> s;
    if (raw) s.push_back({"data", ps, dtheta});
    if (!simulated.empty()) s.push_back({"model", ps, mtheta});
    emit_plot(c, detail::line_plot_svg("Extremal index (runs)", "threshold percentile", "theta", s));
  }
  return 0;
}

const char* error_type(const std::exception& e) {
  if (dynamic_cast<const PairDensityError*>(&e)) return "PairDensityError";
  if (dynamic_cast<const SingularMatrixError*>(&e)) return "SingularMatrixError";
  if (dynamic_cast<const QuadratureError*>(&e)) return "QuadratureError";
  if (dynamic_cast<const Error*>(&e)) return "Error";
  if (dynamic_cast<const std::domain_error*>(&e)) return "DomainError";
  if (dynamic_cast<const std::invalid_argument*>(&e)) return "InvalidArgument";
  return "RuntimeError";
}

}  // namespace

void RunConfig::validate() const {
  static const std::vector<std::string> commands{"simulate", "fit", "acf", "taildep", "extremal-index"};
  if (std::find(commands.begin(), commands.end(), command) == commands.end()) {
    throw std::invalid_argument("unknown command '" + command + "'");
  }
  threshold.validate();
  if (delta < 1) throw std::invalid_argument("delta must be >= 1");
  if (run_length < 1) throw std::invalid_argument("run_length must be >= 1");
  if (length < 2) throw std::invalid_argument("simulation length must be >= 2");
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("step must be > 0");
  if (max_lag < 1) throw std::invalid_argument("max_lag must be >= 1");
  for (int l : lags) {
    if (l < 1) throw std::invalid_argument("lags must be >= 1");
  }
  for (double u : levels) {
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("levels must lie in (0, 1)");
  }
  if (command == "simulate" && !seed) throw std::invalid_argument("simulate needs a seed");
}

RunConfig merge_config_json(RunConfig c, const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("config must be a JSON object");
  try {
    if (j.contains("command")) c.command = j["command"].get<std::string>();
    if (j.contains("input")) c.input = j["input"].get<std::string>();
    if (j.contains("columns")) {
      const auto& col = j["columns"];
      if (col.contains("time")) c.columns.time = col["time"].get<std::string>();
      if (col.contains("value")) c.columns.value = col["value"].get<std::string>();
    }
    if (j.contains("threshold")) {
      const auto& t = j["threshold"];
      const auto kind = t.at("kind").get<std::string>();
      if (kind == "percentile") {
        c.threshold = ThresholdSpec::percentile(t.at("value").get<double>());
      } else if (kind == "absolute") {
        c.threshold = ThresholdSpec::absolute(t.at("value").get<double>());
      } else {
        throw Error("threshold kind must be percentile or absolute");
      }
    }
    if (j.contains("variant")) c.variant = variant_from_string(j["variant"].get<std::string>());
    if (j.contains("delta")) c.delta = j["delta"].get<int>();
    if (j.contains("run_length")) c.run_length = j["run_length"].get<int>();
    if (j.contains("seed")) {
      if (j["seed"].is_null()) c.seed.reset(); else c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("length")) c.length = j["length"].get<std::size_t>();
    if (j.contains("step")) c.step = j["step"].get<double>();
    if (j.contains("params")) {
      if (j["params"].is_null()) c.params.reset(); else c.params = j["params"].get<std::array<double, 4>>();
    }
    if (j.contains("fit_model")) c.fit_model = j["fit_model"].get<bool>();
    if (j.contains("max_lag")) c.max_lag = j["max_lag"].get<int>();
    if (j.contains("lags")) c.lags = j["lags"].get<std::vector<int>>();
    if (j.contains("levels")) c.levels = j["levels"].get<std::vector<double>>();
    if (j.contains("percentiles")) c.percentiles = j["percentiles"].get<std::vector<double>>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    if (j.contains("plot")) c.plot = j["plot"].get<std::string>();
  } catch (const json::exception& e) {
    throw Error(std::string("bad config value: ") + e.what());
  }
  return c;
}

std::string config_to_json(const RunConfig& config) { return config_json(config).dump(); }

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    if (config.command == "simulate") return cmd_simulate(config, out);
    if (config.command == "fit") return cmd_fit(config, out);
    if (config.command == "acf") return cmd_acf(config, out);
    if (config.command == "taildep") return cmd_taildep(config, out);
    return cmd_extremal_index(config, out);
  } catch (const std::exception& e) {
    json j;
    j["error"] = {{"type", error_type(e)}, {"message", e.what()}};
    j["config"] = config_json(config);
    err << j.dump() << "\n";
    return 1;
  }
}

}  // namespace ltrawl
