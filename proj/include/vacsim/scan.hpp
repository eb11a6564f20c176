#ifndef VACSIM_SCAN_HPP
#define VACSIM_SCAN_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "dispersion.hpp"
#include "eo_model.hpp"
#include "mode_algebra.hpp"

#ifndef VACSIM_VERSION
#define VACSIM_VERSION "0.1.0"
#endif

namespace vacsim {

using nlohmann::json;

/// Invalid or inconsistent configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure while evaluating a scan point (exit code 3).
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scenario { subcycle, eo_scan, waveform, order_compare, dispersion_dump };

inline std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::subcycle: return "subcycle";
    case Scenario::eo_scan: return "eo_scan";
    case Scenario::waveform: return "waveform";
    case Scenario::order_compare: return "order_compare";
    case Scenario::dispersion_dump: return "dispersion_dump";
  }
  return "?";
}

inline Scenario scenario_from_string(const std::string& s) {
  for (auto v : {Scenario::subcycle, Scenario::eo_scan, Scenario::waveform, Scenario::order_compare,
                 Scenario::dispersion_dump})
    if (to_string(v) == s) return v;
  throw ConfigError("unknown scenario '" + s + "'");
}

struct GridSpec {
  double start = 0.0;
  double stop = 1.0;
  int points = 2;

  void validate(const std::string& name) const {
    if (points < 2) throw ConfigError(name + ": grids need at least 2 points");
    if (!std::isfinite(start) || !std::isfinite(stop) || !(start < stop))
      throw ConfigError(name + ": grid requires finite start < stop");
  }
  std::vector<double> values() const {
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) v[static_cast<std::size_t>(i)] = start + (stop - start) * i / (points - 1);
    return v;
  }
  bool operator==(const GridSpec&) const = default;
};

struct SubcycleConfig {
  GridSpec sigma_over_omega0{0.05, 2.0, 40};
  double omega0_over_2pi_thz = 30.0;
  double t0_fs = 0.0;
  bool operator==(const SubcycleConfig&) const = default;
};

struct ProbeConfig {
  double omega_p_over_2pi_thz = 255.0;
  double sigma_p_angular_thz = std::sqrt(2.0 * std::log(2.0)) / 5.8e-3;
  double t_p_fs = 0.0;
  double phi_p_rad = 0.0;
  double alpha_re = std::sqrt(5e9);
  double alpha_im = 0.0;
  bool operator==(const ProbeConfig&) const = default;
};

struct CrystalConfig {
  double length_um = 7.0;
  double r41_pm_per_v = 4.0;
  double beam_radius_um = 3.0;
  RefractiveIndexModel dispersion;
  bool operator==(const CrystalConfig&) const = default;
};

struct EOScanConfig {
  std::optional<GridSpec> omega_tilde_over_2pi_thz;  // default: [omega_p - 2 sigma_p, omega_p + 2 sigma_p], 200 points
  double exclusion_sigma_p = 0.25;
  bool operator==(const EOScanConfig&) const = default;
};

struct WaveformConfig {
  double omega_tilde_offset_sigma_p = 1.5;
  GridSpec t_fs{-40.0, 40.0, 801};
  WaveformMode mode = WaveformMode::exact;
  bool operator==(const WaveformConfig&) const = default;
};

struct DispersionDumpConfig {
  GridSpec omega_over_2pi_thz{0.5, 550.0, 1100};
  bool operator==(const DispersionDumpConfig&) const = default;
};

struct RunConfig {
  std::optional<Scenario> scenario;
  SubcycleConfig subcycle;
  ProbeConfig probe;
  CrystalConfig crystal;
  double delta_omega_over_2pi_thz = 1.0;
  double lambda_over_2pi_thz = 100.0;
  EOScanConfig eo_scan;
  WaveformConfig waveform;
  DispersionDumpConfig dispersion_dump;
  double rel_tol = default_rel_tol;
  double abs_tol = default_abs_tol;
  bool operator==(const RunConfig&) const = default;

  EOSetup eo_setup() const {
    EOSetup s;
    s.crystal.length = crystal.length_um * 1e-6;
    s.crystal.r41 = crystal.r41_pm_per_v * 1e-12;
    s.crystal.area = pi * crystal.beam_radius_um * crystal.beam_radius_um * 1e-12;
    s.crystal.dispersion = crystal.dispersion;
    s.probe.omega_p = angular_from_thz(probe.omega_p_over_2pi_thz);
    s.probe.sigma_p = probe.sigma_p_angular_thz * thz;
    s.probe.t_p = probe.t_p_fs * 1e-15;
    s.probe.phi_p = probe.phi_p_rad;
    s.probe.alpha = {probe.alpha_re, probe.alpha_im};
    s.partition.lambda_cut = angular_from_thz(lambda_over_2pi_thz);
    return s;
  }
  FilterParams filter_at(double omega_tilde) const {
    return {omega_tilde, angular_from_thz(delta_omega_over_2pi_thz)};
  }
  Tolerances tolerances() const { return {rel_tol, abs_tol}; }
  GridSpec eo_grid() const {
    if (eo_scan.omega_tilde_over_2pi_thz) return *eo_scan.omega_tilde_over_2pi_thz;
    const double wp = probe.omega_p_over_2pi_thz, sp = probe.sigma_p_angular_thz / two_pi;
    return {wp - 2.0 * sp, wp + 2.0 * sp, 200};
  }
};

namespace detail {

inline void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline GridSpec read_grid(const json& j, const std::string& where) {
  reject_unknown(j, where, {"start", "stop", "points"});
  GridSpec g;
  g.start = j.at("start").get<double>();
  g.stop = j.at("stop").get<double>();
  g.points = j.at("points").get<int>();
  g.validate(where);
  return g;
}

inline json grid_json(const GridSpec& g) { return {{"start", g.start}, {"stop", g.stop}, {"points", g.points}}; }

inline void positive(double v, const std::string& name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(name + " must be positive and finite");
}

}  // namespace detail

/// Tolerance default: VACUUM_SAMPLER_TOL when set, otherwise default_rel_tol.
inline double env_rel_tol() {
  const char* e = std::getenv("VACUUM_SAMPLER_TOL");
  if (!e || !*e) return default_rel_tol;
  char* end = nullptr;
  const double v = std::strtod(e, &end);
  if (end == e || *end != '\0' || !(v > 0.0) || !(v < 1.0))
    throw ConfigError(std::string("VACUUM_SAMPLER_TOL must be a number in (0, 1), got '") + e + "'");
  return v;
}

inline void validate(const RunConfig& c) {
  using detail::positive;
  c.subcycle.sigma_over_omega0.validate("subcycle.sigma_over_omega0");
  if (!(c.subcycle.sigma_over_omega0.start > 0.0)) throw ConfigError("subcycle.sigma_over_omega0 must be positive");
  positive(c.subcycle.omega0_over_2pi_thz, "subcycle.omega0_over_2pi_thz");
  positive(c.probe.omega_p_over_2pi_thz, "probe.omega_p_over_2pi_thz");
  positive(c.probe.sigma_p_angular_thz, "probe.sigma_p_angular_thz");
  positive(c.crystal.length_um, "crystal.length_um");
  positive(c.crystal.beam_radius_um, "crystal.beam_radius_um");
  positive(c.delta_omega_over_2pi_thz, "filter.delta_omega_over_2pi_thz");
  positive(c.lambda_over_2pi_thz, "partition.lambda_over_2pi_thz");
  positive(c.rel_tol, "tolerances.rel_tol");
  if (!(c.abs_tol >= 0.0)) throw ConfigError("tolerances.abs_tol must be >= 0");
  try {
    c.crystal.dispersion.validate();
    c.eo_setup().validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  const GridSpec g = c.eo_grid();
  g.validate("eo_scan.omega_tilde_over_2pi_thz");
  const double half_band = 0.5 * c.delta_omega_over_2pi_thz;
  if (!(g.start - half_band > c.lambda_over_2pi_thz))
    throw ConfigError("eo_scan: filter band must stay above the partition frequency");
  const double top = thz_from_angular(c.crystal.dispersion.max_angular());
  if (!(g.stop + half_band < top)) throw ConfigError("eo_scan: filter band exceeds the dispersion validity range");
  c.waveform.t_fs.validate("waveform.t_fs");
  c.dispersion_dump.omega_over_2pi_thz.validate("dispersion_dump.omega_over_2pi_thz");
  if (c.dispersion_dump.omega_over_2pi_thz.stop > top)
    throw ConfigError("dispersion_dump: grid exceeds the dispersion validity range");
  if (!(c.eo_scan.exclusion_sigma_p >= 0.0)) throw ConfigError("eo_scan.exclusion_sigma_p must be >= 0");
}

/// Parses a config document; relative dispersion_file paths resolve against `base_dir`.
inline RunConfig config_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
  using namespace detail;
  RunConfig c;
  c.rel_tol = env_rel_tol();
  try {
    reject_unknown(j, "config",
                   {"scenario", "subcycle", "probe", "crystal", "filter", "partition", "eo_scan", "waveform",
                    "dispersion_dump", "tolerances"});
    if (j.contains("scenario")) c.scenario = scenario_from_string(j.at("scenario").get<std::string>());
    if (j.contains("subcycle")) {
      const auto& s = j.at("subcycle");
      reject_unknown(s, "subcycle", {"sigma_over_omega0", "omega0_over_2pi_thz", "t0_fs"});
      if (s.contains("sigma_over_omega0")) c.subcycle.sigma_over_omega0 = read_grid(s.at("sigma_over_omega0"), "subcycle.sigma_over_omega0");
      read(s, "omega0_over_2pi_thz", c.subcycle.omega0_over_2pi_thz);
      read(s, "t0_fs", c.subcycle.t0_fs);
    }
    if (j.contains("probe")) {
      const auto& p = j.at("probe");
      reject_unknown(p, "probe",
                     {"omega_p_over_2pi_thz", "sigma_p_angular_thz", "t_fwhm_fs", "t_p_fs", "phi_p_rad", "alpha_re",
                      "alpha_im", "photon_number", "alpha_phase_rad"});
      read(p, "omega_p_over_2pi_thz", c.probe.omega_p_over_2pi_thz);
      if (p.contains("sigma_p_angular_thz") && p.contains("t_fwhm_fs"))
        throw ConfigError("probe: give either sigma_p_angular_thz or t_fwhm_fs");
      read(p, "sigma_p_angular_thz", c.probe.sigma_p_angular_thz);
      if (p.contains("t_fwhm_fs")) {
        const double t = p.at("t_fwhm_fs").get<double>();
        positive(t, "probe.t_fwhm_fs");
        c.probe.sigma_p_angular_thz = std::sqrt(2.0 * std::log(2.0)) / (t * 1e-3);
      }
      read(p, "t_p_fs", c.probe.t_p_fs);
      read(p, "phi_p_rad", c.probe.phi_p_rad);
      const bool cart = p.contains("alpha_re") || p.contains("alpha_im");
      const bool polar = p.contains("photon_number") || p.contains("alpha_phase_rad");
      if (cart && polar) throw ConfigError("probe: give alpha as (alpha_re, alpha_im) or (photon_number, alpha_phase_rad)");
      if (cart) {
        c.probe.alpha_re = p.value("alpha_re", 0.0);
        c.probe.alpha_im = p.value("alpha_im", 0.0);
      }
      if (polar) {
        const double n = p.value("photon_number", 5e9), ph = p.value("alpha_phase_rad", 0.0);
        if (!(n >= 0.0)) throw ConfigError("probe.photon_number must be >= 0");
        c.probe.alpha_re = std::sqrt(n) * std::cos(ph);
        c.probe.alpha_im = std::sqrt(n) * std::sin(ph);
      }
    }
    if (j.contains("crystal")) {
      const auto& k = j.at("crystal");
      reject_unknown(k, "crystal", {"length_um", "r41_pm_per_v", "beam_radius_um", "dispersion", "dispersion_file"});
      read(k, "length_um", c.crystal.length_um);
      read(k, "r41_pm_per_v", c.crystal.r41_pm_per_v);
      read(k, "beam_radius_um", c.crystal.beam_radius_um);
      if (k.contains("dispersion") && k.contains("dispersion_file"))
        throw ConfigError("crystal: give either dispersion or dispersion_file");
      if (k.contains("dispersion")) c.crystal.dispersion = dispersion_from_json(k.at("dispersion"));
      if (k.contains("dispersion_file")) {
        std::filesystem::path f = k.at("dispersion_file").get<std::string>();
        if (f.is_relative()) f = base_dir / f;
        c.crystal.dispersion = load_dispersion(f.string());
      }
    }
    if (j.contains("filter")) {
      reject_unknown(j.at("filter"), "filter", {"delta_omega_over_2pi_thz"});
      read(j.at("filter"), "delta_omega_over_2pi_thz", c.delta_omega_over_2pi_thz);
    }
    if (j.contains("partition")) {
      reject_unknown(j.at("partition"), "partition", {"lambda_over_2pi_thz"});
      read(j.at("partition"), "lambda_over_2pi_thz", c.lambda_over_2pi_thz);
    }
    if (j.contains("eo_scan")) {
      const auto& e = j.at("eo_scan");
      reject_unknown(e, "eo_scan", {"omega_tilde_over_2pi_thz", "exclusion_sigma_p"});
      if (e.contains("omega_tilde_over_2pi_thz"))
        c.eo_scan.omega_tilde_over_2pi_thz = read_grid(e.at("omega_tilde_over_2pi_thz"), "eo_scan.omega_tilde_over_2pi_thz");
      read(e, "exclusion_sigma_p", c.eo_scan.exclusion_sigma_p);
    }
    if (j.contains("waveform")) {
      const auto& w = j.at("waveform");
      reject_unknown(w, "waveform", {"omega_tilde_offset_sigma_p", "t_fs", "mode"});
      read(w, "omega_tilde_offset_sigma_p", c.waveform.omega_tilde_offset_sigma_p);
      if (w.contains("t_fs")) c.waveform.t_fs = read_grid(w.at("t_fs"), "waveform.t_fs");
      if (w.contains("mode")) {
        const auto m = w.at("mode").get<std::string>();
        if (m == "exact") c.waveform.mode = WaveformMode::exact;
        else if (m == "midpoint") c.waveform.mode = WaveformMode::midpoint;
        else throw ConfigError("waveform.mode must be 'exact' or 'midpoint'");
      }
    }
    if (j.contains("dispersion_dump")) {
      const auto& d = j.at("dispersion_dump");
      reject_unknown(d, "dispersion_dump", {"omega_over_2pi_thz"});
      if (d.contains("omega_over_2pi_thz"))
        c.dispersion_dump.omega_over_2pi_thz = read_grid(d.at("omega_over_2pi_thz"), "dispersion_dump.omega_over_2pi_thz");
    }
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      reject_unknown(t, "tolerances", {"rel_tol", "abs_tol"});
      read(t, "rel_tol", c.rel_tol);
      read(t, "abs_tol", c.abs_tol);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

/// Canonical form: every field explicit, dispersion inlined.
inline json config_to_json(const RunConfig& c) {
  using detail::grid_json;
  json j;
  if (c.scenario) j["scenario"] = to_string(*c.scenario);
  j["subcycle"] = {{"sigma_over_omega0", grid_json(c.subcycle.sigma_over_omega0)},
                   {"omega0_over_2pi_thz", c.subcycle.omega0_over_2pi_thz},
                   {"t0_fs", c.subcycle.t0_fs}};
  j["probe"] = {{"omega_p_over_2pi_thz", c.probe.omega_p_over_2pi_thz},
                {"sigma_p_angular_thz", c.probe.sigma_p_angular_thz},
                {"t_p_fs", c.probe.t_p_fs},
                {"phi_p_rad", c.probe.phi_p_rad},
                {"alpha_re", c.probe.alpha_re},
                {"alpha_im", c.probe.alpha_im}};
  j["crystal"] = {{"length_um", c.crystal.length_um},
                  {"r41_pm_per_v", c.crystal.r41_pm_per_v},
                  {"beam_radius_um", c.crystal.beam_radius_um},
                  {"dispersion", dispersion_to_json(c.crystal.dispersion)}};
  j["filter"] = {{"delta_omega_over_2pi_thz", c.delta_omega_over_2pi_thz}};
  j["partition"] = {{"lambda_over_2pi_thz", c.lambda_over_2pi_thz}};
  j["eo_scan"] = {{"exclusion_sigma_p", c.eo_scan.exclusion_sigma_p}};
  if (c.eo_scan.omega_tilde_over_2pi_thz)
    j["eo_scan"]["omega_tilde_over_2pi_thz"] = grid_json(*c.eo_scan.omega_tilde_over_2pi_thz);
  j["waveform"] = {{"omega_tilde_offset_sigma_p", c.waveform.omega_tilde_offset_sigma_p},
                   {"t_fs", grid_json(c.waveform.t_fs)},
                   {"mode", c.waveform.mode == WaveformMode::exact ? "exact" : "midpoint"}};
  j["dispersion_dump"] = {{"omega_over_2pi_thz", grid_json(c.dispersion_dump.omega_over_2pi_thz)}};
  j["tolerances"] = {{"rel_tol", c.rel_tol}, {"abs_tol", c.abs_tol}};
  return j;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  try {
    return config_from_json(j, std::filesystem::path(path).parent_path());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

enum class OrderSelection { first, second, perturbative, all };

inline OrderSelection order_from_string(const std::string& s) {
  if (s == "1") return OrderSelection::first;
  if (s == "2") return OrderSelection::second;
  if (s == "pert") return OrderSelection::perturbative;
  if (s == "all") return OrderSelection::all;
  throw ConfigError("--order must be one of 1, 2, pert, all");
}

struct RunOptions {
  unsigned jobs = 1;
  OrderSelection order = OrderSelection::all;
};

struct ScanResult {
  std::string scenario;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  json metadata = json::object();

  std::size_t column(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::out_of_range("no column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
  }
  std::vector<double> values(const std::string& name) const {
    const std::size_t k = column(name);
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r[k]);
    return v;
  }
};

/// Evaluates fn(i) for i in [0, n) on `jobs` threads; results are ordered by index.
template <class T>
std::vector<T> parallel_map(std::size_t n, unsigned jobs, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

namespace detail {

template <class F>
auto guarded(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw NumericalFailure(what + ": " + e.what());
  }
}

inline void check_finite(const ScanResult& r) {
  for (std::size_t i = 0; i < r.rows.size(); ++i)
    for (std::size_t k = 0; k < r.columns.size(); ++k)
      if (!std::isfinite(r.rows[i][k]))
        throw NumericalFailure(r.scenario + ": non-finite value in column '" + r.columns[k] + "' at row " +
                               std::to_string(i));
}

inline ScanResult start(const RunConfig& c, Scenario s) {
  ScanResult r;
  r.scenario = to_string(s);
  r.metadata["tolerances"] = {{"rel_tol", c.rel_tol}, {"abs_tol", c.abs_tol}};
  return r;
}

}  // namespace detail

inline ScanResult cmd_subcycle_scan(const RunConfig& c, const RunOptions& o = {}) {
  ScanResult r = detail::start(c, Scenario::subcycle);
  r.columns = {"sigma_over_omega0", "var_q", "var_p", "n_g", "a2_re", "a2_im", "mus_q"};
  const auto grid = c.subcycle.sigma_over_omega0.values();
  // The mode family is scale free; work with omega0 = 1.
  const double t0 = c.subcycle.t0_fs * 1e-15 * angular_from_thz(c.subcycle.omega0_over_2pi_thz);
  const double rel = c.rel_tol, abs = c.abs_tol;
  r.rows = parallel_map<std::vector<double>>(grid.size(), o.jobs, [&](std::size_t i) {
    return detail::guarded("subcycle point " + std::to_string(i), [&] {
      const SpectralAmplitude f = gaussian_amplitude({1.0, grid[i], t0});
      const SecondMoments m = second_moments(mode_split(f, rel, abs));
      const VarianceForm v = variance_form(m);
      return std::vector<double>{grid[i], v.minor(), v.major(), m.n, m.a_sq.real(), m.a_sq.imag(), 1.0 / v.major()};
    });
  });
  detail::check_finite(r);
  return r;
}

/// Linear-interpolated zero crossings of y(x).
inline std::vector<double> sign_changes(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < y.size(); ++i) {
    if ((y[i] > 0.0) == (y[i + 1] > 0.0)) continue;
    out.push_back(x[i] + (x[i + 1] - x[i]) * y[i] / (y[i] - y[i + 1]));
  }
  return out;
}

inline ScanResult cmd_eo_scan(const RunConfig& c, const RunOptions& o = {}) {
  ScanResult r = detail::start(c, Scenario::eo_scan);
  const EOSetup s = c.eo_setup();
  const auto grid = c.eo_grid().values();
  const bool want1 = o.order == OrderSelection::first || o.order == OrderSelection::all;
  const bool want2 = o.order == OrderSelection::second || o.order == OrderSelection::all;
  const bool wantp = o.order == OrderSelection::perturbative || o.order == OrderSelection::all;
  r.columns = {"omega_tilde_over_2pi_thz", "theta1", "comm_signed"};
  if (want1) r.columns.insert(r.columns.end(), {"var_q_1", "var_p_1"});
  if (want2) r.columns.insert(r.columns.end(), {"var_q_2", "var_p_2"});
  if (wantp) r.columns.insert(r.columns.end(), {"var_q_pert", "var_p_pert"});
  const Tolerances tol = c.tolerances();
  const bool zero = s.probe.alpha == 0.0;
  r.rows = parallel_map<std::vector<double>>(grid.size(), o.jobs, [&](std::size_t i) {
    return detail::guarded("eo_scan point " + std::to_string(i), [&] {
      const FilterParams f = c.filter_at(angular_from_thz(grid[i]));
      std::vector<double> row{grid[i]};
      FirstOrderStats st;
      if (!zero) st = first_order_stats(s, f, WaveformMode::exact, tol);
      row.push_back(st.theta1);
      row.push_back(st.comm_signed);
      auto push = [&](const VarianceForm& v) {
        row.push_back(v.minor());
        row.push_back(v.major());
      };
      if (want1) push(zero ? VarianceForm{} : first_order_variance(st));
      if (want2) push(zero ? VarianceForm{} : second_order_stats(s, f).variance);
      if (wantp) push(zero ? VarianceForm{} : perturbative_limit_variance(st));
      return row;
    });
  });
  detail::check_finite(r);
  const auto flips = sign_changes(r.values("omega_tilde_over_2pi_thz"), r.values("comm_signed"));
  r.metadata["regime_flips_over_2pi_thz"] = flips;
  return r;
}

inline ScanResult cmd_order_compare(const RunConfig& c, const RunOptions& o = {}) {
  RunOptions all = o;
  all.order = OrderSelection::all;
  ScanResult base = cmd_eo_scan(c, all);
  ScanResult r = detail::start(c, Scenario::order_compare);
  r.columns = {"omega_tilde_over_2pi_thz", "var_q_1", "var_p_1", "var_q_2", "var_p_2", "delta_q", "delta_p",
               "in_exclusion"};
  const double wp = c.probe.omega_p_over_2pi_thz;
  const double win = c.eo_scan.exclusion_sigma_p * c.probe.sigma_p_angular_thz / two_pi;
  double max_delta = 0.0, max_excess = 0.0, max_delta_inside = 0.0;
  for (const auto& b : base.rows) {
    const double x = b[0], q1 = b[base.column("var_q_1")], p1 = b[base.column("var_p_1")];
    const double q2 = b[base.column("var_q_2")], p2 = b[base.column("var_p_2")];
    const bool inside = std::abs(x - wp) <= win;
    const double d = std::max(std::abs(q2 - q1), std::abs(p2 - p1));
    double& slot = inside ? max_delta_inside : max_delta;
    slot = std::max(slot, d);
    max_excess = std::max({max_excess, std::abs(q1 - 1.0), std::abs(p1 - 1.0), std::abs(q2 - 1.0), std::abs(p2 - 1.0)});
    r.rows.push_back({x, q1, p1, q2, p2, q2 - q1, p2 - p1, inside ? 1.0 : 0.0});
  }
  r.metadata["max_abs_delta_outside_exclusion"] = max_delta;
  r.metadata["max_abs_delta_inside_exclusion"] = max_delta_inside;
  r.metadata["max_abs_excess"] = max_excess;
  return r;
}

inline ScanResult cmd_waveform(const RunConfig& c, const RunOptions& = {}) {
  ScanResult r = detail::start(c, Scenario::waveform);
  r.columns = {"t_fs", "probed_re", "probed_im", "probed_env", "probe_re", "probe_im", "probe_env"};
  const EOSetup s = c.eo_setup();
  const double wt = s.probe.omega_p + c.waveform.omega_tilde_offset_sigma_p * s.probe.sigma_p;
  const FilterParams f = c.filter_at(wt);
  const auto tfs = c.waveform.t_fs.values();
  std::vector<double> t;
  for (double x : tfs) t.push_back(x * 1e-15);
  const TemporalWaveform w =
      detail::guarded("waveform", [&] { return temporal_waveform(s, f, t, c.waveform.mode, c.tolerances()); });
  for (std::size_t i = 0; i < t.size(); ++i)
    r.rows.push_back({tfs[i], w.probed[i].real(), w.probed[i].imag(), w.probed_env[i], w.probe[i].real(),
                      w.probe[i].imag(), w.probe_env[i]});
  detail::check_finite(r);
  r.metadata["omega_tilde_over_2pi_thz"] = thz_from_angular(wt);
  detail::guarded("waveform widths", [&] {
    r.metadata["probed_fwhm_fs"] = fwhm(tfs, w.probed_env);
    r.metadata["probe_fwhm_fs"] = fwhm(tfs, w.probe_env);
    return 0;
  });
  return r;
}

inline ScanResult cmd_dispersion_dump(const RunConfig& c, const RunOptions& = {}) {
  ScanResult r = detail::start(c, Scenario::dispersion_dump);
  r.columns = {"omega_over_2pi_thz", "n", "branch"};
  const auto& m = c.crystal.dispersion;
  for (double nu : c.dispersion_dump.omega_over_2pi_thz.values())
    r.rows.push_back({nu, detail::guarded("dispersion", [&] { return m.at_thz(nu); }),
                      static_cast<double>(m.branch_at_thz(nu))});
  detail::check_finite(r);
  return r;
}

inline ScanResult run_scenario(Scenario s, const RunConfig& c, const RunOptions& o) {
  switch (s) {
    case Scenario::subcycle: return cmd_subcycle_scan(c, o);
    case Scenario::eo_scan: return cmd_eo_scan(c, o);
    case Scenario::waveform: return cmd_waveform(c, o);
    case Scenario::order_compare: return cmd_order_compare(c, o);
    case Scenario::dispersion_dump: return cmd_dispersion_dump(c, o);
  }
  throw ConfigError("unknown scenario");
}

/// 12 significant digits, locale independent.
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string to_csv(const ScanResult& r, const RunConfig& c) {
  std::ostringstream os;
  os << "# vacuum-sampler " << VACSIM_VERSION << "\n";
  os << "# scenario: " << r.scenario << "\n";
  os << "# rel_tol: " << format_number(c.rel_tol) << "\n";
  os << "# abs_tol: " << format_number(c.abs_tol) << "\n";
  os << "# config: " << config_to_json(c).dump() << "\n";
  for (std::size_t k = 0; k < r.columns.size(); ++k) os << (k ? "," : "") << r.columns[k];
  os << "\n";
  for (const auto& row : r.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << format_number(row[k]);
    os << "\n";
  }
  return os.str();
}

inline json metadata_json(const ScanResult& r, const RunConfig& c) {
  json j = r.metadata;
  j["scenario"] = r.scenario;
  j["version"] = VACSIM_VERSION;
  j["columns"] = r.columns;
  j["rows"] = r.rows.size();
  j["config"] = config_to_json(c);
  return j;
}

/// Writes <dir>/<scenario>.csv and <dir>/<scenario>.json.
inline void write_result(const ScanResult& r, const RunConfig& c, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto base = dir / r.scenario;
  std::ofstream csv(base.string() + ".csv", std::ios::binary);
  csv << to_csv(r, c);
  std::ofstream meta(base.string() + ".json", std::ios::binary);
  meta << metadata_json(r, c).dump(2) << "\n";
  if (!csv || !meta) throw std::runtime_error("cannot write results to " + dir.string());
}

}  // namespace vacsim

#endif  // VACSIM_SCAN_HPP
