#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "fermibox/continual.hpp"
#include "fermibox/error.hpp"
#include "fermibox/occupancy.hpp"
#include "fermibox/roots.hpp"
#include "fermibox/size_effects.hpp"
#include "fermibox/special_functions.hpp"
#include "fermibox/spectrum.hpp"
#include "fermibox/thermo.hpp"

namespace fermibox::cli {

using json = nlohmann::ordered_json;

namespace {

const std::vector<std::string> kCommands = {"levels",   "state",     "sweep",   "onsets", "slopes",
                                            "criticals", "continual", "compare", "units",  "selftest-kernels"};

bool is_tabular(const std::string& command) {
  return command == "levels" || command == "sweep" || command == "slopes" || command == "compare";
}

CavityModel model_of(const RunConfig& c) {
  return c.levels == 0 ? CavityModel::full() : CavityModel::truncated(static_cast<std::size_t>(c.levels));
}

std::string model_name(const RunConfig& c) {
  return c.levels == 0 ? "full" : "truncated(" + std::to_string(c.levels) + ")";
}

json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v == 0.0 ? 0.0 : v;
}

json optional_number(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

json point_json(const ThermoPoint& p) {
  json j;
  j["tau"] = number(p.tau);
  j["t"] = number(p.t);
  j["N"] = number(p.particle_number);
  j["box"] = number(p.box_size);
  j["mu"] = number(p.mu);
  j["S"] = number(p.entropy);
  j["E"] = number(p.energy);
  j["p"] = number(p.pressure);
  j["Omega"] = number(p.grand_potential);
  j["B_T"] = number(p.B_T);
  j["B_V"] = number(p.B_V);
  j["A_V"] = number(p.A_V);
  j["C_V"] = number(p.C_V);
  j["C_p"] = number(p.C_p);
  j["alpha_p"] = number(p.alpha_p);
  j["gamma_T"] = number(p.gamma_T);
  j["beta_V"] = number(p.beta_V);
  j["stable"] = p.stable;
  j["frozen"] = p.frozen;
  return j;
}

json jumps_json(const JumpSet& s) {
  json j;
  j["S"] = optional_number(s.S);
  j["E"] = optional_number(s.E);
  j["p"] = optional_number(s.p);
  j["C_V"] = optional_number(s.C_V);
  j["C_p"] = optional_number(s.C_p);
  j["alpha_p"] = optional_number(s.alpha_p);
  j["gamma_T"] = optional_number(s.gamma_T);
  j["beta_V"] = optional_number(s.beta_V);
  return j;
}

json slopes_json(const SlopeCoefficients& k) {
  json j;
  j["K_S"] = number(k.K_S);
  j["K_p"] = number(k.K_p);
  j["K_CV"] = number(k.K_CV);
  j["K_Cp"] = number(k.K_Cp);
  j["K_alpha_p"] = number(k.K_alpha_p);
  j["K_gamma_T"] = number(k.K_gamma_T);
  j["K_beta_V"] = number(k.K_beta_V);
  j["A1"] = number(k.A1);
  j["A2"] = number(k.A2);
  return j;
}

json numbers(const std::vector<double>& values) {
  json a = json::array();
  for (double v : values) a.push_back(number(v));
  return a;
}

std::vector<double> trimmed(const std::vector<double>& populations, std::size_t keep) {
  std::size_t last = 0;
  for (std::size_t j = 0; j < populations.size(); ++j) {
    if (populations[j] != 0.0) last = j + 1;
  }
  std::vector<double> out(std::max(last, keep), 0.0);
  for (std::size_t j = 0; j < out.size() && j < populations.size(); ++j) out[j] = populations[j];
  return out;
}

std::vector<double> grid(double lo, double hi, int steps) {
  std::vector<double> g(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (steps - 1);
  return g;
}

// Evaluates fn(i) for i < count on up to `jobs` threads; results keep index order.
template <class T>
std::vector<T> parallel_map(std::size_t count, int jobs, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1, jobs));
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < std::min(threads, count); ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  std::string csv() const {
    std::string s;
    for (std::size_t i = 0; i < columns_.size(); ++i) s += (i ? "," : "") + columns_[i];
    s += '\n';
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + row[i];
      s += '\n';
    }
    return s;
  }

  std::string json_text() const {
    json a = json::array();
    for (const auto& row : rows_) {
      json o;
      for (std::size_t i = 0; i < row.size(); ++i) {
        const std::string& cell = row[i];
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end && *end == '\0' && !cell.empty()) {
          o[columns_[i]] = number(v);
        } else {
          o[columns_[i]] = cell;
        }
      }
      a.push_back(std::move(o));
    }
    return a.dump(2) + "\n";
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

std::string flag(bool b) { return b ? "1" : "0"; }

// Two-column plot files under config.plot_dir.
class PlotSink {
 public:
  explicit PlotSink(const RunConfig& c) : enabled_(!c.plot_dir.empty()) {
    if (enabled_) dir_ = output_path(c.plot_dir);
  }

  void write(const std::string& name, const std::string& xlabel, const std::string& ylabel,
             const std::vector<std::pair<double, double>>& xy) const {
    if (!enabled_) return;
    std::filesystem::create_directories(dir_);
    std::string s = "# " + xlabel + " " + ylabel + "\n";
    for (const auto& [x, y] : xy) {
      if (!std::isfinite(y)) continue;
      s += format_number(x) + " " + format_number(y) + "\n";
    }
    write_atomic(dir_ / name, s);
  }

 private:
  bool enabled_;
  std::filesystem::path dir_;
};

std::string cmd_levels(const RunConfig& c) {
  const Spectrum spectrum = bind_spectrum(enumerate_levels(c.gamma_sq_max), c.box);
  Table table({"index", "gamma_sq", "degeneracy", "cumulative_capacity", "energy"});
  std::int64_t capacity = 0;
  for (const Level& level : spectrum.levels) {
    capacity += level.degeneracy;
    table.add({std::to_string(level.index), std::to_string(level.gamma_sq), std::to_string(level.degeneracy),
               std::to_string(capacity), format_number(level.energy)});
  }
  return c.format == "json" ? table.json_text() : table.csv();
}

std::string cmd_state(const RunConfig& c) {
  const EquilibriumPoint e = equilibrium_point(model_of(c), c.box, c.tau, c.n);
  json j;
  j["model"] = model_name(c);
  j["frozen_reason"] = to_string(e.reason);
  j["point"] = point_json(e.point);
  j["populations"] = numbers(trimmed(e.state.populations, 4));
  j["units"] = std::string(kUnitsNote);
  return j.dump(2) + "\n";
}

std::vector<double> onset_temperatures(const RunConfig& c) {
  const CavityModel model = model_of(c);
  const std::size_t limit = model.is_truncated() ? std::min<std::size_t>(*model.level_count, 6) : 6;
  std::vector<double> taus;
  for (const OnsetReport& r : onset_reports(c.n, c.box, model, limit)) taus.push_back(r.tau);
  return taus;
}

std::string cmd_sweep(const RunConfig& c) {
  std::vector<double> taus = grid(c.tau_min, c.tau_max, c.steps);
  const std::vector<double> onsets = onset_temperatures(c);
  // Points on top of an onset become a pair straddling it.
  std::vector<double> points;
  for (double tau : taus) {
    bool nudged = false;
    for (double on : onsets) {
      if (std::abs(tau - on) <= 1e-9 * std::max(1.0, on)) {
        points.push_back(on * (1.0 - 1e-9));
        points.push_back(on * (1.0 + 1e-9));
        nudged = true;
        break;
      }
    }
    if (!nudged) points.push_back(tau);
  }
  if (c.mark_onsets) {
    for (double on : onsets) {
      if (on > c.tau_min && on < c.tau_max) {
        points.push_back(on * (1.0 - 1e-9));
        points.push_back(on * (1.0 + 1e-9));
      }
    }
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  const CavityModel model = model_of(c);
  const auto results = parallel_map<EquilibriumPoint>(
      points.size(), c.jobs, [&](std::size_t i) { return equilibrium_point(model, c.box, points[i], c.n); });

  Table table({"tau", "t", "S", "E", "p", "C_V", "C_p", "alpha_p", "gamma_T", "beta_V", "stable", "frozen"});
  std::vector<std::vector<std::pair<double, double>>> pops(4);
  std::vector<std::pair<double, double>> cv, cp;
  for (const EquilibriumPoint& e : results) {
    const ThermoPoint& p = e.point;
    table.add({format_number(p.tau), format_number(p.t), format_number(p.entropy), format_number(p.energy),
               format_number(p.pressure), format_number(p.C_V), format_number(p.C_p), format_number(p.alpha_p),
               format_number(p.gamma_T), format_number(p.beta_V), flag(p.stable), flag(p.frozen)});
    for (std::size_t j = 0; j < 4; ++j) pops[j].emplace_back(p.tau, e.state.population(j));
    cv.emplace_back(p.tau, p.C_V);
    cp.emplace_back(p.tau, p.C_p);
  }
  const PlotSink plots(c);
  for (std::size_t j = 0; j < 4; ++j) {
    plots.write("fig3_n" + std::to_string(j + 1) + ".dat", "tau", "n" + std::to_string(j + 1), pops[j]);
  }
  plots.write("fig4_C_V.dat", "tau", "C_V", cv);
  plots.write("fig4_C_p.dat", "tau", "C_p", cp);
  return c.format == "json" ? table.json_text() : table.csv();
}

std::string cmd_onsets(const RunConfig& c) {
  const CavityModel model = model_of(c);
  const std::size_t limit = model.is_truncated() ? std::min<std::size_t>(*model.level_count, 6) : 6;
  json j;
  j["N"] = number(c.n);
  j["box"] = number(c.box);
  j["model"] = model_name(c);
  const CriticalNumbers& crit = ground_band_criticals();
  if (c.n > crit.N_star && c.n <= BottomShells::z1) j["tau0"] = number(tau0(c.n, c.box));
  if (c.n >= crit.N_m && c.n < crit.N_star) j["tau_star"] = number(tau_star_small_N(c.n, c.box).tau_star);
  json list = json::array();
  for (const OnsetReport& r : onset_reports(c.n, c.box, model, limit)) {
    json o;
    o["kind"] = to_string(r.kind);
    if (r.level) o["level"] = r.level;
    o["tau"] = number(r.tau);
    o["populations_before"] = numbers(r.populations_before);
    o["populations_after"] = numbers(r.populations_after);
    o["jumps"] = jumps_json(r.jumps);
    if (r.slopes) o["slopes"] = slopes_json(*r.slopes);
    list.push_back(std::move(o));
  }
  j["onsets"] = std::move(list);
  return j.dump(2) + "\n";
}

std::string cmd_slopes(const RunConfig& c) {
  const double lo = c.n_min > 0.0 ? c.n_min : ground_band_criticals().N_star * (1.0 + 1e-9);
  const double hi = c.n_max > 0.0 ? c.n_max : BottomShells::z1;
  Table table({"N", "K_S", "K_p", "K_CV", "K_Cp", "K_alpha_p", "K_gamma_T", "K_beta_V"});
  std::vector<std::pair<double, double>> kcv, kcp, ka, kb, kg;
  for (double n : grid(lo, hi, c.steps)) {
    const SlopeCoefficients k = slope_coefficients(n);
    table.add({format_number(n), format_number(k.K_S), format_number(k.K_p), format_number(k.K_CV),
               format_number(k.K_Cp), format_number(k.K_alpha_p), format_number(k.K_gamma_T),
               format_number(k.K_beta_V)});
    kcv.emplace_back(n, k.K_CV);
    kcp.emplace_back(n, k.K_Cp);
    ka.emplace_back(n, k.K_alpha_p);
    kb.emplace_back(n, k.K_beta_V);
    kg.emplace_back(n, k.K_gamma_T);
  }
  const PlotSink plots(c);
  plots.write("fig1_KCV.dat", "N", "K_CV", kcv);
  plots.write("fig1_KCp.dat", "N", "K_Cp", kcp);
  plots.write("fig2_Kalpha_p.dat", "N", "K_alpha_p", ka);
  plots.write("fig2_Kbeta_V.dat", "N", "K_beta_V", kb);
  plots.write("fig2_Kgamma_T.dat", "N", "K_gamma_T", kg);
  return c.format == "json" ? table.json_text() : table.csv();
}

std::string cmd_criticals(const RunConfig& c) {
  const CriticalNumbers crit = critical_numbers(model_of(c));
  json j;
  j["model"] = model_name(c);
  j["N_m"] = number(crit.N_m);
  j["N_star"] = number(crit.N_star);
  j["N_c"] = number(crit.N_c);
  j["N_c1"] = number(crit.N_c1);
  json marks;
  marks["tau_star_L2_at_N_m"] = number(tau_star_small_N(crit.N_m, 1.0).tau_star);
  marks["tau0_L2_at_N_m"] = number(tau0(crit.N_m, 1.0));
  marks["tau0_L2_at_N_star"] = number(tau0(crit.N_star, 1.0));
  marks["tau_star_L2_at_N_star"] = number(tau_star_small_N(crit.N_star, 1.0).tau_star);
  j["landmarks"] = std::move(marks);

  const PlotSink plots(c);
  std::vector<std::pair<double, double>> t0, ts, t12, t23;
  for (double n : grid(crit.N_m, 1.0, c.steps)) t0.emplace_back(n, tau0(n, 1.0));
  for (double n : grid(crit.N_m, crit.N_star, c.steps)) ts.emplace_back(n, tau_star_small_N(n, 1.0).tau_star);
  for (double n : grid(BottomShells::z1 + 0.05, BottomShells::z1 + BottomShells::z2, c.steps)) {
    const BandOnsets b = band_onsets(n, 1.0);
    if (b.tau_1to2 > 0.0) t12.emplace_back(n, b.tau_1to2);
    t23.emplace_back(n, b.tau_2to3);
  }
  plots.write("fig5_tau0.dat", "N", "tau0_L2", t0);
  plots.write("fig5_tau_star.dat", "N", "tau_star_L2", ts);
  plots.write("fig6_tau12.dat", "N", "tau12_L2", t12);
  plots.write("fig6_tau23.dat", "N", "tau23_L2", t23);
  return j.dump(2) + "\n";
}

json stoner_json(const StonerThermo& s) {
  json j;
  j["phi_half"] = number(s.phi.phi_half);
  j["phi_three_half"] = number(s.phi.phi_three_half);
  j["phi_five_half"] = number(s.phi.phi_five_half);
  j["path"] = std::string(to_string(s.phi.path));
  j["Omega"] = number(s.grand_potential);
  j["N"] = number(s.particle_number);
  j["p"] = number(s.pressure_natural / kPressureScale);
  j["p_natural"] = number(s.pressure_natural);
  j["E"] = number(s.energy);
  j["S"] = number(s.entropy);
  j["C_V"] = number(s.C_V);
  j["C_p"] = number(s.C_p);
  j["alpha_p"] = number(s.alpha_p);
  j["gamma_T"] = number(s.gamma_T);
  j["beta_V"] = number(s.beta_V);
  return j;
}

std::string cmd_continual(const RunConfig& c) {
  const ContinualParams params = ContinualParams::from_box(c.t, c.tau, c.box);
  const StonerThermo s = stoner_thermodynamics(c.t, c.tau, c.box * c.box * c.box);
  const ContinualSums sums = continual_sums(c.t, params.ratio);
  json j;
  j["t"] = number(c.t);
  j["tau"] = number(c.tau);
  j["box"] = number(c.box);
  j["ratio"] = number(params.ratio);
  j["lambda"] = number(params.lambda);
  j["continual_valid"] = params.continual_valid();
  j["support"] = {{"x1", number(sums.support.x1)}, {"x2", number(sums.support.x2)}};
  j["sums"] = {{"g2", number(sums.g2)},
               {"g4", number(sums.g4)},
               {"inv_theta1", number(sums.inv_theta1)},
               {"d", number(sums.d)},
               {"N", number(sums.particle_number)}};
  j["stoner"] = stoner_json(s);
  j["units"] = std::string(kUnitsNote);

  const PlotSink plots(c);
  std::vector<std::pair<double, double>> n, nfd, p1, p3, p5;
  for (double x : grid(0.0, 1.2 * std::max(sums.support.x2, 1.0), c.steps)) {
    n.emplace_back(x, continual_population(x, c.t, params.ratio));
    nfd.emplace_back(x, fermi_dirac_population(x, c.t));
  }
  for (double t : grid(-5.0, 5.0, c.steps)) {
    const StonerSet phi = stoner_set(t);
    p1.emplace_back(t, phi.phi_half);
    p3.emplace_back(t, phi.phi_three_half);
    p5.emplace_back(t, phi.phi_five_half);
  }
  plots.write("fig7_n.dat", "x", "n", n);
  plots.write("fig7_nFD.dat", "x", "n_FD", nfd);
  plots.write("fig8_phi_half.dat", "t", "phi_half", p1);
  plots.write("fig8_phi_three_half.dat", "t", "phi_three_half", p3);
  plots.write("fig8_phi_five_half.dat", "t", "phi_five_half", p5);
  return j.dump(2) + "\n";
}

// t with 2(L/Λ)³ Φ_{3/2}(t) = N.
double continual_chemical_potential(double n, double ratio) {
  const double cells2 = 2.0 * ratio * ratio * ratio;
  auto fdf = [&](double t) {
    const StonerSet s = stoner_set(t);
    return std::pair{cells2 * s.phi_three_half - n, cells2 * s.phi_half};
  };
  double lo = -1.0, hi = 1.0;
  while (fdf(lo).first > 0.0) lo = 2.0 * lo - 1.0;
  while (fdf(hi).first < 0.0) hi = 2.0 * hi + 1.0;
  return roots::newton_bisect(fdf, lo, hi, 0.5 * (lo + hi), 1e-13 * n);
}

double rel(double a, double b) { return b != 0.0 ? (a - b) / b : (a == 0.0 ? 0.0 : HUGE_VAL); }

std::string cmd_compare(const RunConfig& c) {
  const CavityModel model = model_of(c);
  const std::vector<double> taus = grid(c.tau_min, c.tau_max, c.steps);
  struct Pair {
    ThermoPoint finite;
    StonerThermo inf;
  };
  const auto rows = parallel_map<Pair>(taus.size(), c.jobs, [&](std::size_t i) {
    Pair p;
    p.finite = equilibrium_point(model, c.box, taus[i], c.n).point;
    const double ratio = c.box * std::sqrt(std::numbers::pi * taus[i]);
    p.inf = stoner_thermodynamics(continual_chemical_potential(c.n, ratio), taus[i], c.box * c.box * c.box);
    return p;
  });
  Table table({"tau", "t", "t_inf", "E", "E_inf", "E_rel", "p", "p_inf", "p_rel", "S", "S_inf", "S_rel", "C_V",
               "C_V_inf", "C_V_rel", "C_p", "C_p_inf", "C_p_rel"});
  for (const Pair& r : rows) {
    const ThermoPoint& f = r.finite;
    const ThermoPoint g = r.inf.to_point(c.box);
    table.add({format_number(f.tau), format_number(f.t), format_number(g.t), format_number(f.energy),
               format_number(g.energy), format_number(rel(f.energy, g.energy)), format_number(f.pressure),
               format_number(g.pressure), format_number(rel(f.pressure, g.pressure)), format_number(f.entropy),
               format_number(g.entropy), format_number(rel(f.entropy, g.entropy)), format_number(f.C_V),
               format_number(g.C_V), format_number(rel(f.C_V, g.C_V)), format_number(f.C_p), format_number(g.C_p),
               format_number(rel(f.C_p, g.C_p))});
  }
  return c.format == "json" ? table.json_text() : table.csv();
}

std::string cmd_units(const RunConfig& c) {
  json j;
  j["length_cm"] = number(c.length_cm);
  j["a_B_over_L"] = number(kBohrRadiusCm / c.length_cm);
  j["epsilon1_K"] = number(ground_level_kelvin(c.length_cm));
  return j.dump(2) + "\n";
}

struct Check {
  std::string name;
  double error;
  double tolerance;
};

std::string cmd_selftest(bool& ok) {
  std::vector<Check> checks;
  double worst = 0.0;
  for (double x : {0.05, 0.5, 1.0, 3.7, 12.0, 150.0}) {
    worst = std::max(worst, std::abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) * x);
  }
  checks.push_back({"digamma_recurrence", worst, 1e-12});
  worst = 0.0;
  for (double x : {0.05, 0.5, 1.0, 3.7, 12.0, 150.0}) {
    worst = std::max(worst, std::abs(trigamma(x + 1.0) - trigamma(x) + 1.0 / (x * x)) * x * x);
  }
  checks.push_back({"trigamma_recurrence", worst, 1e-12});
  worst = 0.0;
  for (double x : {0.05, 0.5, 1.0, 3.7, 12.0, 150.0}) {
    worst = std::max(worst, std::abs(tetragamma(x + 1.0) - tetragamma(x) - 2.0 / (x * x * x)) * x * x * x);
  }
  checks.push_back({"tetragamma_recurrence", worst, 1e-12});
  worst = 0.0;
  for (double z : {1.0, 16.0, 48.0, 96.0}) {
    for (double n : {0.0, 0.1, 0.37, 0.5, 0.9}) {
      worst = std::max(worst, std::abs(theta(n, z) + theta(1.0 - n, z)));
      const double x = theta(n, z);
      worst = std::max(worst, std::abs(solve_population(z, x) - n));
    }
  }
  checks.push_back({"theta_antisymmetry_and_inverse", worst, 1e-10});
  worst = 0.0;
  for (StonerIndex s : {StonerIndex::Half, StonerIndex::ThreeHalf, StonerIndex::FiveHalf}) {
    for (double t : {-6.0, -4.0, -2.0, -1.0}) {
      const double a = stoner_phi_series(s, t);
      worst = std::max(worst, std::abs(a - stoner_phi_quadrature(s, t)) / a);
    }
  }
  checks.push_back({"stoner_series_vs_quadrature", worst, 1e-9});
  worst = 0.0;
  for (StonerIndex s : {StonerIndex::Half, StonerIndex::ThreeHalf, StonerIndex::FiveHalf}) {
    for (double t : {25.0, 30.0, 40.0, 60.0}) {
      const double a = stoner_phi_sommerfeld(s, t);
      worst = std::max(worst, std::abs(a - stoner_phi_quadrature(s, t)) / a);
    }
  }
  checks.push_back({"stoner_sommerfeld_vs_quadrature", worst, 1e-9});

  std::string s;
  ok = true;
  for (const Check& check : checks) {
    const bool pass = check.error <= check.tolerance;
    ok = ok && pass;
    char line[160];
    std::snprintf(line, sizeof line, "%s %s max_error=%.3e tolerance=%.1e\n", pass ? "PASS" : "FAIL",
                  check.name.c_str(), check.error, check.tolerance);
    s += line;
  }
  return s;
}

}  // namespace

std::string format_number(double value) {
  if (value == 0.0) value = 0.0;
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9e", value);
  return buf;
}

std::filesystem::path output_path(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("FERMIBOX_OUTPUT_DIR"); dir && *dir) return std::filesystem::path(dir) / p;
  }
  return p;
}

void write_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << text;
    f.flush();
    if (!f) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

json to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["n"] = c.n;
  j["box"] = c.box;
  j["tau"] = c.tau;
  j["tau_min"] = c.tau_min;
  j["tau_max"] = c.tau_max;
  j["steps"] = c.steps;
  j["t"] = c.t;
  j["n_min"] = c.n_min;
  j["n_max"] = c.n_max;
  j["length_cm"] = c.length_cm;
  j["gamma_sq_max"] = c.gamma_sq_max;
  j["levels"] = c.levels;
  j["format"] = c.format;
  j["output"] = c.output;
  j["plot_dir"] = c.plot_dir;
  j["jobs"] = c.jobs;
  j["mark_onsets"] = c.mark_onsets;
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("command", c.command);
  get("n", c.n);
  get("box", c.box);
  get("tau", c.tau);
  get("tau_min", c.tau_min);
  get("tau_max", c.tau_max);
  get("steps", c.steps);
  get("t", c.t);
  get("n_min", c.n_min);
  get("n_max", c.n_max);
  get("length_cm", c.length_cm);
  get("gamma_sq_max", c.gamma_sq_max);
  get("levels", c.levels);
  get("format", c.format);
  get("output", c.output);
  get("plot_dir", c.plot_dir);
  get("jobs", c.jobs);
  get("mark_onsets", c.mark_onsets);
  return c;
}

RunConfig resolve(RunConfig c) {
  if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end()) {
    throw ValidationError("unknown subcommand '" + c.command + "'");
  }
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(name) + " must be positive");
  };
  if (c.levels < 0) c.levels = c.command == "compare" ? 0 : 4;
  if (c.format.empty()) c.format = is_tabular(c.command) ? "csv" : "json";
  if (c.format != "csv" && c.format != "json") throw ValidationError("format must be csv or json");
  if (c.format == "csv" && !is_tabular(c.command) && c.command != "selftest-kernels") {
    throw ValidationError(c.command + " emits JSON only");
  }
  if (c.jobs < 1) throw ValidationError("jobs must be >= 1");
  if (c.steps < 2) throw ValidationError("steps must be >= 2");
  positive(c.box, "box");
  const std::string& k = c.command;
  if (k == "state" || k == "sweep" || k == "onsets" || k == "compare") positive(c.n, "n");
  if (k == "state" && !(c.tau >= 0.0 && std::isfinite(c.tau))) throw ValidationError("tau must be >= 0");
  if (k == "continual") positive(c.tau, "tau");
  if (k == "sweep" || k == "compare") {
    positive(c.tau_min, "tau-min");
    positive(c.tau_max, "tau-max");
    if (!(c.tau_min < c.tau_max)) throw ValidationError("tau-min must be below tau-max");
  }
  if (k == "slopes" && c.n_min > 0.0 && c.n_max > 0.0 && !(c.n_min < c.n_max)) {
    throw ValidationError("n-min must be below n-max");
  }
  if (k == "levels" && c.gamma_sq_max < 3) throw ValidationError("gamma-sq-max must be >= 3");
  if (k == "units") positive(c.length_cm, "length-cm");
  if (!std::isfinite(c.t)) throw ValidationError("t must be finite");
  return c;
}

void execute(const RunConfig& c, std::ostream& out, bool& ok);

void execute(const RunConfig& c, std::ostream& out) {
  bool ok = true;
  execute(c, out, ok);
  if (!ok) throw std::runtime_error("self-test failed");
}

void execute(const RunConfig& c, std::ostream& out, bool& ok) {
  ok = true;
  std::string text;
  const std::string& k = c.command;
  if (k == "levels") text = cmd_levels(c);
  else if (k == "state") text = cmd_state(c);
  else if (k == "sweep") text = cmd_sweep(c);
  else if (k == "onsets") text = cmd_onsets(c);
  else if (k == "slopes") text = cmd_slopes(c);
  else if (k == "criticals") text = cmd_criticals(c);
  else if (k == "continual") text = cmd_continual(c);
  else if (k == "compare") text = cmd_compare(c);
  else if (k == "units") text = cmd_units(c);
  else if (k == "selftest-kernels") text = cmd_selftest(ok);
  if (c.output.empty()) {
    out << text;
  } else {
    write_atomic(output_path(c.output), text);
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  std::string config_path;
  std::string emit_path;

  CLI::App app{"Thermodynamics of an ideal Fermi gas in a cubic cavity"};
  app.fallthrough();
  app.require_subcommand(0, 1);
  app.add_option("--levels", c.levels, "Bottom M levels only (0: full spectrum; default 4, compare: 0)");
  app.add_option("--format", c.format, "csv or json");
  app.add_option("--output", c.output, "Write output to this file (atomic)");
  app.add_option("--plot-dir", c.plot_dir, "Directory for fig<k>_<quantity>.dat files");
  app.add_option("--jobs", c.jobs, "Worker threads for grid evaluation");
  app.add_option("--config", config_path, "Replay a JSON config written by --emit-config");
  app.add_option("--emit-config", emit_path, "Write the effective config as JSON");

  auto n_opt = [&](CLI::App* s) { s->add_option("--n", c.n, "Mean particle number N"); };
  auto box_opt = [&](CLI::App* s) { s->add_option("--box", c.box, "Edge length L/a_*"); };
  auto range_opt = [&](CLI::App* s) {
    s->add_option("--tau-min", c.tau_min, "Lowest temperature");
    s->add_option("--tau-max", c.tau_max, "Highest temperature");
    s->add_option("--steps", c.steps, "Grid points (>= 2)");
  };

  auto* levels = app.add_subcommand("levels", "Energy levels and degeneracies");
  levels->add_option("--gamma-sq-max", c.gamma_sq_max, "Largest gamma^2 to enumerate");
  box_opt(levels);

  auto* state = app.add_subcommand("state", "Thermodynamic state at one temperature");
  n_opt(state);
  box_opt(state);
  state->add_option("--tau", c.tau, "Temperature T/eps_*");

  auto* sweep = app.add_subcommand("sweep", "State functions over a temperature grid");
  n_opt(sweep);
  box_opt(sweep);
  range_opt(sweep);
  sweep->add_flag("--mark-onsets", c.mark_onsets, "Add paired rows straddling every onset in range");

  auto* onsets = app.add_subcommand("onsets", "Onset temperatures, jumps and slopes");
  n_opt(onsets);
  box_opt(onsets);

  auto* slopes = app.add_subcommand("slopes", "Slope coefficients K over N_* < N <= 16");
  slopes->add_option("--n-min", c.n_min, "Lowest N (default just above N_*)");
  slopes->add_option("--n-max", c.n_max, "Highest N (default 16)");
  slopes->add_option("--steps", c.steps, "Grid points (>= 2)");

  auto* criticals = app.add_subcommand("criticals", "Critical particle numbers");
  criticals->add_option("--steps", c.steps, "Grid points for plot data");

  auto* continual = app.add_subcommand("continual", "Continual-limit and Stoner thermodynamics");
  continual->add_option("--t", c.t, "Reduced chemical potential mu/T");
  continual->add_option("--tau", c.tau, "Temperature T/eps_*");
  box_opt(continual);
  continual->add_option("--steps", c.steps, "Grid points for plot data");

  auto* compare = app.add_subcommand("compare", "Finite cavity against the continual limit");
  n_opt(compare);
  box_opt(compare);
  range_opt(compare);

  auto* units = app.add_subcommand("units", "Ground-level energy in kelvin");
  units->add_option("--length-cm", c.length_cm, "Edge length in cm");

  app.add_subcommand("selftest-kernels", "Recurrence and crossover checks of the special functions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << "\n";
    return 2;
  }

  try {
    if (!config_path.empty()) {
      std::ifstream f(output_path(config_path));
      if (!f) throw ValidationError("cannot read config " + config_path);
      json j;
      try {
        f >> j;
      } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed config: ") + e.what());
      }
      c = config_from_json(j);
    } else {
      const auto used = app.get_subcommands();
      if (used.empty()) {
        err << app.help();
        return 2;
      }
      c.command = used.front()->get_name();
    }
    c = resolve(c);
    if (!emit_path.empty()) write_atomic(output_path(emit_path), to_json(c).dump(2) + "\n");
    bool ok = true;
    execute(c, out, ok);
    return ok ? 0 : 1;
  } catch (const ValidationError& e) {
    err << "error: ValidationError: " << e.what() << "\n";
    return 2;
  } catch (const fermibox::Error& e) {
    err << "error: " << e.kind() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace fermibox::cli
