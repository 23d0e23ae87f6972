// sympb: command-line front end for the bottleneck-geometry experiments.
//
// Exit status: 0 on success, 1 for numerical-domain failures (below-saddle energies, non-definite matrices, diverging
// trajectories), 2 for usage, parse and I/O problems.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sympb/io.hpp"
#include "sympb/sympb.hpp"

namespace {

  using sympb::io::json;
  using sympb::io::Table;

  constexpr int exit_ok = 0;
  constexpr int exit_domain = 1;
  constexpr int exit_input = 2;

  // Reads a JSON object as CLI11 configuration. Nested objects named after a subcommand configure that subcommand;
  // flat keys go to the top-level option of that name or, failing that, to the subcommand being run.
  class JsonConfig : public CLI::Config {
   public:
    explicit JsonConfig(CLI::App const* app) : app_(app) {}

    std::string to_config(CLI::App const*, bool, bool, std::string) const override {
      throw CLI::ConfigError("writing JSON configuration is not supported");
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
      json doc;
      try {
        doc = json::parse(input);
      } catch (json::exception const& e) {
        throw CLI::ConfigError(std::string("config file is not valid JSON: ") + e.what());
      }
      if (!doc.is_object()) {
        throw CLI::ConfigError("config file must hold a JSON object");
      }
      std::vector<CLI::ConfigItem> items;
      std::string active;
      if (auto subs = app_->get_subcommands(); !subs.empty()) {
        active = subs.front()->get_name();
      }
      for (auto const& [key, value] : doc.items()) {
        if (value.is_object()) {
          for (auto const& [inner, v] : value.items()) {
            items.push_back(item({key}, inner, v));
          }
        } else if (app_->get_option_no_throw("--" + key) != nullptr || active.empty()) {
          items.push_back(item({}, key, value));
        } else {
          items.push_back(item({active}, key, value));
        }
      }
      return items;
    }

   private:
    static std::string scalar(json const& v) {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number_float()) return sympb::io::format_double(v.get<double>());
      return v.dump();
    }

    static CLI::ConfigItem item(std::vector<std::string> parents, std::string const& name, json const& v) {
      CLI::ConfigItem it;
      it.parents = std::move(parents);
      it.name = name;
      if (v.is_array()) {
        for (json const& e : v) it.inputs.push_back(scalar(e));
      } else {
        it.inputs.push_back(scalar(v));
      }
      return it;
    }

    CLI::App const* app_;
  };

  struct Globals {
    std::uint64_t seed = 0;
    std::string format = "csv";
    std::string output;
    std::size_t workers = 1;
  };

  struct ModelChoice {
    std::string builtin = "2dof";
    std::string file;

    [[nodiscard]] sympb::CnfModel load() const {
      if (!file.empty()) return sympb::io::read_cnf(file);
      return builtin == "3dof" ? sympb::builtin_eckart_morse_morse_3dof() : sympb::builtin_eckart_morse_2dof();
    }

    [[nodiscard]] json describe() const { return file.empty() ? json{{"builtin", builtin}} : json{{"model", file}}; }

    void bind(CLI::App* sub) {
      sub->add_option("--builtin", builtin, "Built-in normal form")
          ->check(CLI::IsMember({"2dof", "3dof"}))
          ->capture_default_str();
      sub->add_option("--model", file, "Normal-form coefficient file (JSON); overrides --builtin");
    }
  };

  void emit(Globals const& g, Table const& table, json const& provenance, json const& extra = json::object()) {
    std::ostringstream buf;
    if (g.format == "json") {
      json doc = sympb::io::table_to_json(table, provenance);
      for (auto const& [k, v] : extra.items()) doc[k] = v;
      buf << doc.dump(2) << '\n';
    } else {
      sympb::io::write_csv(buf, table, provenance);
    }
    if (g.output.empty() || g.output == "-") {
      std::cout << buf.str();
      std::cout.flush();
      return;
    }
    std::ofstream out(g.output, std::ios::binary);
    if (!out) throw sympb::IoError("cannot write '" + g.output + "'");
    out << buf.str();
    if (!out) throw sympb::IoError("failed writing '" + g.output + "'");
  }

  void write_side_table(Globals const& g, std::string const& path, Table const& table, json const& provenance) {
    Globals side = g;
    side.output = path;
    emit(side, table, provenance);
  }

  json base_provenance(std::string const& command, Globals const& g) {
    return {{"command", command}, {"seed", g.seed}, {"format", g.format}, {"version", "0.1.0"}};
  }

  std::size_t bath_index_from_label(std::size_t label, sympb::CnfModel const& m) {
    if (label < 2 || label - 2 >= m.bath_count()) {
      throw sympb::ArityError("bath mode label " + std::to_string(label) + " is outside 2.."
                              + std::to_string(m.bath_count() + 1));
    }
    return label - 2;
  }

  // ---------------------------------------------------------------------------------------------------------------

  struct CapacityOpts {
    std::string matrix_file;
    bool blockdiag = false;
  };

  void run_capacity(Globals const& g, CapacityOpts const& o) {
    sympb::Matrix m = sympb::io::read_matrix(o.matrix_file);
    sympb::SymmetricPDMatrix pd(m);
    sympb::SymplecticSpectrum spec;
    if (o.blockdiag) {
      if (pd.dim() % 2 != 0) throw sympb::DimensionError("matrix dimension must be even");
      Eigen::Index n = pd.dim() / 2;
      sympb::Matrix off = m.topRightCorner(n, n);
      if (sympb::max_abs(off) != 0.0) throw sympb::PreconditionError("--blockdiag needs zero off-diagonal blocks");
      spec = sympb::symplectic_spectrum_blockdiag(sympb::SymmetricPDMatrix(m.topLeftCorner(n, n)),
                                                  sympb::SymmetricPDMatrix(m.bottomRightCorner(n, n)));
    } else {
      spec = sympb::symplectic_spectrum(pd);
    }
    Table t{{"quantity", "value"}, {}};
    t.rows.push_back({std::string("capacity"), std::numbers::pi / spec.max()});
    for (std::size_t k = 0; k < spec.size(); ++k) {
      t.rows.push_back({"lambda_" + std::to_string(k + 1), spec.values[k]});
    }
    json prov = base_provenance("capacity", g);
    prov["matrix"] = o.matrix_file;
    prov["blockdiag"] = o.blockdiag;
    emit(g, t, prov);
  }

  // ---------------------------------------------------------------------------------------------------------------

  struct WidthsOpts {
    ModelChoice model;
    double e_min = 0.0;
    double e_max = 0.0;
    std::size_t steps = 1;
    std::int64_t samples = 100000;
  };

  void run_widths(Globals const& g, WidthsOpts o) {
    sympb::CnfModel m = o.model.load();
    if (o.steps < 1) throw sympb::PreconditionError("--steps must be at least 1");
    if (o.steps > 1 && !(o.e_max >= o.e_min)) throw sympb::PreconditionError("--e-max must not be below --e-min");
    if (!(o.e_min > m.e0())) {
      throw sympb::BelowSaddleError("--e-min " + sympb::io::format_double(o.e_min) + " is not above the saddle energy "
                                    + sympb::io::format_double(m.e0()));
    }
    std::size_t nb = m.bath_count();
    Table t;
    t.columns = {"energy"};
    for (std::size_t k = 0; k < nb; ++k) t.columns.push_back("j_max_" + std::to_string(k + 2));
    for (char const* c : {"c_cand", "limiting_mode", "volume", "flux", "std_error", "mc_samples", "seed"}) {
      t.columns.emplace_back(c);
    }
    for (std::size_t i = 0; i < o.steps; ++i) {
      double e = o.steps == 1 ? o.e_min
                              : o.e_min + (o.e_max - o.e_min) * static_cast<double>(i) / static_cast<double>(o.steps - 1);
      sympb::WidthReport w = sympb::candidate_width(m, e);
      sympb::FluxReport f = sympb::action_volume_mc(m, e, o.samples, g.seed, g.workers);
      std::vector<sympb::io::Cell> row{e};
      for (double j : w.j_max) row.emplace_back(j);
      row.emplace_back(w.c_cand);
      row.emplace_back(static_cast<std::int64_t>(w.limiting_mode));
      row.emplace_back(f.volume);
      row.emplace_back(f.flux);
      row.emplace_back(f.std_error);
      row.emplace_back(static_cast<std::int64_t>(f.mc_samples));
      row.emplace_back(f.seed);
      t.rows.push_back(std::move(row));
    }
    json prov = base_provenance("widths", g);
    prov.update(o.model.describe());
    prov["e_min"] = o.e_min;
    prov["e_max"] = o.e_max;
    prov["steps"] = o.steps;
    prov["samples"] = o.samples;
    emit(g, t, prov);
  }

  // ---------------------------------------------------------------------------------------------------------------

  struct Exp1Opts {
    ModelChoice model;
    std::vector<double> radii{0.05, 0.1, 0.2, 0.4};
    double sigma = 0.5;
    bool unmixed = false;
    std::size_t tau_points = 600;
    std::optional<double> tau_max;
    double e_center = 0.0;
    std::string curves;
  };

  void run_exp1(Globals const& g, Exp1Opts const& o) {
    if (o.radii.empty()) throw sympb::PreconditionError("--radii needs at least one radius");
    for (double r : o.radii) {
      if (!(r > 0.0)) throw sympb::PreconditionError("radii must be positive");
    }
    if (o.tau_points < 1) throw sympb::PreconditionError("--tau-points must be at least 1");
    sympb::QuadraticSaddleModel q = sympb::quadratic_part(o.model.load());
    std::vector<double> taus = sympb::default_tau_grid(q, o.tau_points);
    if (o.tau_max) {
      if (!(*o.tau_max >= 0.0)) throw sympb::PreconditionError("--tau-max must be non-negative");
      for (double& t : taus) t *= *o.tau_max / (3.0 / q.lambda);
    }
    auto n = static_cast<Eigen::Index>(q.dof());
    sympb::Matrix s_mix = o.unmixed ? sympb::Matrix::Identity(2 * n, 2 * n) : sympb::random_symplectic(n, o.sigma, g.seed);
    sympb::RadiusScan scan = sympb::radius_scan(q, o.radii, s_mix, taus, o.e_center, g.workers);

    Table t{{"r", "min_area", "pi_r2", "c_cand_ref"}, {}};
    for (auto const& row : scan.rows) t.rows.push_back({row.radius, row.min_area, row.pi_r2, row.c_cand_ref});
    Table curves{{"r", "tau", "area"}, {}};
    for (auto const& c : scan.curves) {
      for (std::size_t i = 0; i < c.taus.size(); ++i) curves.rows.push_back({c.radius, c.taus[i], c.areas[i]});
    }

    json prov = base_provenance("exp1", g);
    prov.update(o.model.describe());
    prov["radii"] = o.radii;
    prov["mixer"] = o.unmixed ? json("identity") : json{{"sigma", o.sigma}, {"seed", g.seed}};
    prov["tau_points"] = o.tau_points;
    prov["tau_max"] = taus.back();
    prov["e_center"] = o.e_center;
    emit(g, t, prov);
    if (!o.curves.empty()) write_side_table(g, o.curves, curves, prov);
  }

  // ---------------------------------------------------------------------------------------------------------------

  struct EnsembleOpts {
    ModelChoice model;
    std::size_t n_traj = sympb::default_ensemble_size;
    double e_center = 0.0;
    std::optional<double> delta_e;
    double q1_range = 1.0;
    std::size_t mode_label = 2;

    void bind(CLI::App* sub) {
      model.bind(sub);
      sub->add_option("-N,--n-traj", n_traj, "Initial conditions per ensemble")->capture_default_str();
      sub->add_option("--e-center", e_center, "Central energy E")->capture_default_str();
      sub->add_option("--delta-e", delta_e, "Energy half-width (default 1% of E - e0)");
      sub->add_option("--q1-range", q1_range, "Q1 is drawn from [-q1_range, 0)")->capture_default_str();
      sub->add_option("--localized-mode", mode_label, "Bath mode label (2, 3, ...) restricted by xi")
          ->capture_default_str();
    }

    [[nodiscard]] sympb::EnsembleSpec spec(sympb::CnfModel const& m, std::uint64_t seed) const {
      sympb::EnsembleSpec s;
      s.n_traj = n_traj;
      s.e_center = e_center;
      s.delta_e = delta_e;
      s.q1_range = q1_range;
      s.seed = seed;
      s.localized_mode = bath_index_from_label(mode_label, m);
      return s;
    }

    void describe(json& prov, sympb::CnfModel const& m) const {
      prov.update(model.describe());
      prov["n_traj"] = n_traj;
      prov["e_center"] = e_center;
      prov["delta_e"] = spec(m, 0).resolved_delta_e(m.e0());
      prov["q1_range"] = q1_range;
      prov["localized_mode"] = mode_label;
    }
  };

  struct Exp2Opts {
    EnsembleOpts ens;
    std::vector<double> xis{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::optional<double> t_max;
  };

  void run_exp2(Globals const& g, Exp2Opts const& o) {
    if (o.xis.empty()) throw sympb::PreconditionError("--xi needs at least one value");
    sympb::CnfModel m = o.ens.model.load();
    double t_max = o.t_max ? *o.t_max : sympb::default_t_max(m);
    if (!(t_max >= 0.0)) throw sympb::PreconditionError("--t-max must be non-negative");
    sympb::TransmissionScan scan = sympb::transmission_scan(m, o.ens.spec(m, g.seed), o.xis, t_max, g.workers);

    Table t{{"kind", "xi", "fraction", "n_transmitted", "n_total", "t_max", "seed"}, {}};
    auto add = [&](sympb::TransmissionResult const& r) {
      t.rows.push_back({std::string(sympb::to_string(r.kind)), r.xi, r.fraction, static_cast<std::int64_t>(r.n_transmitted),
                        static_cast<std::int64_t>(r.n_total), r.t_max, r.seed});
    };
    add(scan.baseline);
    for (auto const& r : scan.by_xi) add(r);

    json prov = base_provenance("exp2", g);
    o.ens.describe(prov, m);
    prov["xi"] = o.xis;
    prov["t_max"] = t_max;
    emit(g, t, prov);
  }

  // ---------------------------------------------------------------------------------------------------------------

  struct SampleOpts {
    EnsembleOpts ens;
    std::string kind = "A";
    double xi = 0.0;
  };

  void run_sample(Globals const& g, SampleOpts const& o) {
    sympb::CnfModel m = o.ens.model.load();
    sympb::EnsembleSpec s = o.ens.spec(m, g.seed);
    sympb::EnsembleKind kind = o.kind == "B" ? sympb::EnsembleKind::B : sympb::EnsembleKind::A;
    s.xi = kind == sympb::EnsembleKind::B ? o.xi : 0.0;
    auto ics = sympb::sample_ensemble(m, s, kind, g.workers);

    std::size_t nb = m.bath_count();
    Table t;
    t.columns = {"index", "energy", "q1", "p1", "reaction_integral"};
    for (std::size_t k = 0; k < nb; ++k) t.columns.push_back("j_" + std::to_string(k + 2));
    for (std::size_t k = 0; k < nb; ++k) t.columns.push_back("phi_" + std::to_string(k + 2));
    for (std::size_t i = 0; i < ics.size(); ++i) {
      auto const& ic = ics[i];
      std::vector<sympb::io::Cell> row{static_cast<std::int64_t>(i), ic.energy, ic.q1, ic.p1, ic.reaction_integral};
      for (double j : ic.j) row.emplace_back(j);
      for (double phi : ic.phases) row.emplace_back(phi);
      t.rows.push_back(std::move(row));
    }
    json prov = base_provenance("sample", g);
    o.ens.describe(prov, m);
    prov["kind"] = o.kind;
    prov["xi"] = s.xi;
    emit(g, t, prov);
  }

  // ---------------------------------------------------------------------------------------------------------------

  struct IntegrateOpts {
    std::string params_file;
    int dof = 3;
    std::vector<double> q;
    std::vector<double> p;
    sympb::IntegratorConfig cfg;
    bool no_jacobian = false;
    std::string summary;
    std::optional<double> x_star;
  };

  void run_integrate(Globals const& g, IntegrateOpts o) {
    sympb::EckartMorseParams params =
        o.params_file.empty() ? sympb::default_eckart_morse_params() : sympb::io::read_params(o.params_file);
    if (o.dof != 2 && o.dof != 3) throw sympb::ArityError("--dof must be 2 or 3");
    auto n = static_cast<std::size_t>(o.dof);
    std::vector<double> const default_q{-0.5, 0.3, -0.2};
    std::vector<double> const default_p{0.4, 0.3, 0.5};
    if (o.q.empty()) o.q.assign(default_q.begin(), default_q.begin() + o.dof);
    if (o.p.empty()) o.p.assign(default_p.begin(), default_p.begin() + o.dof);
    if (o.q.size() != n || o.p.size() != n) {
      throw sympb::ArityError("--q and --p need " + std::to_string(n) + " values each");
    }
    o.cfg.compute_jacobian = !o.no_jacobian;
    o.cfg.workers = g.workers;
    sympb::PhaseState s0{Eigen::Map<sympb::Vector const>(o.q.data(), o.dof),
                         Eigen::Map<sympb::Vector const>(o.p.data(), o.dof)};
    sympb::TrajectoryRecord rec = sympb::integrate(params, s0, o.cfg);

    Table t;
    t.columns = {"t"};
    for (std::size_t k = 0; k < n; ++k) t.columns.push_back("q" + std::to_string(k + 1));
    for (std::size_t k = 0; k < n; ++k) t.columns.push_back("p" + std::to_string(k + 1));
    t.columns.emplace_back("H");
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
      std::vector<sympb::io::Cell> row{rec.times[i]};
      for (Eigen::Index k = 0; k < o.dof; ++k) row.emplace_back(rec.states[i].q[k]);
      for (Eigen::Index k = 0; k < o.dof; ++k) row.emplace_back(rec.states[i].p[k]);
      row.emplace_back(rec.energies[i]);
      t.rows.push_back(std::move(row));
    }

    json summary{{"energy_drift", rec.energy_drift},
                 {"symplecticity_error", std::isnan(rec.symplecticity_error) ? json(nullptr) : json(rec.symplecticity_error)},
                 {"steps", o.cfg.steps()},
                 {"t_final", rec.times.back()}};
    if (o.x_star) {
      json crossings = json::array();
      for (auto const& c : sympb::ds_crossing_times(rec, *o.x_star)) {
        crossings.push_back({{"time", c.time}, {"forward", c.forward}});
      }
      summary["x_star"] = *o.x_star;
      summary["crossings"] = std::move(crossings);
    }

    json prov = base_provenance("integrate", g);
    prov["params"] = sympb::io::params_to_json(params);
    prov["dof"] = o.dof;
    prov["q0"] = o.q;
    prov["p0"] = o.p;
    prov["h"] = o.cfg.h;
    prov["t_final"] = o.cfg.t_final;
    prov["monitor_stride"] = o.cfg.monitor_stride;
    prov["fd_epsilon"] = o.cfg.fd_epsilon;
    prov["jacobian"] = o.cfg.compute_jacobian;
    emit(g, t, prov, {{"summary", summary}});
    if (!o.summary.empty()) {
      std::ofstream out(o.summary, std::ios::binary);
      if (!out) throw sympb::IoError("cannot write '" + o.summary + "'");
      out << summary.dump(2) << '\n';
    } else if (g.format != "json") {
      std::cerr << summary.dump() << '\n';
    }
  }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symplectic bottleneck geometry: capacities, widths, and reaction-dynamics experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.config_formatter(std::make_shared<JsonConfig>(&app));
  app.set_config("--config", "", "JSON configuration file; command-line flags take precedence");

  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->envname("SYMPB_SEED")->capture_default_str();
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("-o,--output", g.output, "Output file (default: standard output)");
  app.add_option("--workers", g.workers, "Worker threads; results do not depend on this")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CapacityOpts cap;
  auto* c_cap = app.add_subcommand("capacity", "Symplectic spectrum and capacity of an ellipsoid shape matrix");
  c_cap->add_option("matrix", cap.matrix_file, "Symmetric positive-definite matrix (CSV or JSON)")->required();
  c_cap->add_flag("--blockdiag", cap.blockdiag, "Use the block-diagonal shortcut");

  WidthsOpts wid;
  auto* c_wid = app.add_subcommand("widths", "Candidate widths and directional flux over an energy range");
  wid.model.bind(c_wid);
  c_wid->add_option("--e-min", wid.e_min, "First energy")->required();
  c_wid->add_option("--e-max", wid.e_max, "Last energy (default: --e-min)");
  c_wid->add_option("--steps", wid.steps, "Number of energies")->capture_default_str();
  c_wid->add_option("--samples", wid.samples, "Monte Carlo samples per energy")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  Exp1Opts e1;
  auto* c_e1 = app.add_subcommand("exp1", "Saddle-plane projection areas of backward-evolved balls");
  e1.model.bind(c_e1);
  c_e1->add_option("--radii", e1.radii, "Ball radii")->expected(1, -1)->capture_default_str();
  c_e1->add_option("--sigma", e1.sigma, "Strength of the random symplectic mixer")->capture_default_str();
  c_e1->add_flag("--unmixed", e1.unmixed, "Use the identity instead of a random mixer");
  c_e1->add_option("--tau-points", e1.tau_points, "Backward-time grid size")->capture_default_str();
  c_e1->add_option("--tau-max", e1.tau_max, "Largest backward time (default 3 / lambda)");
  c_e1->add_option("--e-center", e1.e_center, "Energy of the candidate-width reference level")->capture_default_str();
  c_e1->add_option("--curves", e1.curves, "Also write the A(tau) curves to this file");

  Exp2Opts e2;
  auto* c_e2 = app.add_subcommand("exp2", "Finite-time transmission against bath localization");
  e2.ens.bind(c_e2);
  c_e2->add_option("--xi", e2.xis, "Localization values in [0, 1]")->expected(1, -1)->capture_default_str();
  c_e2->add_option("--t-max", e2.t_max, "Observation time (default 5 / lambda)");

  SampleOpts smp;
  auto* c_smp = app.add_subcommand("sample", "Dump a forward-reactive ensemble");
  smp.ens.bind(c_smp);
  c_smp->add_option("--kind", smp.kind, "Ensemble A (unbiased) or B (bath-localized)")
      ->check(CLI::IsMember({"A", "B"}))
      ->capture_default_str();
  c_smp->add_option("--xi", smp.xi, "Localization for ensemble B")->capture_default_str();

  IntegrateOpts itg;
  auto* c_itg = app.add_subcommand("integrate", "Stormer-Verlet trajectory of the Eckart-Morse(-Morse) system");
  c_itg->add_option("--params", itg.params_file, "Potential parameters (JSON)");
  c_itg->add_option("--dof", itg.dof, "Degrees of freedom (2 or 3)")->capture_default_str();
  c_itg->add_option("--q", itg.q, "Initial positions (default -0.5 0.3 -0.2)")->expected(1, -1);
  c_itg->add_option("--p", itg.p, "Initial momenta (default 0.4 0.3 0.5)")->expected(1, -1);
  c_itg->add_option("--step", itg.cfg.h, "Time step h")->capture_default_str();
  c_itg->add_option("--t-final", itg.cfg.t_final, "Final time")->capture_default_str();
  c_itg->add_option("--stride", itg.cfg.monitor_stride, "Record every this many steps")->capture_default_str();
  c_itg->add_option("--fd-epsilon", itg.cfg.fd_epsilon, "Finite-difference displacement for the Jacobian")
      ->capture_default_str();
  c_itg->add_flag("--no-jacobian", itg.no_jacobian, "Skip the symplecticity check");
  c_itg->add_option("--summary", itg.summary, "Write the monitor summary (JSON) to this file");
  c_itg->add_option("--x-star", itg.x_star, "Report crossings of x = x_star");

  try {
    app.parse(argc, argv);
  } catch (CLI::CallForHelp const& e) {
    return app.exit(e);
  } catch (CLI::CallForAllHelp const& e) {
    return app.exit(e);
  } catch (CLI::Success const& e) {
    return app.exit(e);
  } catch (CLI::ParseError const& e) {
    app.exit(e);
    return exit_input;
  }

  try {
    if (c_cap->parsed()) run_capacity(g, cap);
    if (c_wid->parsed()) {
      if (c_wid->get_option("--e-max")->count() == 0) wid.e_max = wid.e_min;
      run_widths(g, wid);
    }
    if (c_e1->parsed()) run_exp1(g, e1);
    if (c_e2->parsed()) run_exp2(g, e2);
    if (c_smp->parsed()) run_sample(g, smp);
    if (c_itg->parsed()) run_integrate(g, itg);
  } catch (sympb::DivergenceError const& e) {
    std::cerr << "error: " << e.what() << " (t = " << sympb::io::format_double(e.time()) << ")\n";
    return exit_domain;
  } catch (sympb::DomainError const& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_domain;
  } catch (sympb::InputError const& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_input;
  } catch (std::exception const& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_domain;
  }
  return exit_ok;
}
