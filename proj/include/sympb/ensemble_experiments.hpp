#pragma once

#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sympb/bottleneck_geometry.hpp"
#include "sympb/error.hpp"
#include "sympb/normal_form_models.hpp"
#include "sympb/parallel.hpp"
#include "sympb/random.hpp"

/**
 * \file ensemble_experiments.hpp
 *
 * @brief Forward-reactive ensembles near a central energy and their finite-time transmission under the normal-form
 * flow.
 *
 * Sampling law for one initial condition (substream ``index`` of the seed):
 *
 *   1. E' uniform on [E - dE, E + dE];
 *   2. each bath action uniform on [0, J_k^max(E')], except the localized mode in ensemble B, which is uniform on
 *      [xi J^max(E'), J^max(E')];
 *   3. bath phases uniform on [0, 2 pi);
 *   4. the reaction integral I' solves K(I', J) = E';
 *   5. Q_1 uniform on [-q1_range, -1e-9] and P_1 = sqrt(Q_1^2 + 2 I').
 *
 * Draws with I' < 0 are rejected and redrawn from the same substream.
 */

namespace sympb {

  enum class EnsembleKind { A, B };

  inline char const* to_string(EnsembleKind k) noexcept { return k == EnsembleKind::A ? "A" : "B"; }

  inline constexpr std::size_t default_ensemble_size = 5000;

  struct EnsembleSpec {
    std::size_t n_traj = default_ensemble_size;
    double e_center = 0.0;
    /// Half-width of the energy window; unset means 1% of the excess energy E - e0.
    std::optional<double> delta_e;
    double xi = 0.0;
    double q1_range = 1.0;
    std::uint64_t seed = 0;
    /// Zero-based bath index restricted by xi in ensemble B.
    std::size_t localized_mode = 0;

    [[nodiscard]] double resolved_delta_e(double e0) const { return delta_e ? *delta_e : 0.01 * (e_center - e0); }
  };

  struct InitialCondition {
    double q1 = 0.0;
    double p1 = 0.0;
    std::vector<double> j;
    std::vector<double> phases;
    double energy = 0.0;
    double reaction_integral = 0.0;
  };

  struct TransmissionResult {
    EnsembleKind kind = EnsembleKind::B;
    double xi = 0.0;
    double fraction = 0.0;
    std::size_t n_transmitted = 0;
    std::size_t n_total = 0;
    double t_max = 0.0;
    std::uint64_t seed = 0;
  };

  struct TransmissionScan {
    TransmissionResult baseline;
    std::vector<TransmissionResult> by_xi;
  };

  inline constexpr double q1_gap = 1e-9;
  inline constexpr std::size_t max_attempts_per_point = 10000;

  inline void validate(EnsembleSpec const& spec, CnfModel const& model) {
    if (spec.n_traj < 1) {
      throw PreconditionError("ensemble needs at least one trajectory");
    }
    if (!(spec.xi >= 0.0 && spec.xi <= 1.0)) {
      throw PreconditionError("xi must lie in [0, 1]");
    }
    if (!(spec.q1_range > q1_gap)) {
      throw PreconditionError("q1_range must be positive");
    }
    if (spec.localized_mode >= model.bath_count()) {
      throw ArityError("localized bath mode out of range");
    }
    if (!(spec.e_center > model.e0())) {
      throw BelowSaddleError("central energy " + std::to_string(spec.e_center) + " is not above the saddle energy "
                             + std::to_string(model.e0()));
    }
    double de = spec.resolved_delta_e(model.e0());
    if (!(de >= 0.0)) {
      throw PreconditionError("energy half-width must be non-negative");
    }
    if (!(spec.e_center - de > model.e0())) {
      throw BelowSaddleError("energy window [" + std::to_string(spec.e_center - de) + ", "
                             + std::to_string(spec.e_center + de) + "] reaches the saddle energy "
                             + std::to_string(model.e0()));
    }
  }

  /**
   * @brief Reaction integral I >= 0 with K(I, J) = E, or nothing when E < K(0, J).
   *
   * Models linear in I are solved as (E - K(0, J)) / (dK/dI); others by bracketing. Residuals within 1e-12 relative
   * of zero snap to I = 0.
   */
  inline std::optional<double> solve_reaction_integral(CnfModel const& model, double energy,
                                                       std::span<double const> j) {
    double excess = energy - model.eval(0.0, j);
    if (std::abs(excess) <= 1e-12 * std::max(1.0, std::abs(energy))) {
      return 0.0;
    }
    if (excess < 0.0) {
      return std::nullopt;
    }
    double rate = effective_lyapunov(model, j);
    if (model.degree_in_i() <= 1) {
      return excess / rate;
    }
    auto f = [&](double i) { return model.eval(i, j) - energy; };
    return detail::smallest_positive_root(f, excess / rate, "solve_reaction_integral");
  }

  namespace detail {

    struct Draw {
      std::optional<InitialCondition> ic;
      std::size_t attempts = 0;
    };

    inline Draw draw_initial_condition(CnfModel const& model, EnsembleSpec const& spec, EnsembleKind kind,
                                       std::size_t index) {
      Rng rng(spec.seed, index);
      double de = spec.resolved_delta_e(model.e0());
      std::size_t nb = model.bath_count();
      Draw d;
      while (d.attempts < max_attempts_per_point) {
        ++d.attempts;
        InitialCondition ic;
        ic.energy = rng.uniform(spec.e_center - de, spec.e_center + de);
        ic.j.resize(nb);
        ic.phases.resize(nb);
        for (std::size_t k = 0; k < nb; ++k) {
          double jmax = j_max_cnf(model, ic.energy, k);
          double lo = (kind == EnsembleKind::B && k == spec.localized_mode) ? spec.xi * jmax : 0.0;
          ic.j[k] = lo + (jmax - lo) * rng.uniform();
        }
        for (std::size_t k = 0; k < nb; ++k) {
          ic.phases[k] = rng.angle();
        }
        double u = rng.uniform();
        std::optional<double> i = solve_reaction_integral(model, ic.energy, ic.j);
        if (!i) {
          continue;
        }
        ic.reaction_integral = *i;
        ic.q1 = -spec.q1_range + (spec.q1_range - q1_gap) * u;
        ic.p1 = std::sqrt(ic.q1 * ic.q1 + 2.0 * *i);
        d.ic = std::move(ic);
        return d;
      }
      return d;
    }

  }  // namespace detail

  /// Draws ``spec.n_traj`` forward-reactive initial conditions. Deterministic per seed for any ``workers``.
  inline std::vector<InitialCondition> sample_ensemble(CnfModel const& model, EnsembleSpec const& spec,
                                                       EnsembleKind kind, std::size_t workers = 1) {
    validate(spec, model);
    std::vector<detail::Draw> draws(spec.n_traj);
    detail::parallel_for(spec.n_traj, workers,
                         [&](std::size_t i) { draws[i] = detail::draw_initial_condition(model, spec, kind, i); });
    std::size_t attempts = 0;
    for (detail::Draw const& d : draws) {
      attempts += d.attempts;
    }
    double rejected = static_cast<double>(attempts - spec.n_traj) / static_cast<double>(attempts);
    std::vector<InitialCondition> out;
    out.reserve(spec.n_traj);
    for (detail::Draw& d : draws) {
      if (!d.ic) {
        throw SamplingError("no admissible initial condition after " + std::to_string(max_attempts_per_point)
                            + " attempts");
      }
      out.push_back(std::move(*d.ic));
    }
    if (rejected > 0.99) {
      throw SamplingError("rejection rate " + std::to_string(rejected) + " exceeds 99%");
    }
    return out;
  }

  /// Q_1(t_max) = Q_1 cosh(L t_max) + P_1 sinh(L t_max) > 0 with L = dK/dI at the point's bath actions.
  inline bool transmit(CnfModel const& model, InitialCondition const& ic, double t_max) {
    double rate = effective_lyapunov(model, ic.j);
    return ic.q1 * std::cosh(rate * t_max) + ic.p1 * std::sinh(rate * t_max) > 0.0;
  }

  inline double default_t_max(double lambda) {
    if (!(lambda > 0.0)) {
      throw NonPositiveRateError("default_t_max needs a positive saddle rate");
    }
    return 5.0 / lambda;
  }

  inline double default_t_max(CnfModel const& model) { return default_t_max(model.lambda()); }

  inline TransmissionResult transmission_fraction(CnfModel const& model, EnsembleSpec const& spec, EnsembleKind kind,
                                                  double t_max, std::size_t workers = 1) {
    std::vector<InitialCondition> ics = sample_ensemble(model, spec, kind, workers);
    TransmissionResult r;
    r.kind = kind;
    r.xi = kind == EnsembleKind::B ? spec.xi : 0.0;
    r.t_max = t_max;
    r.seed = spec.seed;
    r.n_total = ics.size();
    for (InitialCondition const& ic : ics) {
      if (transmit(model, ic, t_max)) {
        ++r.n_transmitted;
      }
    }
    r.fraction = static_cast<double>(r.n_transmitted) / static_cast<double>(r.n_total);
    return r;
  }

  /// Ensemble B fractions for each xi plus a single ensemble A baseline, all with ``base.seed``.
  inline TransmissionScan transmission_scan(CnfModel const& model, EnsembleSpec const& base,
                                            std::vector<double> const& xis, double t_max, std::size_t workers = 1) {
    for (double xi : xis) {
      if (!(xi >= 0.0 && xi <= 1.0)) {
        throw PreconditionError("xi values must lie in [0, 1]");
      }
    }
    TransmissionScan scan;
    scan.baseline = transmission_fraction(model, base, EnsembleKind::A, t_max, workers);
    for (double xi : xis) {
      EnsembleSpec s = base;
      s.xi = xi;
      scan.by_xi.push_back(transmission_fraction(model, s, EnsembleKind::B, t_max, workers));
    }
    return scan;
  }

}  // namespace sympb
