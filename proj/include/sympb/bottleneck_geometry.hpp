#pragma once

#include <boost/math/tools/toms748_solve.hpp>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "sympb/error.hpp"
#include "sympb/normal_form_models.hpp"
#include "sympb/parallel.hpp"
#include "sympb/random.hpp"

/**
 * \file bottleneck_geometry.hpp
 *
 * @brief Maximal bath actions, candidate widths and directional flux at a central energy.
 *
 * Bath modes are addressed by a zero-based index ``k`` in the API. Reports use the conventional mode label ``k + 2``
 * (the reaction coordinate is mode 1).
 */

namespace sympb {

  struct WidthReport {
    double energy = 0.0;
    std::vector<double> j_max;
    double c_cand = 0.0;
    /// Conventional label (>= 2) of the mode attaining the minimum; ties go to the lowest label.
    int limiting_mode = 2;
  };

  struct FluxReport {
    double energy = 0.0;
    double volume = 0.0;
    double flux = 0.0;
    std::int64_t mc_samples = 0;
    double std_error = 0.0;
    std::uint64_t seed = 0;
  };

  inline constexpr double root_bracket_cap = 1e12;

  namespace detail {

    inline void require_above_saddle(double energy, double e0) {
      if (!(energy > e0)) {
        throw BelowSaddleError("energy " + std::to_string(energy) + " is not above the saddle energy "
                               + std::to_string(e0));
      }
    }

    inline void require_not_below_saddle(double energy, double e0) {
      if (energy < e0) {
        throw BelowSaddleError("energy " + std::to_string(energy) + " is below the saddle energy "
                               + std::to_string(e0));
      }
    }

    inline WidthReport make_width_report(double energy, std::vector<double> j_max) {
      WidthReport r;
      r.energy = energy;
      auto it = std::min_element(j_max.begin(), j_max.end());  // first minimum on ties
      r.limiting_mode = static_cast<int>(it - j_max.begin()) + 2;
      r.c_cand = 2.0 * std::numbers::pi * *it;
      r.j_max = std::move(j_max);
      return r;
    }

    /**
     * Smallest positive root of a function negative at 0. The upper end starts at ``guess`` and doubles until the
     * sign changes (capped at ``root_bracket_cap``); the bracket is then scanned in 256 cells for the first sign
     * change and refined with TOMS 748.
     */
    template <typename F>
    double smallest_positive_root(F const& f, double guess, char const* what) {
      double hi = guess > 0.0 && std::isfinite(guess) ? guess : 1.0;
      while (f(hi) < 0.0) {
        hi *= 2.0;
        if (hi > root_bracket_cap) {
          throw NoRootError(std::string(what) + ": no positive root below " + std::to_string(root_bracket_cap));
        }
      }
      constexpr int cells = 256;
      double lo = 0.0;
      for (int c = 1; c <= cells; ++c) {
        double x = hi * static_cast<double>(c) / cells;
        double fx = f(x);
        if (fx == 0.0) {
          return x;
        }
        if (fx > 0.0) {
          hi = x;
          break;
        }
        lo = x;
      }
      boost::math::tools::eps_tolerance<double> tol(50);
      std::uintmax_t iters = 200;
      auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
      return 0.5 * (a + b);
    }

  }  // namespace detail

  inline double j_max_quadratic(QuadraticSaddleModel const& model, double energy, std::size_t k) {
    model.validate();
    detail::require_above_saddle(energy, model.e0);
    return (energy - model.e0) / model.omegas.at(k);
  }

  /**
   * @brief Maximal action of bath mode ``k`` on the dividing surface: the smallest positive root of
   * K(0, ..., J_k, ..., 0) = E.
   *
   * A restriction that is linear in J_k is solved in closed form; otherwise the root is bracketed from
   * [0, (E - e0) / omega_k] and refined to ~1e-15 relative.
   */
  inline double j_max_cnf(CnfModel const& model, double energy, std::size_t k) {
    detail::require_above_saddle(energy, model.e0());
    if (k >= model.bath_count()) {
      throw ArityError("bath index " + std::to_string(k) + " out of range");
    }
    bool linear_on_axis = true;
    for (CnfTerm const& t : model.terms()) {
      if (t.i_power != 0) {
        continue;
      }
      bool only_k = true;
      for (std::size_t m = 0; m < t.j_powers.size(); ++m) {
        if (m != k && t.j_powers[m] != 0) {
          only_k = false;
        }
      }
      if (only_k && t.j_powers[k] > 1) {
        linear_on_axis = false;
      }
    }
    double omega = model.omega(k);
    if (linear_on_axis) {
      return (energy - model.e0()) / omega;
    }
    auto f = [&](double jk) { return model.on_axis(k, jk) - energy; };
    return detail::smallest_positive_root(f, (energy - model.e0()) / omega, "j_max_cnf");
  }

  inline WidthReport candidate_width(QuadraticSaddleModel const& model, double energy) {
    model.validate();
    std::vector<double> j;
    for (std::size_t k = 0; k < model.bath_count(); ++k) {
      j.push_back(j_max_quadratic(model, energy, k));
    }
    if (j.empty()) {
      throw ArityError("candidate_width needs at least one bath mode");
    }
    return detail::make_width_report(energy, std::move(j));
  }

  inline WidthReport candidate_width(CnfModel const& model, double energy) {
    std::vector<double> j;
    for (std::size_t k = 0; k < model.bath_count(); ++k) {
      j.push_back(j_max_cnf(model, energy, k));
    }
    return detail::make_width_report(energy, std::move(j));
  }

  /// Samples per Monte Carlo partition; partition p draws from substream p of the seed.
  inline constexpr std::int64_t mc_partition_size = 1 << 16;

  /**
   * @brief Monte Carlo volume of {J >= 0 : K(0, J) <= E} over the box prod_k [0, J_k^max(E)].
   *
   * The flux is (2 pi)^(n-1) times the volume. Results are bit-identical for any ``workers``.
   */
  inline FluxReport action_volume_mc(CnfModel const& model, double energy, std::int64_t samples, std::uint64_t seed,
                                     std::size_t workers = 1) {
    if (samples < 1) {
      throw PreconditionError("action_volume_mc needs at least one sample");
    }
    detail::require_not_below_saddle(energy, model.e0());
    FluxReport r;
    r.energy = energy;
    r.mc_samples = samples;
    r.seed = seed;
    if (energy == model.e0()) {
      return r;
    }
    std::size_t nb = model.bath_count();
    std::vector<double> box(nb);
    double box_volume = 1.0;
    for (std::size_t k = 0; k < nb; ++k) {
      box[k] = j_max_cnf(model, energy, k);
      box_volume *= box[k];
    }

    auto partitions = static_cast<std::size_t>((samples + mc_partition_size - 1) / mc_partition_size);
    std::vector<std::int64_t> hits(partitions, 0);
    detail::parallel_for(partitions, workers, [&](std::size_t p) {
      Rng rng(seed, p);
      std::int64_t begin = static_cast<std::int64_t>(p) * mc_partition_size;
      std::int64_t end = std::min(samples, begin + mc_partition_size);
      std::vector<double> j(nb);
      std::int64_t h = 0;
      for (std::int64_t s = begin; s < end; ++s) {
        for (std::size_t k = 0; k < nb; ++k) {
          j[k] = box[k] * rng.uniform();
        }
        if (model.eval(0.0, j) <= energy) {
          ++h;
        }
      }
      hits[p] = h;
    });
    std::int64_t total = 0;
    for (std::int64_t h : hits) {
      total += h;
    }
    double p_hat = static_cast<double>(total) / static_cast<double>(samples);
    r.volume = box_volume * p_hat;
    r.std_error = box_volume * std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(samples));
    r.flux = std::pow(2.0 * std::numbers::pi, static_cast<double>(nb)) * r.volume;
    return r;
  }

  /// Exact simplex volume (E - e0)^(n-1) / ((n-1)! prod omega_k) and its flux.
  inline FluxReport flux_quadratic_exact(QuadraticSaddleModel const& model, double energy) {
    model.validate();
    detail::require_not_below_saddle(energy, model.e0);
    FluxReport r;
    r.energy = energy;
    std::size_t nb = model.bath_count();
    double v = 1.0;
    for (std::size_t k = 0; k < nb; ++k) {
      v *= (energy - model.e0) / (static_cast<double>(k + 1) * model.omegas[k]);
    }
    r.volume = v;
    r.flux = std::pow(2.0 * std::numbers::pi, static_cast<double>(nb)) * v;
    return r;
  }

}  // namespace sympb
