#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sympb/error.hpp"
#include "sympb/normal_form_models.hpp"
#include "sympb/parallel.hpp"
#include "sympb/symplectic_linalg.hpp"

/**
 * \file trajectory_integration.hpp
 *
 * @brief Stormer-Verlet integration of separable Hamiltonians H = p^T K p / 2 + V(q) with energy and symplecticity
 * monitors.
 */

namespace sympb {

  template <typename V>
  concept PotentialField = requires(V const& v, Vector const& q) {
    { v.value(q) } -> std::convertible_to<double>;
    { v.gradient(q) } -> std::convertible_to<Vector>;
  };

  struct PhaseState {
    Vector q;
    Vector p;

    [[nodiscard]] Eigen::Index dof() const noexcept { return q.size(); }

    [[nodiscard]] bool finite() const { return q.allFinite() && p.allFinite(); }

    /// Stacked (q, p) vector.
    [[nodiscard]] Vector stacked() const {
      Vector z(2 * q.size());
      z << q, p;
      return z;
    }

    static PhaseState unstack(Vector const& z) {
      Eigen::Index n = z.size() / 2;
      return PhaseState{z.head(n), z.tail(n)};
    }
  };

  /// H = p^T K p / 2 + V(q) with a constant symmetric kinetic matrix K.
  template <PotentialField V>
  struct SeparableHamiltonian {
    Matrix kinetic;
    V potential;

    [[nodiscard]] double energy(PhaseState const& s) const {
      return 0.5 * s.p.dot(kinetic * s.p) + potential.value(s.q);
    }
  };

  struct EckartMorsePotential {
    EckartMorseParams params;

    [[nodiscard]] double value(Vector const& q) const { return sympb::potential(params, q); }
    [[nodiscard]] Vector gradient(Vector const& q) const { return potential_gradient(params, q); }
  };

  inline SeparableHamiltonian<EckartMorsePotential> eckart_morse_system(EckartMorseParams const& p,
                                                                        Eigen::Index dof) {
    p.validate();
    if (dof != 2 && dof != 3) {
      throw ArityError("Eckart-Morse system has 2 or 3 degrees of freedom, got " + std::to_string(dof));
    }
    return {kinetic_matrix(p, dof), EckartMorsePotential{p}};
  }

  /// One kick-drift-kick step. A negative ``h`` runs the scheme backwards.
  template <PotentialField V>
  PhaseState verlet_step(SeparableHamiltonian<V> const& sys, PhaseState s, double h) {
    s.p -= 0.5 * h * sys.potential.gradient(s.q);
    s.q += h * (sys.kinetic * s.p);
    s.p -= 0.5 * h * sys.potential.gradient(s.q);
    return s;
  }

  inline PhaseState verlet_step(EckartMorseParams const& p, PhaseState const& s, double h) {
    return verlet_step(eckart_morse_system(p, s.dof()), s, h);
  }

  struct IntegratorConfig {
    double h = 1e-3;
    double t_final = 10.0;
    std::size_t monitor_stride = 1;
    double fd_epsilon = 1e-6;
    bool compute_jacobian = true;
    std::size_t workers = 1;

    void validate() const {
      if (!(h > 0.0) || !std::isfinite(h)) throw PreconditionError("step h must be positive");
      if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw PreconditionError("t_final must be non-negative");
      if (monitor_stride < 1) throw PreconditionError("monitor_stride must be at least 1");
      if (!(fd_epsilon > 0.0)) throw PreconditionError("fd_epsilon must be positive");
    }

    [[nodiscard]] std::int64_t steps() const { return std::llround(t_final / h); }
  };

  struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<PhaseState> states;
    std::vector<double> energies;
    double energy_drift = 0.0;
    /// max_abs(M^T J M - J) for the finite-difference Jacobian M of the time-t_final map; NaN when not computed.
    double symplecticity_error = std::numeric_limits<double>::quiet_NaN();
  };

  /// Time-(steps h) map; throws ``DivergenceError`` on a non-finite state.
  template <PotentialField V>
  PhaseState flow(SeparableHamiltonian<V> const& sys, PhaseState s, double h, std::int64_t steps) {
    for (std::int64_t k = 1; k <= steps; ++k) {
      s = verlet_step(sys, std::move(s), h);
      if (!s.finite()) {
        throw DivergenceError("trajectory diverged at t = " + std::to_string(static_cast<double>(k) * h),
                              static_cast<double>(k) * h);
      }
    }
    return s;
  }

  /// Central-difference Jacobian of the discrete flow map (4n auxiliary trajectories).
  template <PotentialField V>
  Matrix flow_jacobian(SeparableHamiltonian<V> const& sys, PhaseState const& s0, double h, std::int64_t steps,
                       double eps, std::size_t workers = 1) {
    Vector z0 = s0.stacked();
    auto dim = z0.size();
    Matrix jac(dim, dim);
    detail::parallel_for(static_cast<std::size_t>(dim), workers, [&](std::size_t c) {
      auto col = static_cast<Eigen::Index>(c);
      Vector zp = z0;
      Vector zm = z0;
      zp[col] += eps;
      zm[col] -= eps;
      Vector fp = flow(sys, PhaseState::unstack(zp), h, steps).stacked();
      Vector fm = flow(sys, PhaseState::unstack(zm), h, steps).stacked();
      jac.col(col) = (fp - fm) / (2.0 * eps);
    });
    return jac;
  }

  /**
   * @brief Fixed-step integration to ``cfg.t_final``.
   *
   * States, times and energies are recorded at t = 0, every ``monitor_stride`` steps and at the final step. The energy
   * drift is the largest |H(t) - H(0)| over the recorded points.
   */
  template <PotentialField V>
  TrajectoryRecord integrate(SeparableHamiltonian<V> const& sys, PhaseState const& s0, IntegratorConfig const& cfg) {
    cfg.validate();
    if (s0.q.size() != s0.p.size() || s0.q.size() != sys.kinetic.rows()) {
      throw ArityError("initial state does not match the system's degrees of freedom");
    }
    if (!s0.finite()) {
      throw PreconditionError("initial state is not finite");
    }
    TrajectoryRecord rec;
    std::int64_t steps = cfg.steps();
    double e0 = sys.energy(s0);
    auto record = [&](std::int64_t k, PhaseState const& s) {
      double e = sys.energy(s);
      rec.times.push_back(static_cast<double>(k) * cfg.h);
      rec.states.push_back(s);
      rec.energies.push_back(e);
      rec.energy_drift = std::max(rec.energy_drift, std::abs(e - e0));
    };
    record(0, s0);
    PhaseState s = s0;
    auto stride = static_cast<std::int64_t>(cfg.monitor_stride);
    for (std::int64_t k = 1; k <= steps; ++k) {
      s = verlet_step(sys, std::move(s), cfg.h);
      if (!s.finite()) {
        double t = static_cast<double>(k) * cfg.h;
        throw DivergenceError("trajectory diverged at t = " + std::to_string(t), t);
      }
      if (k % stride == 0 || k == steps) {
        record(k, s);
      }
    }
    if (cfg.compute_jacobian) {
      Matrix jac = flow_jacobian(sys, s0, cfg.h, steps, cfg.fd_epsilon, cfg.workers);
      rec.symplecticity_error = symplecticity_defect(jac);
    }
    return rec;
  }

  inline TrajectoryRecord integrate(EckartMorseParams const& p, PhaseState const& s0, IntegratorConfig const& cfg) {
    return integrate(eckart_morse_system(p, s0.dof()), s0, cfg);
  }

  struct Crossing {
    double time = 0.0;
    bool forward = true;
  };

  /**
   * @brief Times at which the first coordinate crosses ``x_star``, linearly interpolated between recorded samples.
   *
   * A sample is "beyond" when x >= x_star; a crossing into that region is forward, a crossing out of it backward.
   */
  inline std::vector<Crossing> ds_crossing_times(TrajectoryRecord const& rec, double x_star) {
    if (rec.states.empty()) {
      throw PreconditionError("trajectory record is empty");
    }
    std::vector<Crossing> out;
    for (std::size_t i = 0; i + 1 < rec.states.size(); ++i) {
      double x0 = rec.states[i].q[0];
      double x1 = rec.states[i + 1].q[0];
      bool beyond0 = x0 >= x_star;
      bool beyond1 = x1 >= x_star;
      if (beyond0 == beyond1) {
        continue;
      }
      double frac = (x_star - x0) / (x1 - x0);
      double t = rec.times[i] + frac * (rec.times[i + 1] - rec.times[i]);
      out.push_back(Crossing{t, beyond1});
    }
    return out;
  }

}  // namespace sympb
