#pragma once

#include <boost/math/tools/toms748_solve.hpp>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sympb/error.hpp"

/**
 * \file normal_form_models.hpp
 *
 * @brief Quadratic saddle models, truncated classical normal forms, and the physical Eckart-Morse(-Morse) Hamiltonian.
 */

namespace sympb {

  /**
   * @brief Rotated quadratic normal form of a saddle-center-...-center equilibrium.
   *
   * H_2 = lambda/2 (P_1^2 - Q_1^2) + sum_k omega_k/2 (p_k^2 + q_k^2) + e0.
   */
  struct QuadraticSaddleModel {
    double lambda = 1.0;
    std::vector<double> omegas;
    double e0 = 0.0;

    [[nodiscard]] std::size_t bath_count() const noexcept { return omegas.size(); }
    [[nodiscard]] std::size_t dof() const noexcept { return omegas.size() + 1; }

    void validate() const {
      if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw PreconditionError("quadratic model: lambda must be positive");
      }
      for (double w : omegas) {
        if (!(w > 0.0) || !std::isfinite(w)) {
          throw PreconditionError("quadratic model: bath frequencies must be positive");
        }
      }
      if (!std::isfinite(e0)) {
        throw PreconditionError("quadratic model: e0 must be finite");
      }
    }
  };

  /// One monomial coeff * I^i_power * prod_k J_k^j_powers[k].
  struct CnfTerm {
    int i_power = 0;
    std::vector<int> j_powers;
    double coeff = 0.0;
  };

  namespace detail {

    inline double ipow(double x, int n) noexcept {
      double r = 1.0;
      for (int k = 0; k < n; ++k) {
        r *= x;
      }
      return r;
    }

    // n (n-1) ... (n-d+1), zero when d > n.
    inline double falling(int n, int d) noexcept {
      if (d > n) {
        return 0.0;
      }
      double r = 1.0;
      for (int k = 0; k < d; ++k) {
        r *= static_cast<double>(n - k);
      }
      return r;
    }

    inline bool is_unit(std::vector<int> const& powers, std::size_t k) {
      for (std::size_t m = 0; m < powers.size(); ++m) {
        if (powers[m] != (m == k ? 1 : 0)) {
          return false;
        }
      }
      return true;
    }

  }  // namespace detail

  /**
   * @brief Truncated classical normal form K(I, J_2, ..., J_n) = e0 + sum of monomials.
   *
   * The constant term lives in ``e0`` only. The model must contain a positive linear I coefficient (the saddle rate)
   * and a positive linear coefficient for every bath action (the bath frequencies).
   */
  class CnfModel {
  public:
    CnfModel(double e0, std::size_t bath_count, std::vector<CnfTerm> terms)
        : m_e0(e0), m_bath_count(bath_count), m_terms(std::move(terms)) {
      if (bath_count < 1) {
        throw ArityError("normal form needs at least one bath action");
      }
      if (!std::isfinite(e0)) {
        throw PreconditionError("normal form: e0 must be finite");
      }
      std::vector<CnfTerm> kept;
      for (CnfTerm& t : m_terms) {
        if (t.j_powers.size() != bath_count) {
          throw ArityError("normal form term has " + std::to_string(t.j_powers.size()) + " bath exponents, expected "
                           + std::to_string(bath_count));
        }
        if (t.i_power < 0 || std::any_of(t.j_powers.begin(), t.j_powers.end(), [](int p) { return p < 0; })) {
          throw PreconditionError("normal form exponents must be non-negative");
        }
        if (!std::isfinite(t.coeff)) {
          throw PreconditionError("normal form coefficients must be finite");
        }
        bool constant = t.i_power == 0 && std::all_of(t.j_powers.begin(), t.j_powers.end(), [](int p) { return p == 0; });
        if (constant) {
          if (t.coeff != e0) {
            throw PreconditionError("normal form constant term disagrees with e0");
          }
          continue;
        }
        kept.push_back(std::move(t));
      }
      m_terms = std::move(kept);

      if (!(lambda() > 0.0)) {
        throw PreconditionError("normal form needs a positive linear I coefficient");
      }
      for (std::size_t k = 0; k < bath_count; ++k) {
        if (!(omega(k) > 0.0)) {
          throw PreconditionError("normal form needs a positive linear coefficient for bath action "
                                  + std::to_string(k + 2));
        }
      }
    }

    [[nodiscard]] double e0() const noexcept { return m_e0; }
    [[nodiscard]] std::size_t bath_count() const noexcept { return m_bath_count; }
    [[nodiscard]] std::size_t dof() const noexcept { return m_bath_count + 1; }
    [[nodiscard]] std::vector<CnfTerm> const& terms() const noexcept { return m_terms; }

    /// Sum of coefficients of the monomial I^i_power prod J^j_powers (e0 for the constant monomial).
    [[nodiscard]] double coefficient(int i_power, std::vector<int> const& j_powers) const {
      check_arity(j_powers.size());
      double c = 0.0;
      if (i_power == 0 && std::all_of(j_powers.begin(), j_powers.end(), [](int p) { return p == 0; })) {
        c = m_e0;
      }
      for (CnfTerm const& t : m_terms) {
        if (t.i_power == i_power && t.j_powers == j_powers) {
          c += t.coeff;
        }
      }
      return c;
    }

    /// Linear coefficient of I.
    [[nodiscard]] double lambda() const { return coefficient(1, std::vector<int>(m_bath_count, 0)); }

    /// Linear coefficient of the bath action with zero-based index k (the paper-style mode label is k + 2).
    [[nodiscard]] double omega(std::size_t k) const {
      std::vector<int> powers(m_bath_count, 0);
      powers.at(k) = 1;
      return coefficient(0, powers);
    }

    /// Highest power of I appearing in any term.
    [[nodiscard]] int degree_in_i() const noexcept {
      int d = 0;
      for (CnfTerm const& t : m_terms) {
        d = std::max(d, t.i_power);
      }
      return d;
    }

    /// Whether every term is linear in a single variable, i.e. the model is its own quadratic part.
    [[nodiscard]] bool is_linear() const noexcept {
      return std::all_of(m_terms.begin(), m_terms.end(), [](CnfTerm const& t) {
        int total = t.i_power;
        for (int p : t.j_powers) {
          total += p;
        }
        return total == 1;
      });
    }

    [[nodiscard]] double eval(double i, std::span<double const> j) const { return partial(0, {}, i, j); }

    /**
     * @brief Mixed partial derivative d^{di} d^{dj} K / dI^{di} dJ^{dj}, evaluated analytically.
     *
     * ``dj`` may be empty (no bath derivatives) or have one entry per bath action.
     */
    [[nodiscard]] double partial(int di, std::vector<int> const& dj, double i, std::span<double const> j) const {
      check_arity(j.size());
      if (!dj.empty()) {
        check_arity(dj.size());
      }
      auto order_j = [&](std::size_t k) { return dj.empty() ? 0 : dj[k]; };

      bool pure_value = di == 0 && std::all_of(dj.begin(), dj.end(), [](int d) { return d == 0; });
      double sum = pure_value ? m_e0 : 0.0;
      for (CnfTerm const& t : m_terms) {
        double v = t.coeff * detail::falling(t.i_power, di);
        if (v == 0.0) {
          continue;
        }
        v *= detail::ipow(i, t.i_power - di);
        for (std::size_t k = 0; k < m_bath_count && v != 0.0; ++k) {
          int d = order_j(k);
          v *= detail::falling(t.j_powers[k], d);
          v *= detail::ipow(j[k], std::max(t.j_powers[k] - d, 0));
        }
        sum += v;
      }
      return sum;
    }

    /// K restricted to the dividing surface I = 0 with every bath action but k set to zero.
    [[nodiscard]] double on_axis(std::size_t k, double jk) const {
      std::vector<double> j(m_bath_count, 0.0);
      j.at(k) = jk;
      return eval(0.0, j);
    }

  private:
    void check_arity(std::size_t n) const {
      if (n != m_bath_count) {
        throw ArityError("expected " + std::to_string(m_bath_count) + " bath actions, got " + std::to_string(n));
      }
    }

    double m_e0;
    std::size_t m_bath_count;
    std::vector<CnfTerm> m_terms;
  };

  inline double eval_cnf(CnfModel const& model, double i, std::span<double const> j) { return model.eval(i, j); }

  /// Eckart-Morse normal-form constants printed with the 10th-order classical normal form.
  namespace eckart_morse {
    inline constexpr double saddle_energy = -0.9875;
    inline constexpr double lyapunov = 0.7350;
    inline constexpr double omega2 = 1.8225;
    inline constexpr double b2 = -0.0123;
    inline constexpr double omega3 = 1.267;
  }  // namespace eckart_morse

  /// K(I, J_2) = E_0 + lambda I + omega_2 J_2 + b_2 I J_2.
  inline CnfModel builtin_eckart_morse_2dof() {
    using namespace eckart_morse;
    return CnfModel(saddle_energy, 1,
                    {
                        CnfTerm{1, {0}, lyapunov},
                        CnfTerm{0, {1}, omega2},
                        CnfTerm{1, {1}, b2},
                    });
  }

  /// 3-DoF truncation: the 2-DoF terms plus omega_3 J_3. Couplings of J_3 are not available and are left out.
  inline CnfModel builtin_eckart_morse_morse_3dof() {
    using namespace eckart_morse;
    return CnfModel(saddle_energy, 2,
                    {
                        CnfTerm{1, {0, 0}, lyapunov},
                        CnfTerm{0, {1, 0}, omega2},
                        CnfTerm{0, {0, 1}, omega3},
                        CnfTerm{1, {1, 0}, b2},
                    });
  }

  /// dK/dI at I = 0, the J-dependent saddle rate. Throws ``NonPositiveRateError`` when it is not positive.
  inline double effective_lyapunov(CnfModel const& model, std::span<double const> j) {
    double rate = model.partial(1, {}, 0.0, j);
    if (!(rate > 0.0)) {
      throw NonPositiveRateError("effective saddle rate dK/dI = " + std::to_string(rate) + " is not positive");
    }
    return rate;
  }

  /// Linear part (lambda, omega_k, e0) of a normal form.
  inline QuadraticSaddleModel quadratic_part(CnfModel const& model) {
    QuadraticSaddleModel q;
    q.lambda = model.lambda();
    q.e0 = model.e0();
    for (std::size_t k = 0; k < model.bath_count(); ++k) {
      q.omegas.push_back(model.omega(k));
    }
    return q;
  }

  /// The normal form whose only terms are lambda I and omega_k J_k.
  inline CnfModel linear_cnf(QuadraticSaddleModel const& q) {
    q.validate();
    if (q.omegas.empty()) {
      throw ArityError("quadratic model has no bath modes");
    }
    std::size_t nb = q.omegas.size();
    std::vector<CnfTerm> terms;
    terms.push_back(CnfTerm{1, std::vector<int>(nb, 0), q.lambda});
    for (std::size_t k = 0; k < nb; ++k) {
      std::vector<int> p(nb, 0);
      p[k] = 1;
      terms.push_back(CnfTerm{0, std::move(p), q.omegas[k]});
    }
    return CnfModel(q.e0, nb, std::move(terms));
  }

  // ---------------------------------------------------------------------------------------------------------------
  // Physical Eckart-Morse(-Morse) Hamiltonian.

  /**
   * @brief Parameters of H = |p|^2/2m + eps sum_{i<j} p_i p_j + V_E(x) + V_M(y) [+ V_M(z)].
   *
   * Only m = 1 and eps = 0.3 come from the benchmark; the potential parameters are artifact defaults. ``De`` and ``aM``
   * are stored per bath mode (y, z).
   */
  struct EckartMorseParams {
    double m = 1.0;
    double eps = 0.3;
    double A = -0.5;
    double B = 2.0;
    double a = 1.0;
    double x0 = 0.0;
    std::array<double, 2> De{1.0, 1.0};
    std::array<double, 2> aM{1.0, 1.0};

    void validate() const {
      if (!(m > 0.0)) throw PreconditionError("Eckart-Morse: m must be positive");
      if (!(B > 0.0)) throw PreconditionError("Eckart-Morse: B must be positive");
      if (!(a > 0.0)) throw PreconditionError("Eckart-Morse: a must be positive");
      for (std::size_t k = 0; k < 2; ++k) {
        if (!(De[k] > 0.0)) throw PreconditionError("Eckart-Morse: De must be positive");
        if (!(aM[k] > 0.0)) throw PreconditionError("Eckart-Morse: aM must be positive");
      }
      for (double v : {m, eps, A, B, a, x0}) {
        if (!std::isfinite(v)) throw PreconditionError("Eckart-Morse: parameters must be finite");
      }
    }
  };

  namespace detail {

    // 1 / (1 + e^{-u}) without overflow.
    inline double logistic(double u) noexcept {
      if (u >= 0.0) {
        return 1.0 / (1.0 + std::exp(-u));
      }
      double e = std::exp(u);
      return e / (1.0 + e);
    }

  }  // namespace detail

  inline double eckart_potential(EckartMorseParams const& p, double x) {
    double u = (x + p.x0) / p.a;
    double s = detail::logistic(u);
    double sc = detail::logistic(-u);
    return p.A * s + p.B * s * sc;
  }

  inline double eckart_gradient(EckartMorseParams const& p, double x) {
    double u = (x + p.x0) / p.a;
    double s = detail::logistic(u);
    double sc = detail::logistic(-u);
    return s * sc * (p.A + p.B * (sc - s)) / p.a;
  }

  /// Morse well D_e (e^{-2 a_M q} - 2 e^{-a_M q}) of bath mode ``mode`` (0 = y, 1 = z).
  inline double morse_potential(EckartMorseParams const& p, double q, std::size_t mode = 0) {
    double e = std::exp(-p.aM.at(mode) * q);
    return p.De.at(mode) * (e * e - 2.0 * e);
  }

  inline double morse_gradient(EckartMorseParams const& p, double q, std::size_t mode = 0) {
    double e = std::exp(-p.aM.at(mode) * q);
    return 2.0 * p.aM.at(mode) * p.De.at(mode) * (e - e * e);
  }

  /**
   * @brief Shift x0 that puts the Eckart barrier top at x = 0.
   *
   * Solves dV_E/du = 0 for the logistic argument u by bracketing on [-60, 60]; requires |A| < B so that the barrier
   * has an interior maximum.
   */
  inline double barrier_centered_x0(double A, double B, double a) {
    if (!(B > std::abs(A))) {
      throw PreconditionError("Eckart barrier has no interior maximum unless |A| < B");
    }
    auto slope = [&](double u) { return A + B * (detail::logistic(-u) - detail::logistic(u)); };
    boost::math::tools::eps_tolerance<double> tol(52);
    std::uintmax_t iters = 200;
    auto [lo, hi] = boost::math::tools::toms748_solve(slope, -60.0, 60.0, tol, iters);
    double u_top = 0.5 * (lo + hi);
    // Barrier top at x_top = a u_top - x0; choose x0 so that x_top = 0.
    return a * u_top;
  }

  /// The default parameter set with a barrier-centred shift.
  inline EckartMorseParams default_eckart_morse_params() {
    EckartMorseParams p;
    p.x0 = barrier_centered_x0(p.A, p.B, p.a);
    return p;
  }

  /// Total potential for 2 (x, y) or 3 (x, y, z) positions.
  inline double potential(EckartMorseParams const& p, Eigen::Ref<Eigen::VectorXd const> q) {
    if (q.size() != 2 && q.size() != 3) {
      throw ArityError("Eckart-Morse state needs 2 or 3 degrees of freedom, got " + std::to_string(q.size()));
    }
    double v = eckart_potential(p, q[0]);
    for (Eigen::Index k = 1; k < q.size(); ++k) {
      v += morse_potential(p, q[k], static_cast<std::size_t>(k - 1));
    }
    return v;
  }

  inline Eigen::VectorXd potential_gradient(EckartMorseParams const& p, Eigen::Ref<Eigen::VectorXd const> q) {
    Eigen::VectorXd g(q.size());
    g[0] = eckart_gradient(p, q[0]);
    for (Eigen::Index k = 1; k < q.size(); ++k) {
      g[k] = morse_gradient(p, q[k], static_cast<std::size_t>(k - 1));
    }
    return g;
  }

  /// Kinetic matrix dT/dp = K p with K = (1/m) I + eps (ones - I).
  inline Eigen::MatrixXd kinetic_matrix(EckartMorseParams const& p, Eigen::Index dof) {
    Eigen::MatrixXd k = Eigen::MatrixXd::Constant(dof, dof, p.eps);
    k.diagonal().setConstant(1.0 / p.m);
    return k;
  }

  inline double kinetic_energy(EckartMorseParams const& p, Eigen::Ref<Eigen::VectorXd const> mom) {
    double t = mom.squaredNorm() / (2.0 * p.m);
    for (Eigen::Index i = 0; i < mom.size(); ++i) {
      for (Eigen::Index k = i + 1; k < mom.size(); ++k) {
        t += p.eps * mom[i] * mom[k];
      }
    }
    return t;
  }

  inline double full_hamiltonian(EckartMorseParams const& p, Eigen::Ref<Eigen::VectorXd const> q,
                                 Eigen::Ref<Eigen::VectorXd const> mom) {
    if (q.size() != mom.size()) {
      throw ArityError("position and momentum have different lengths");
    }
    return kinetic_energy(p, mom) + potential(p, q);
  }

}  // namespace sympb
