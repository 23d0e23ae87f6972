#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "sympb/bottleneck_geometry.hpp"
#include "sympb/error.hpp"
#include "sympb/normal_form_models.hpp"
#include "sympb/parallel.hpp"
#include "sympb/symplectic_linalg.hpp"

/**
 * \file linear_evolution.hpp
 *
 * @brief Exact linear flow of the quadratic normal form and projection areas of evolved balls.
 *
 * A ball of radius r mapped by a symplectic matrix G is the ellipsoid {G z : |z| <= r}. Its shadow on a canonical
 * plane spanned by rows (a, b) of G has area pi r^2 sqrt(det(P G G^T P^T)), which can never drop below pi r^2.
 */

namespace sympb {

  /// State-transition matrix of the quadratic normal form at time t, in (Q_1, q_2..., P_1, p_2...) ordering.
  inline Matrix stm(QuadraticSaddleModel const& model, double t) {
    model.validate();
    auto n = static_cast<Eigen::Index>(model.dof());
    Matrix phi = Matrix::Zero(2 * n, 2 * n);
    double ch = std::cosh(model.lambda * t);
    double sh = std::sinh(model.lambda * t);
    phi(0, 0) = ch;
    phi(0, n) = sh;
    phi(n, 0) = sh;
    phi(n, n) = ch;
    for (Eigen::Index k = 1; k < n; ++k) {
      double w = model.omegas[static_cast<std::size_t>(k - 1)] * t;
      double c = std::cos(w);
      double s = std::sin(w);
      phi(k, k) = c;
      phi(k, n + k) = s;
      phi(n + k, k) = -s;
      phi(n + k, n + k) = c;
    }
    return phi;
  }

  /// Canonical plane used for projections: 0 is the saddle plane (Q_1, P_1), m >= 1 is the bath plane (q_{m+1}, p_{m+1}).
  struct ProjectionPlane {
    std::size_t mode = 0;
  };

  inline constexpr double mixer_symplectic_tol = 1e-10;

  namespace detail {

    inline void require_mixer(QuadraticSaddleModel const& model, Matrix const& s_mix) {
      auto dim = static_cast<Eigen::Index>(2 * model.dof());
      if (s_mix.rows() != dim || s_mix.cols() != dim) {
        throw DimensionError("mixing matrix must be " + std::to_string(dim) + "x" + std::to_string(dim));
      }
      if (!is_symplectic(s_mix, mixer_symplectic_tol)) {
        throw PreconditionError("mixing matrix is not symplectic to 1e-10");
      }
    }

    // Gram determinant of the two rows of g that span the chosen plane.
    inline double plane_gram_det(Matrix const& g, ProjectionPlane plane) {
      Eigen::Index n = g.rows() / 2;
      auto m = static_cast<Eigen::Index>(plane.mode);
      if (m >= n) {
        throw DimensionError("projection plane index out of range");
      }
      auto a = g.row(m);
      auto b = g.row(n + m);
      double det = a.squaredNorm() * b.squaredNorm() - std::pow(a.dot(b), 2);
      if (det < -1e-12) {
        throw SpectrumError("projected Gram determinant is negative: " + std::to_string(det));
      }
      return std::max(det, 0.0);
    }

  }  // namespace detail

  /// Area of the projection of Phi(-tau) S_mix B(r) onto ``plane``.
  inline double projection_area(QuadraticSaddleModel const& model, double r, Matrix const& s_mix, double tau,
                                ProjectionPlane plane = {}) {
    if (!(r > 0.0)) {
      throw PreconditionError("ball radius must be positive");
    }
    detail::require_mixer(model, s_mix);
    Matrix g = stm(model, -tau) * s_mix;
    return std::numbers::pi * r * r * std::sqrt(detail::plane_gram_det(g, plane));
  }

  /**
   * @brief Shape matrix of the ellipsoid G B(r), i.e. (G G^T)^{-1} / r^2.
   */
  inline SymmetricPDMatrix evolved_shape(Matrix const& g, double r) {
    Matrix ginv = g.partialPivLu().inverse();
    Matrix m = ginv.transpose() * ginv / (r * r);
    return SymmetricPDMatrix(0.5 * (m + m.transpose()));
  }

  struct ProjectionAreaCurve {
    double radius = 0.0;
    std::vector<double> taus;
    std::vector<double> areas;
    double min_area = 0.0;
    double gromov_scale = 0.0;
  };

  /// ``points`` uniform times on [0, 3 / lambda], endpoints included.
  inline std::vector<double> default_tau_grid(QuadraticSaddleModel const& model, std::size_t points = 600) {
    model.validate();
    std::vector<double> grid(points);
    double t_end = 3.0 / model.lambda;
    for (std::size_t i = 0; i < points; ++i) {
      grid[i] = points == 1 ? 0.0 : t_end * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return grid;
  }

  inline ProjectionAreaCurve min_projection_area(QuadraticSaddleModel const& model, double r, Matrix const& s_mix,
                                                 std::vector<double> const& taus, ProjectionPlane plane = {},
                                                 std::size_t workers = 1) {
    if (taus.empty()) {
      throw PreconditionError("tau grid is empty");
    }
    if (!std::is_sorted(taus.begin(), taus.end())) {
      throw PreconditionError("tau grid is not sorted");
    }
    if (!(r > 0.0)) {
      throw PreconditionError("ball radius must be positive");
    }
    detail::require_mixer(model, s_mix);
    ProjectionAreaCurve c;
    c.radius = r;
    c.taus = taus;
    c.areas.resize(taus.size());
    c.gromov_scale = std::numbers::pi * r * r;
    detail::parallel_for(taus.size(), workers, [&](std::size_t i) {
      Matrix g = stm(model, -taus[i]) * s_mix;
      c.areas[i] = c.gromov_scale * std::sqrt(detail::plane_gram_det(g, plane));
    });
    c.min_area = *std::min_element(c.areas.begin(), c.areas.end());
    return c;
  }

  struct RadiusScanRow {
    double radius = 0.0;
    double min_area = 0.0;
    double pi_r2 = 0.0;
    double c_cand_ref = 0.0;
  };

  struct RadiusScan {
    std::vector<RadiusScanRow> rows;
    std::vector<ProjectionAreaCurve> curves;
  };

  /**
   * @brief Minimum projected area for each radius, against the ball capacity and the candidate width at
   * ``e_center``.
   */
  inline RadiusScan radius_scan(QuadraticSaddleModel const& model, std::vector<double> const& radii,
                                Matrix const& s_mix, std::vector<double> const& taus, double e_center,
                                std::size_t workers = 1) {
    if (radii.empty()) {
      throw PreconditionError("radius list is empty");
    }
    double ref = candidate_width(model, e_center).c_cand;
    RadiusScan scan;
    for (double r : radii) {
      ProjectionAreaCurve c = min_projection_area(model, r, s_mix, taus, {}, workers);
      scan.rows.push_back(RadiusScanRow{r, c.min_area, c.gromov_scale, ref});
      scan.curves.push_back(std::move(c));
    }
    return scan;
  }

  /// Same scan with the mixer exp(J A) drawn from ``seed`` at strength ``sigma``.
  inline RadiusScan radius_scan(QuadraticSaddleModel const& model, std::vector<double> const& radii,
                                std::uint64_t mixer_seed, double sigma, std::vector<double> const& taus,
                                double e_center, std::size_t workers = 1) {
    Matrix s_mix = random_symplectic(static_cast<Eigen::Index>(model.dof()), sigma, mixer_seed);
    return radius_scan(model, radii, s_mix, taus, e_center, workers);
  }

}  // namespace sympb
