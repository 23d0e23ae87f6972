#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "sympb/error.hpp"
#include "sympb/random.hpp"

/**
 * \file symplectic_linalg.hpp
 *
 * @brief Linear symplectic algebra on dense matrices.
 *
 * Phase-space coordinates are always ordered (q_1 ... q_n, p_1 ... p_n), so the standard structure matrix is
 * J = [[0, I], [-I, 0]]. An ellipsoid is described by its shape matrix M through {z : z^T M z <= 1}; its symplectic
 * spectrum is read off the skew-symmetric matrix W = M^{1/2} J M^{1/2} and its capacity is pi / lambda_max.
 *
 * Throughout, ``max_abs`` (the largest absolute entry) is the matrix norm used by every tolerance.
 */

namespace sympb {

  using Matrix = Eigen::MatrixXd;
  using Vector = Eigen::VectorXd;

  /// Largest absolute entry.
  inline double max_abs(Matrix const& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

  /**
   * @brief A symmetric positive-definite matrix.
   *
   * Construction enforces ``max_abs(M - M^T) <= 1e-12 max_abs(M)``, finite entries, and a minimum eigenvalue above
   * ``1e-12`` times the largest one. The stored matrix is exactly symmetrised.
   */
  class SymmetricPDMatrix {
  public:
    static constexpr double symmetry_tol = 1e-12;
    static constexpr double definiteness_tol = 1e-12;

    explicit SymmetricPDMatrix(Matrix m) {
      if (m.rows() != m.cols() || m.rows() == 0) {
        throw DimensionError("shape matrix must be square and non-empty, got " + std::to_string(m.rows()) + "x"
                             + std::to_string(m.cols()));
      }
      if (!m.allFinite()) {
        throw ParseError("shape matrix has non-finite entries");
      }
      double scale = max_abs(m);
      if (max_abs(m - m.transpose()) > symmetry_tol * scale) {
        throw PreconditionError("shape matrix is not symmetric");
      }
      m = 0.5 * (m + m.transpose()).eval();

      Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
      if (eig.info() != Eigen::Success) {
        throw DefinitenessError("symmetric eigendecomposition failed");
      }
      double lo = eig.eigenvalues().minCoeff();
      double hi = eig.eigenvalues().maxCoeff();
      if (!(hi > 0.0) || lo <= definiteness_tol * hi) {
        throw DefinitenessError("shape matrix is not positive definite (min eigenvalue " + std::to_string(lo)
                                + ", max eigenvalue " + std::to_string(hi) + ")");
      }
      m_eigenvalues = eig.eigenvalues();
      m_eigenvectors = eig.eigenvectors();
      m_matrix = std::move(m);
    }

    [[nodiscard]] Matrix const& matrix() const noexcept { return m_matrix; }
    [[nodiscard]] Eigen::Index dim() const noexcept { return m_matrix.rows(); }

    /// Ascending eigenvalues of the stored matrix.
    [[nodiscard]] Vector const& eigenvalues() const noexcept { return m_eigenvalues; }
    [[nodiscard]] Matrix const& eigenvectors() const noexcept { return m_eigenvectors; }

  private:
    Matrix m_matrix;
    Vector m_eigenvalues;
    Matrix m_eigenvectors;
  };

  /// Symplectic eigenvalues, sorted descending.
  struct SymplecticSpectrum {
    std::vector<double> values;

    [[nodiscard]] double max() const { return values.front(); }
    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
  };

  /// Returns the 2n x 2n matrix [[0, I_n], [-I_n, 0]].
  inline Matrix standard_j(Eigen::Index n) {
    if (n < 1) {
      throw DimensionError("standard_j requires n >= 1");
    }
    Matrix j = Matrix::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = Matrix::Identity(n, n);
    j.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
    return j;
  }

  namespace detail {

    inline Eigen::Index half_dim(Matrix const& s, char const* who) {
      if (s.rows() != s.cols()) {
        throw DimensionError(std::string(who) + ": matrix is not square");
      }
      if (s.rows() == 0 || s.rows() % 2 != 0) {
        throw DimensionError(std::string(who) + ": dimension " + std::to_string(s.rows()) + " is not even");
      }
      return s.rows() / 2;
    }

  }  // namespace detail

  /// ``max_abs(S^T J S - J)``.
  inline double symplecticity_defect(Matrix const& s) {
    Matrix j = standard_j(detail::half_dim(s, "symplecticity_defect"));
    return max_abs(s.transpose() * j * s - j);
  }

  inline bool is_symplectic(Matrix const& s, double tol) {
    if (!(tol > 0.0)) {
      throw PreconditionError("is_symplectic: tolerance must be positive");
    }
    return symplecticity_defect(s) <= tol;
  }

  /// Symmetric square root via the eigendecomposition of M.
  inline SymmetricPDMatrix symmetric_sqrt(SymmetricPDMatrix const& m) {
    Vector root = m.eigenvalues().cwiseSqrt();
    Matrix const& v = m.eigenvectors();
    Matrix r = v * root.asDiagonal() * v.transpose();
    return SymmetricPDMatrix(0.5 * (r + r.transpose()));
  }

  /// The skew-symmetric matrix W = M^{1/2} J M^{1/2}.
  inline Matrix williamson_matrix(SymmetricPDMatrix const& m) {
    Eigen::Index n = detail::half_dim(m.matrix(), "symplectic_spectrum");
    Matrix r = symmetric_sqrt(m).matrix();
    return r * standard_j(n) * r;
  }

  namespace detail {

    // Sorts 2n candidate magnitudes and collapses adjacent entries into n pairs.
    inline SymplecticSpectrum collapse_pairs(std::vector<double> mags, double rel_tol) {
      std::sort(mags.begin(), mags.end(), std::greater<>());
      SymplecticSpectrum out;
      out.values.reserve(mags.size() / 2);
      for (std::size_t i = 0; i + 1 < mags.size(); i += 2) {
        double a = mags[i];
        double b = mags[i + 1];
        if (std::abs(a - b) > rel_tol * std::max(std::abs(a), std::abs(b))) {
          throw SpectrumError("unmatched symplectic eigenvalue pair (" + std::to_string(a) + ", " + std::to_string(b)
                              + ")");
        }
        out.values.push_back(0.5 * (a + b));
      }
      return out;
    }

  }  // namespace detail

  inline constexpr double spectrum_pair_tol = 1e-8;

  /**
   * @brief Symplectic eigenvalues of a positive-definite shape matrix.
   *
   * Diagonalises W = M^{1/2} J M^{1/2}, whose eigenvalues are +-i lambda_j. Real parts larger than 1e-8 lambda_max or
   * imaginary parts that fail to pair up within 1e-8 relative raise ``SpectrumError``.
   */
  inline SymplecticSpectrum symplectic_spectrum(SymmetricPDMatrix const& m) {
    Matrix w = williamson_matrix(m);
    if (max_abs(w + w.transpose()) > 1e-10 * max_abs(w)) {
      throw SpectrumError("W = M^{1/2} J M^{1/2} lost skew-symmetry");
    }
    Eigen::EigenSolver<Matrix> eig(w, /*computeEigenvectors=*/false);
    if (eig.info() != Eigen::Success) {
      throw SpectrumError("eigenvalue iteration on W did not converge");
    }
    auto const& ev = eig.eigenvalues();
    std::vector<double> mags(static_cast<std::size_t>(ev.size()));
    double largest = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      mags[static_cast<std::size_t>(i)] = std::abs(ev[i].imag());
      largest = std::max(largest, std::abs(ev[i].imag()));
    }
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (std::abs(ev[i].real()) > spectrum_pair_tol * largest) {
        throw SpectrumError("eigenvalue of W has a non-negligible real part");
      }
    }
    SymplecticSpectrum out = detail::collapse_pairs(std::move(mags), spectrum_pair_tol);
    if (!(out.values.back() > 0.0)) {
      throw SpectrumError("zero symplectic eigenvalue");
    }
    return out;
  }

  /// Spectrum of diag(A, B) from the square roots of the eigenvalues of A B.
  inline SymplecticSpectrum symplectic_spectrum_blockdiag(SymmetricPDMatrix const& a, SymmetricPDMatrix const& b) {
    if (a.dim() != b.dim()) {
      throw DimensionError("symplectic_spectrum_blockdiag: A is " + std::to_string(a.dim()) + "-dimensional but B is "
                           + std::to_string(b.dim()) + "-dimensional");
    }
    Matrix ab = a.matrix() * b.matrix();
    Eigen::EigenSolver<Matrix> eig(ab, /*computeEigenvectors=*/false);
    if (eig.info() != Eigen::Success) {
      throw SpectrumError("eigenvalue iteration on AB did not converge");
    }
    auto const& ev = eig.eigenvalues();
    double largest = ev.cwiseAbs().maxCoeff();
    SymplecticSpectrum out;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (std::abs(ev[i].imag()) > spectrum_pair_tol * largest || !(ev[i].real() > 0.0)) {
        throw SpectrumError("AB has an eigenvalue off the positive real axis");
      }
      out.values.push_back(std::sqrt(ev[i].real()));
    }
    std::sort(out.values.begin(), out.values.end(), std::greater<>());
    return out;
  }

  /// Capacity pi / lambda_max of the ellipsoid {z : z^T M z <= 1}.
  inline double ellipsoid_capacity(SymmetricPDMatrix const& m) { return std::numbers::pi / symplectic_spectrum(m).max(); }

  /// Shape matrix of the round ball of radius r in dimension 2n.
  inline SymmetricPDMatrix ball_shape(Eigen::Index n, double r) {
    if (!(r > 0.0)) {
      throw PreconditionError("ball radius must be positive");
    }
    return SymmetricPDMatrix(Matrix::Identity(2 * n, 2 * n) / (r * r));
  }

  inline Matrix block_diag(Matrix const& a, Matrix const& b) {
    Matrix m = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    m.topLeftCorner(a.rows(), a.cols()) = a;
    m.bottomRightCorner(b.rows(), b.cols()) = b;
    return m;
  }

  /**
   * @brief Seeded random symplectic matrix exp(J A).
   *
   * A is symmetric with entries uniform on [-sigma, sigma], drawn row by row from the upper triangle. The exponential
   * uses Eigen's scaling-and-squaring Pade implementation.
   */
  inline Matrix random_symplectic(Eigen::Index n, double sigma, std::uint64_t seed) {
    if (n < 1) {
      throw DimensionError("random_symplectic requires n >= 1");
    }
    if (!(sigma > 0.0)) {
      throw PreconditionError("random_symplectic requires sigma > 0");
    }
    Rng rng(seed);
    Matrix a(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < 2 * n; ++i) {
      for (Eigen::Index k = i; k < 2 * n; ++k) {
        a(i, k) = a(k, i) = rng.uniform(-sigma, sigma);
      }
    }
    Matrix h = standard_j(n) * a;
    return h.exp();
  }

}  // namespace sympb
