#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace kmreg {

/// Rectangle [0, lx] x [0, ly] sampled on nx x ny uniform nodes, boundary included.
struct RectDomain {
    double lx = 1.0;
    double ly = 1.0;
    std::size_t nx = 33;
    std::size_t ny = 33;

    /// Throws ConfigError unless lx, ly > 0 and nx, ny >= 2.
    void validate() const;

    double hx() const { return lx / static_cast<double>(nx - 1); }
    double hy() const { return ly / static_cast<double>(ny - 1); }

    friend bool operator==(const RectDomain&, const RectDomain&) = default;
};

/// Index pair (k, m) of the sine mode sin(k pi x / lx) sin(m pi y / ly).
struct ModeIndex {
    std::size_t k = 1;
    std::size_t m = 1;
};

/// Dirichlet eigenbasis of A = (-Laplacian)^(1/2) on a rectangle, truncated to
/// kmax modes per axis.
///
/// Modes are stored row-major in (k, m): flat index (k - 1) * kmax + (m - 1).
/// eigenvalue(i) is the eigenvalue of A, i.e. pi * sqrt((k/lx)^2 + (m/ly)^2);
/// A^2 = -Laplacian has eigenvalue(i)^2.
class SpectralBasis {
public:
    SpectralBasis(RectDomain domain, std::size_t kmax, double diffusion_coeff);

    const RectDomain& domain() const { return domain_; }
    std::size_t kmax() const { return kmax_; }
    std::size_t size() const { return eigenvalues_.size(); }
    double diffusion_coeff() const { return a2_; }

    std::span<const double> eigenvalues() const { return eigenvalues_; }
    double eigenvalue(std::size_t i) const { return eigenvalues_[i]; }
    double eigenvalue(ModeIndex mode) const { return eigenvalues_[flat_index(mode)]; }

    /// Smallest eigenvalue (lambda bar); strictly positive.
    double min_eigenvalue() const { return eigenvalues_[sorted_[0]]; }
    double max_eigenvalue() const { return eigenvalues_[sorted_.back()]; }

    /// Flat indices ordered by nondecreasing eigenvalue.
    std::span<const std::size_t> sorted_order() const { return sorted_; }

    std::size_t flat_index(ModeIndex mode) const;
    ModeIndex mode(std::size_t flat) const;

private:
    RectDomain domain_;
    std::size_t kmax_;
    double a2_;
    std::vector<double> eigenvalues_;
    std::vector<std::size_t> sorted_;
};

using BasisPtr = std::shared_ptr<const SpectralBasis>;

/// Validates and builds a basis. kmax must satisfy 1 <= kmax <= min(nx, ny) - 2,
/// the number of interior nodes per axis; a2 must be positive.
BasisPtr build_basis(const RectDomain& domain, std::size_t kmax, double a2);

/// Function of x stored as amplitudes of sin(k pi x/lx) sin(m pi y/ly).
class SpectralField {
public:
    explicit SpectralField(BasisPtr basis);
    SpectralField(BasisPtr basis, std::vector<double> coeffs);

    static SpectralField single_mode(BasisPtr basis, ModeIndex mode, double amplitude = 1.0);

    const SpectralBasis& basis() const { return *basis_; }
    const BasisPtr& basis_ptr() const { return basis_; }

    std::span<const double> coeffs() const { return coeffs_; }
    std::span<double> coeffs() { return coeffs_; }
    std::size_t size() const { return coeffs_.size(); }
    double operator[](std::size_t i) const { return coeffs_[i]; }
    double& operator[](std::size_t i) { return coeffs_[i]; }
    double at(ModeIndex mode) const { return coeffs_[basis_->flat_index(mode)]; }

    /// l2 norm of the coefficient vector.
    double norm() const;

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(double s);

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

private:
    void check_compatible(const SpectralField& other) const;

    BasisPtr basis_;
    std::vector<double> coeffs_;
};

/// Grid samples, row-major with y outer: values[j * nx + i] = u(i hx, j hy).
class GridField {
public:
    explicit GridField(RectDomain domain);
    /// Boundary rows and columns are forced to zero.
    GridField(RectDomain domain, std::vector<double> values);

    static GridField sample(const RectDomain& domain, const std::function<double(double, double)>& fn);

    const RectDomain& domain() const { return domain_; }
    std::span<const double> values() const { return values_; }
    double operator()(std::size_t i, std::size_t j) const { return values_[j * domain_.nx + i]; }

    /// Trapezoidal L2 norm over the rectangle.
    double l2_norm() const;
    double max_abs() const;

private:
    RectDomain domain_;
    std::vector<double> values_;
};

/// Type-I double sine analysis of the grid samples, truncated to the basis modes.
SpectralField forward_transform(const GridField& field, const BasisPtr& basis);

/// Synthesis sum of the retained modes on the basis grid.
GridField inverse_transform(const SpectralField& field);

/// Functional calculus: c'_i = fn(lambda_i) c_i. Throws EvaluationError naming
/// lambda when fn is non-finite on some eigenvalue.
SpectralField apply_function(const SpectralField& field, const std::function<double(double)>& fn);

/// fn(lambda_i) for every mode, with the same finiteness check as apply_function.
std::vector<double> evaluate_on_spectrum(const SpectralBasis& basis, const std::function<double(double)>& fn);

/// Scale between the trapezoidal L2 norm of a band-limited grid field and the
/// l2 norm of its amplitude coefficients: sqrt(lx ly) / 2.
double parseval_factor(const RectDomain& domain);

}  // namespace kmreg
