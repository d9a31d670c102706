#include "kmreg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "kmreg/errors.hpp"

namespace kmreg {

namespace {

// table[(k - 1) * n + i] = sin(k pi i / (n - 1)) for k in [1, kmax], i in [0, n - 1].
// The product k * i is reduced modulo 2 (n - 1) first so large k stays accurate.
std::vector<double> sine_table(std::size_t kmax, std::size_t n) {
    const std::size_t intervals = n - 1;
    std::vector<double> table(kmax * n);
    for (std::size_t k = 1; k <= kmax; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t r = (k * i) % (2 * intervals);
            double s = 0.0;
            if (r != 0 && r != intervals) {
                s = std::sin(std::numbers::pi * static_cast<double>(r) / static_cast<double>(intervals));
            }
            table[(k - 1) * n + i] = s;
        }
    }
    return table;
}

}  // namespace

void RectDomain::validate() const {
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
        std::ostringstream os;
        os << "domain lengths must be positive and finite (lx=" << lx << ", ly=" << ly << ")";
        throw ConfigError(os.str());
    }
    if (nx < 2 || ny < 2) {
        std::ostringstream os;
        os << "grid needs at least 2 nodes per axis (nx=" << nx << ", ny=" << ny << ")";
        throw ConfigError(os.str());
    }
}

SpectralBasis::SpectralBasis(RectDomain domain, std::size_t kmax, double diffusion_coeff)
    : domain_(domain), kmax_(kmax), a2_(diffusion_coeff) {
    domain_.validate();
    const std::size_t limit = std::min(domain_.nx, domain_.ny) - 2;
    if (kmax_ < 1 || kmax_ > limit) {
        std::ostringstream os;
        os << "kmax=" << kmax_ << " out of range [1, " << limit << "] for a " << domain_.nx << "x"
           << domain_.ny << " grid";
        throw ConfigError(os.str());
    }
    if (!(a2_ > 0.0) || !std::isfinite(a2_)) {
        std::ostringstream os;
        os << "diffusion coefficient a2 must be positive (got " << a2_ << ")";
        throw ConfigError(os.str());
    }

    eigenvalues_.resize(kmax_ * kmax_);
    for (std::size_t k = 1; k <= kmax_; ++k) {
        for (std::size_t m = 1; m <= kmax_; ++m) {
            const double kx = static_cast<double>(k) / domain_.lx;
            const double my = static_cast<double>(m) / domain_.ly;
            eigenvalues_[flat_index({k, m})] = std::numbers::pi * std::hypot(kx, my);
        }
    }
    sorted_.resize(eigenvalues_.size());
    std::iota(sorted_.begin(), sorted_.end(), std::size_t{0});
    std::stable_sort(sorted_.begin(), sorted_.end(),
                     [this](std::size_t a, std::size_t b) { return eigenvalues_[a] < eigenvalues_[b]; });
}

std::size_t SpectralBasis::flat_index(ModeIndex mode) const {
    if (mode.k < 1 || mode.k > kmax_ || mode.m < 1 || mode.m > kmax_) {
        std::ostringstream os;
        os << "mode (" << mode.k << ", " << mode.m << ") outside 1.." << kmax_;
        throw UsageError(os.str());
    }
    return (mode.k - 1) * kmax_ + (mode.m - 1);
}

ModeIndex SpectralBasis::mode(std::size_t flat) const {
    return {flat / kmax_ + 1, flat % kmax_ + 1};
}

BasisPtr build_basis(const RectDomain& domain, std::size_t kmax, double a2) {
    return std::make_shared<const SpectralBasis>(domain, kmax, a2);
}

// --- SpectralField -------------------------------------------------------

SpectralField::SpectralField(BasisPtr basis) : basis_(std::move(basis)) {
    if (!basis_) throw UsageError("spectral field needs a basis");
    coeffs_.assign(basis_->size(), 0.0);
}

SpectralField::SpectralField(BasisPtr basis, std::vector<double> coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
    if (!basis_) throw UsageError("spectral field needs a basis");
    if (coeffs_.size() != basis_->size()) {
        std::ostringstream os;
        os << "expected " << basis_->size() << " coefficients, got " << coeffs_.size();
        throw UsageError(os.str());
    }
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (!std::isfinite(coeffs_[i])) {
            std::ostringstream os;
            os << "non-finite coefficient at flat index " << i;
            throw UsageError(os.str());
        }
    }
}

SpectralField SpectralField::single_mode(BasisPtr basis, ModeIndex mode, double amplitude) {
    SpectralField out(std::move(basis));
    out.coeffs_[out.basis_->flat_index(mode)] = amplitude;
    return out;
}

double SpectralField::norm() const {
    // Scaled accumulation keeps huge amplitudes (backward heat) from overflowing.
    double scale = 0.0;
    for (double c : coeffs_) scale = std::max(scale, std::abs(c));
    if (scale == 0.0 || !std::isfinite(scale)) return scale;
    double sum = 0.0;
    for (double c : coeffs_) {
        const double r = c / scale;
        sum += r * r;
    }
    return scale * std::sqrt(sum);
}

void SpectralField::check_compatible(const SpectralField& other) const {
    if (basis_ != other.basis_ && (basis_->domain() != other.basis_->domain() || basis_->kmax() != other.basis_->kmax())) {
        throw UsageError("spectral fields live on different bases");
    }
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    check_compatible(other);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
    check_compatible(other);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (double& c : coeffs_) c *= s;
    return *this;
}

// --- GridField -----------------------------------------------------------

GridField::GridField(RectDomain domain) : domain_(domain) {
    domain_.validate();
    values_.assign(domain_.nx * domain_.ny, 0.0);
}

GridField::GridField(RectDomain domain, std::vector<double> values)
    : domain_(domain), values_(std::move(values)) {
    domain_.validate();
    const std::size_t nx = domain_.nx;
    const std::size_t ny = domain_.ny;
    if (values_.size() != nx * ny) {
        std::ostringstream os;
        os << "grid expects " << nx * ny << " values, got " << values_.size();
        throw UsageError(os.str());
    }
    for (std::size_t i = 0; i < nx; ++i) {
        values_[i] = 0.0;
        values_[(ny - 1) * nx + i] = 0.0;
    }
    for (std::size_t j = 0; j < ny; ++j) {
        values_[j * nx] = 0.0;
        values_[j * nx + nx - 1] = 0.0;
    }
}

GridField GridField::sample(const RectDomain& domain, const std::function<double(double, double)>& fn) {
    domain.validate();
    std::vector<double> values(domain.nx * domain.ny, 0.0);
    for (std::size_t j = 1; j + 1 < domain.ny; ++j) {
        for (std::size_t i = 1; i + 1 < domain.nx; ++i) {
            values[j * domain.nx + i] = fn(static_cast<double>(i) * domain.hx(), static_cast<double>(j) * domain.hy());
        }
    }
    return GridField(domain, std::move(values));
}

double GridField::l2_norm() const {
    // Boundary samples are zero, so the trapezoidal weights reduce to hx * hy.
    double sum = 0.0;
    for (double v : values_) sum += v * v;
    return std::sqrt(sum * domain_.hx() * domain_.hy());
}

double GridField::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

// --- transforms ----------------------------------------------------------

SpectralField forward_transform(const GridField& field, const BasisPtr& basis) {
    const RectDomain& dom = field.domain();
    if (dom != basis->domain()) throw UsageError("grid field and basis are on different domains");

    const std::size_t nx = dom.nx;
    const std::size_t ny = dom.ny;
    const std::size_t kmax = basis->kmax();
    const auto sx = sine_table(kmax, nx);
    const auto sy = sine_table(kmax, ny);
    const auto values = field.values();

    // partial[j * kmax + (k - 1)] = sum_i u(i, j) sin(k pi i / (nx - 1))
    std::vector<double> partial(ny * kmax, 0.0);
    for (std::size_t j = 1; j + 1 < ny; ++j) {
        for (std::size_t k = 0; k < kmax; ++k) {
            double acc = 0.0;
            for (std::size_t i = 1; i + 1 < nx; ++i) acc += values[j * nx + i] * sx[k * nx + i];
            partial[j * kmax + k] = acc;
        }
    }

    const double norm = 4.0 / (static_cast<double>(nx - 1) * static_cast<double>(ny - 1));
    std::vector<double> coeffs(basis->size(), 0.0);
    for (std::size_t k = 0; k < kmax; ++k) {
        for (std::size_t m = 0; m < kmax; ++m) {
            double acc = 0.0;
            for (std::size_t j = 1; j + 1 < ny; ++j) acc += partial[j * kmax + k] * sy[m * ny + j];
            coeffs[k * kmax + m] = norm * acc;
        }
    }
    return SpectralField(basis, std::move(coeffs));
}

GridField inverse_transform(const SpectralField& field) {
    const SpectralBasis& basis = field.basis();
    const RectDomain& dom = basis.domain();
    const std::size_t nx = dom.nx;
    const std::size_t ny = dom.ny;
    const std::size_t kmax = basis.kmax();
    const auto sx = sine_table(kmax, nx);
    const auto sy = sine_table(kmax, ny);
    const auto c = field.coeffs();

    // partial[k * ny + j] = sum_m c(k, m) sin(m pi j / (ny - 1))
    std::vector<double> partial(kmax * ny, 0.0);
    for (std::size_t k = 0; k < kmax; ++k) {
        for (std::size_t j = 1; j + 1 < ny; ++j) {
            double acc = 0.0;
            for (std::size_t m = 0; m < kmax; ++m) acc += c[k * kmax + m] * sy[m * ny + j];
            partial[k * ny + j] = acc;
        }
    }

    std::vector<double> values(nx * ny, 0.0);
    for (std::size_t j = 1; j + 1 < ny; ++j) {
        for (std::size_t i = 1; i + 1 < nx; ++i) {
            double acc = 0.0;
            for (std::size_t k = 0; k < kmax; ++k) acc += partial[k * ny + j] * sx[k * nx + i];
            values[j * nx + i] = acc;
        }
    }
    return GridField(dom, std::move(values));
}

std::vector<double> evaluate_on_spectrum(const SpectralBasis& basis, const std::function<double(double)>& fn) {
    std::vector<double> out(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const double lambda = basis.eigenvalue(i);
        const double v = fn(lambda);
        if (!std::isfinite(v)) {
            const ModeIndex mode = basis.mode(i);
            std::ostringstream os;
            os.precision(17);
            os << "spectral function is not finite at lambda=" << lambda << " (mode " << mode.k << "," << mode.m
               << ")";
            throw EvaluationError(os.str(), lambda);
        }
        out[i] = v;
    }
    return out;
}

SpectralField apply_function(const SpectralField& field, const std::function<double(double)>& fn) {
    const auto weights = evaluate_on_spectrum(field.basis(), fn);
    std::vector<double> coeffs(field.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        coeffs[i] = weights[i] * field[i];
        if (!std::isfinite(coeffs[i])) {
            const double lambda = field.basis().eigenvalue(i);
            std::ostringstream os;
            os.precision(17);
            os << "coefficient overflows at lambda=" << lambda;
            throw EvaluationError(os.str(), lambda);
        }
    }
    return SpectralField(field.basis_ptr(), std::move(coeffs));
}

double parseval_factor(const RectDomain& domain) {
    return 0.5 * std::sqrt(domain.lx * domain.ly);
}

}  // namespace kmreg
