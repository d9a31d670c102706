#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kmreg/problems.hpp"
#include "kmreg/spectral.hpp"

namespace kmreg {

enum class MethodKind { elliptic, hyperbolic, parabolic };

std::string_view to_string(MethodKind kind);
/// Throws ConfigError on an unknown name.
MethodKind parse_method_kind(std::string_view name);

/// Diagonal affine map phi -> m(lambda) phi + h, one entry per mode.
///
/// complement[i] = 1 - multiplier[i] is stored separately because it is the
/// quantity that carries the information when m rounds to 1 (tanh(lambda T)^2
/// for large lambda T, 1 - gamma exp(-lambda^2 T / a2) for high modes). Modes
/// in unit_mode are treated as exact eigenvalue-1 modes: m = 1, complement = 0.
struct AffineIteration {
    MethodKind kind = MethodKind::parabolic;
    std::vector<double> multiplier;
    std::vector<double> complement;
    std::vector<bool> unit_mode;
    SpectralField offset;
    double t_end = 0.0;
    double gamma = 0.0;  ///< parabolic step size, 0 otherwise
    double a2 = 1.0;     ///< parabolic diffusion coefficient, 1 otherwise

    const SpectralBasis& basis() const { return offset.basis(); }
    std::size_t size() const { return multiplier.size(); }
};

/// T_e: m = tanh(lambda T)^2, h = lambda sinh(lambda T) / cosh(lambda T)^2 f + g / cosh(lambda T).
/// Its fixed point is du/dt(T) of the Cauchy solution.
AffineIteration build_elliptic(const CauchyDataElliptic& data, double t_end);

/// T_h: m = cos(lambda T)^2, h = -lambda cos(lambda T) sin(lambda T) f + lambda sin(lambda T) g.
/// Its fixed point is du/dt(0) of the Dirichlet solution. Modes with
/// |sin(lambda T)| < tol are unit modes; nonzero data there throws InconsistencyError.
AffineIteration build_hyperbolic(const DirichletDataHyperbolic& data, double tol = kDefaultResonanceTol);

/// T_p: m = 1 - gamma exp(-lambda^2 T / a2), h = gamma f. Throws
/// ParameterBoundError unless 0 < gamma < 2 exp(lambda_min^2 T / a2).
AffineIteration build_parabolic(const FinalDataParabolic& data, double gamma, double a2);

/// Linear part only (zero offset), for diagnostics that do not depend on data.
AffineIteration linear_part(MethodKind kind, const BasisPtr& basis, double t_end, double gamma = 0.0,
                            double a2 = 1.0, double tol = kDefaultResonanceTol);

struct GammaReport {
    double gamma = 0.0;
    double lambda_min = 0.0;
    double nonexpansive_bound = 0.0;          ///< 2 exp(lambda_min^2 T / a2)
    bool positive = false;                    ///< gamma > 0
    bool nonexpansive = false;                ///< positive && gamma < nonexpansive_bound
    std::optional<double> lambda_tilde;       ///< sqrt(lambda_min^2 - a2 ln 2 / T) when real
    std::optional<double> injectivity_bound;  ///< 2 exp(lambda_tilde^2 T / a2)
    std::optional<bool> injective;

    bool admissible() const { return nonexpansive; }
    std::string describe() const;
};

GammaReport gamma_admissible(double gamma, const SpectralBasis& basis, double t_end, double a2);

/// One application of the map.
SpectralField apply_once(const AffineIteration& it, const SpectralField& phi);

/// T^k(phi0) = m^k phi0 + (1 - m^k) / (1 - m) h per mode; phi0 + k h on unit modes.
/// Cost is independent of k.
SpectralField iterate_closed_form(const AffineIteration& it, const SpectralField& phi0, std::uint64_t k);

/// phi_k - phi_{k-1} = m^(k-1) (h - (1 - m) phi0); zero for k = 0.
SpectralField increment_closed_form(const AffineIteration& it, const SpectralField& phi0, std::uint64_t k);

/// The literal alternating procedures: k rounds of well-posed sub-solves.
SpectralField iterate_via_solves(const CauchyDataElliptic& data, double t_end, const SpectralField& phi0,
                                 std::uint64_t k);
SpectralField iterate_via_solves(const DirichletDataHyperbolic& data, const SpectralField& phi0, std::uint64_t k);
SpectralField iterate_via_solves(const FinalDataParabolic& data, double gamma, double a2, const SpectralField& phi0,
                                 std::uint64_t k);

/// lim T^k(phi0): h / (1 - m) where m < 1, phi0 on unit modes with h = 0.
/// Throws EvaluationError naming lambda on a unit mode with h != 0.
SpectralField fixed_point_projection(const AffineIteration& it, const SpectralField& phi0);

struct OperatorDiagnostics {
    MethodKind kind = MethodKind::parabolic;
    double max_abs_multiplier = 0.0;
    double min_multiplier = 0.0;
    double max_multiplier = 0.0;
    bool nonexpansive = false;       ///< |m| <= 1 on every mode
    bool positive = false;           ///< m > 0 on every mode
    bool below_one = false;          ///< m < 1 on every mode
    bool contraction_inequality = false;  ///< (1 - m)^2 <= 1 - m^2 on every mode
    std::vector<std::size_t> unit_modes;    ///< eigenvalue-1 modes
    std::vector<std::size_t> kernel_modes;  ///< m == 0 up to the resonance tolerance squared
    std::optional<GammaReport> gamma;       ///< parabolic only
    std::optional<ResonanceReport> resonance;  ///< hyperbolic only

    /// Human-readable list of violated claims for this method.
    std::vector<std::string> flags() const;
    bool passed() const { return flags().empty(); }
};

OperatorDiagnostics operator_diagnostics(const AffineIteration& it, double tol = kDefaultResonanceTol);

struct Checkpoint {
    std::uint64_t step = 0;
    SpectralField iterate;
    std::optional<double> relative_error;  ///< ||phi_k - ref|| / ||ref||
    double increment_norm = 0.0;
};

struct IterationTrace {
    std::vector<Checkpoint> checkpoints;
};

/// Snapshots of T^k(phi0) at increasing steps via the closed form.
IterationTrace trace_iteration(const AffineIteration& it, const SpectralField& phi0,
                               const std::vector<std::uint64_t>& steps,
                               const std::optional<SpectralField>& reference = std::nullopt);

/// 10, 100, ... up to and including cap when cap is a power of ten.
std::vector<std::uint64_t> decade_schedule(std::uint64_t cap);

}  // namespace kmreg
