#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "kmreg/sobolev.hpp"
#include "kmreg/spectral.hpp"

namespace kmreg {

/// Default threshold on |sin(lambda T)| below which a mode counts as resonant.
inline constexpr double kDefaultResonanceTol = 1e-8;

/// Value and time derivative of a solution at one instant.
struct Trace {
    SpectralField value;
    SpectralField rate;
};

/// Cauchy data u(0) = f, du/dt(0) = g for u'' = A^2 u.
struct CauchyDataElliptic {
    SpectralField f;
    SpectralField g;
};

/// Dirichlet data u(0) = f, u(T) = g for u'' = -A^2 u.
struct DirichletDataHyperbolic {
    SpectralField f;
    SpectralField g;
    double t_end;
};

/// Final state u(T) = f for a2 u' = -A^2 u.
struct FinalDataParabolic {
    SpectralField f;
    double t_end;
};

// --- elliptic: u'' = A^2 u -------------------------------------------------

/// u(t) = cosh(At) f + sinh(At) A^{-1} g together with u'(t). Throws
/// EvaluationError naming lambda and t once cosh(lambda t) overflows.
Trace elliptic_state_at(const CauchyDataElliptic& data, double t);
SpectralField elliptic_solution_at(const CauchyDataElliptic& data, double t);

/// Mixed problem v(0) = f, v'(T) = phi. Always well posed.
Trace elliptic_mixed_v(const SpectralField& f, const SpectralField& phi, double t_end, double t);

/// Mixed problem w'(0) = g, w(T) = vT. Always well posed.
Trace elliptic_mixed_w(const SpectralField& g, const SpectralField& vT, double t_end, double t);

// --- hyperbolic: u'' = -A^2 u ----------------------------------------------

/// Initial value problem with value f and rate phi. Forward: state at time t.
/// Reversed: f, phi are the state at some final time and the result is the
/// state a duration t earlier.
Trace hyperbolic_ivp(const SpectralField& f, const SpectralField& phi, double t, bool reversed = false);

/// Solution of the Dirichlet problem at t. Throws ResonanceError when some
/// |sin(lambda T)| < tol.
Trace hyperbolic_state_at(const DirichletDataHyperbolic& data, double t, double tol = kDefaultResonanceTol);
SpectralField hyperbolic_solution_at(const DirichletDataHyperbolic& data, double t,
                                     double tol = kDefaultResonanceTol);

struct ResonanceEntry {
    std::size_t flat = 0;
    ModeIndex mode;
    double lambda = 0.0;
    double abs_sin = 0.0;          ///< |sin(lambda T)|
    double distance = 0.0;         ///< distance from lambda to {j pi / T : j >= 1}
    std::size_t nearest_multiple = 0;
    bool flagged = false;
};

struct ResonanceReport {
    double t_end = 0.0;
    double tol = 0.0;
    double margin = 0.0;           ///< min over modes of |sin(lambda T)|
    double min_distance = 0.0;     ///< min over modes of the distance to {j pi / T}
    std::vector<ResonanceEntry> modes;
    std::vector<std::size_t> flagged;  ///< flat indices with |sin(lambda T)| < tol

    bool ok() const { return flagged.empty(); }
};

ResonanceReport resonance_check(const SpectralBasis& basis, double t_end, double tol = kDefaultResonanceTol);

// --- parabolic: a2 u' = -A^2 u ---------------------------------------------

/// exp(-A^2 t / a2) phi0.
SpectralField parabolic_forward(const SpectralField& phi0, double t, double a2);

/// Direct inversion exp(A^2 T / a2) f. Throws EvaluationError naming lambda on overflow.
SpectralField parabolic_backward_oracle(const FinalDataParabolic& data, double a2);

// --- solution-space norms ----------------------------------------------------

/// (int_0^T ||u||_1^2 + ||u'||_0^2 dt)^(1/2) for the elliptic Cauchy solution.
double elliptic_solution_norm(const CauchyDataElliptic& data, const TimeGrid& tgrid);

/// sup_t (||u||_1^2 + ||u'||_0^2)^(1/2) for the hyperbolic Dirichlet solution.
double hyperbolic_solution_norm(const DirichletDataHyperbolic& data, const TimeGrid& tgrid,
                                double tol = kDefaultResonanceTol);

/// (int_0^T ||u||_1^2 + ||u'||_{-1}^2 dt)^(1/2) for the backward heat solution.
double parabolic_solution_norm(const FinalDataParabolic& data, double a2, const TimeGrid& tgrid);

}  // namespace kmreg
