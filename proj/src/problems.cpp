#include "kmreg/problems.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kmreg/errors.hpp"
#include "kmreg/stable_math.hpp"

namespace kmreg {

namespace {

void require_same_basis(const SpectralField& a, const SpectralField& b, const char* what) {
    const auto& ba = a.basis();
    const auto& bb = b.basis();
    if (&ba != &bb && (ba.domain() != bb.domain() || ba.kmax() != bb.kmax())) {
        throw UsageError(std::string(what) + ": fields live on different bases");
    }
}

void require_time(double t, double t_end, const char* what) {
    if (!std::isfinite(t) || t < 0.0 || t > t_end * (1.0 + 1e-14)) {
        std::ostringstream os;
        os << what << ": time " << t << " outside [0, " << t_end << "]";
        throw UsageError(os.str());
    }
}

void require_positive_time(double t_end, const char* what) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        std::ostringstream os;
        os << what << ": final time must be positive (got " << t_end << ")";
        throw ConfigError(os.str());
    }
}

// Builds a Trace mode by mode from a callable (lambda, i) -> {value, rate}.
template <class PerMode>
Trace per_mode_trace(const SpectralField& like, PerMode&& per_mode) {
    const SpectralBasis& basis = like.basis();
    std::vector<double> value(basis.size());
    std::vector<double> rate(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto [v, r] = per_mode(basis.eigenvalue(i), i);
        value[i] = v;
        rate[i] = r;
    }
    return {SpectralField(like.basis_ptr(), std::move(value)), SpectralField(like.basis_ptr(), std::move(rate))};
}

struct ModeState {
    double value;
    double rate;
};

}  // namespace

// --- elliptic ------------------------------------------------------------------

Trace elliptic_state_at(const CauchyDataElliptic& data, double t) {
    require_same_basis(data.f, data.g, "elliptic Cauchy data");
    if (!std::isfinite(t) || t < 0.0) throw UsageError("elliptic solution: time must be nonnegative");
    return per_mode_trace(data.f, [&](double lambda, std::size_t i) {
        const double ch = std::cosh(lambda * t);
        const double sh = std::sinh(lambda * t);
        const ModeState s{ch * data.f[i] + sh / lambda * data.g[i], lambda * sh * data.f[i] + ch * data.g[i]};
        if (!std::isfinite(s.value) || !std::isfinite(s.rate)) {
            std::ostringstream os;
            os.precision(17);
            os << "elliptic Cauchy solution overflows at lambda=" << lambda << ", t=" << t;
            throw EvaluationError(os.str(), lambda);
        }
        return s;
    });
}

SpectralField elliptic_solution_at(const CauchyDataElliptic& data, double t) {
    return elliptic_state_at(data, t).value;
}

Trace elliptic_mixed_v(const SpectralField& f, const SpectralField& phi, double t_end, double t) {
    require_same_basis(f, phi, "elliptic_mixed_v");
    require_positive_time(t_end, "elliptic_mixed_v");
    require_time(t, t_end, "elliptic_mixed_v");
    return per_mode_trace(f, [&](double lambda, std::size_t i) {
        const double lT = lambda * t_end;
        const double lt = lambda * t;
        const double ls = lambda * (t_end - t);
        return ModeState{
            stable::cosh_ratio(ls, lT) * f[i] + stable::sinh_cosh_ratio(lt, lT) / lambda * phi[i],
            -lambda * stable::sinh_cosh_ratio(ls, lT) * f[i] + stable::cosh_ratio(lt, lT) * phi[i]};
    });
}

Trace elliptic_mixed_w(const SpectralField& g, const SpectralField& vT, double t_end, double t) {
    require_same_basis(g, vT, "elliptic_mixed_w");
    require_positive_time(t_end, "elliptic_mixed_w");
    require_time(t, t_end, "elliptic_mixed_w");
    // w = cosh(At)/cosh(AT) vT - sinh(A(T-t))/(A cosh(AT)) g
    return per_mode_trace(g, [&](double lambda, std::size_t i) {
        const double lT = lambda * t_end;
        const double lt = lambda * t;
        const double ls = lambda * (t_end - t);
        return ModeState{
            stable::cosh_ratio(lt, lT) * vT[i] - stable::sinh_cosh_ratio(ls, lT) / lambda * g[i],
            lambda * stable::sinh_cosh_ratio(lt, lT) * vT[i] + stable::cosh_ratio(ls, lT) * g[i]};
    });
}

// --- hyperbolic ----------------------------------------------------------------

Trace hyperbolic_ivp(const SpectralField& f, const SpectralField& phi, double t, bool reversed) {
    require_same_basis(f, phi, "hyperbolic_ivp");
    if (!std::isfinite(t) || t < 0.0) throw UsageError("hyperbolic_ivp: elapsed time must be nonnegative");
    const double dir = reversed ? -1.0 : 1.0;
    return per_mode_trace(f, [&](double lambda, std::size_t i) {
        const double c = std::cos(lambda * t);
        const double s = dir * std::sin(lambda * t);
        return ModeState{c * f[i] + s / lambda * phi[i], -lambda * s * f[i] + c * phi[i]};
    });
}

namespace {

void throw_resonance(const SpectralBasis& basis, std::size_t i, double abs_sin, double t_end) {
    const ModeIndex mode = basis.mode(i);
    std::ostringstream os;
    os.precision(17);
    os << "resonant mode (" << mode.k << "," << mode.m << "): lambda=" << basis.eigenvalue(i)
       << ", |sin(lambda T)|=" << abs_sin << " at T=" << t_end;
    throw ResonanceError(os.str(), basis.eigenvalue(i));
}

}  // namespace

Trace hyperbolic_state_at(const DirichletDataHyperbolic& data, double t, double tol) {
    require_same_basis(data.f, data.g, "hyperbolic Dirichlet data");
    require_positive_time(data.t_end, "hyperbolic solution");
    require_time(t, data.t_end, "hyperbolic solution");
    const double T = data.t_end;
    return per_mode_trace(data.f, [&](double lambda, std::size_t i) {
        const double sT = std::sin(lambda * T);
        if (std::abs(sT) < tol) throw_resonance(data.f.basis(), i, std::abs(sT), T);
        const double a = std::sin(lambda * (T - t)) / sT;
        const double b = std::sin(lambda * t) / sT;
        const double da = -lambda * std::cos(lambda * (T - t)) / sT;
        const double db = lambda * std::cos(lambda * t) / sT;
        return ModeState{a * data.f[i] + b * data.g[i], da * data.f[i] + db * data.g[i]};
    });
}

SpectralField hyperbolic_solution_at(const DirichletDataHyperbolic& data, double t, double tol) {
    return hyperbolic_state_at(data, t, tol).value;
}

ResonanceReport resonance_check(const SpectralBasis& basis, double t_end, double tol) {
    require_positive_time(t_end, "resonance_check");
    if (!(tol > 0.0)) throw ConfigError("resonance tolerance must be positive");
    ResonanceReport report;
    report.t_end = t_end;
    report.tol = tol;
    report.margin = INFINITY;
    report.min_distance = INFINITY;
    const double spacing = std::numbers::pi / t_end;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        ResonanceEntry e;
        e.flat = i;
        e.mode = basis.mode(i);
        e.lambda = basis.eigenvalue(i);
        e.abs_sin = std::abs(std::sin(e.lambda * t_end));
        const double j = std::max(1.0, std::round(e.lambda / spacing));
        e.nearest_multiple = static_cast<std::size_t>(j);
        e.distance = std::abs(e.lambda - j * spacing);
        e.flagged = e.abs_sin < tol;
        report.margin = std::min(report.margin, e.abs_sin);
        report.min_distance = std::min(report.min_distance, e.distance);
        if (e.flagged) report.flagged.push_back(i);
        report.modes.push_back(e);
    }
    return report;
}

// --- parabolic -----------------------------------------------------------------

SpectralField parabolic_forward(const SpectralField& phi0, double t, double a2) {
    if (!std::isfinite(t) || t < 0.0) throw UsageError("parabolic_forward: time must be nonnegative");
    if (!(a2 > 0.0)) throw ConfigError("parabolic_forward: a2 must be positive");
    return apply_function(phi0, [&](double lambda) { return std::exp(-lambda * lambda * t / a2); });
}

SpectralField parabolic_backward_oracle(const FinalDataParabolic& data, double a2) {
    if (!std::isfinite(data.t_end) || data.t_end < 0.0) {
        throw UsageError("parabolic_backward_oracle: final time must be nonnegative");
    }
    if (!(a2 > 0.0)) throw ConfigError("parabolic_backward_oracle: a2 must be positive");
    const SpectralBasis& basis = data.f.basis();
    const double log_max = std::log(DBL_MAX);
    std::vector<double> out(basis.size(), 0.0);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const double c = data.f[i];
        if (c == 0.0) continue;
        const double lambda = basis.eigenvalue(i);
        const double exponent = lambda * lambda * data.t_end / a2;
        if (exponent + std::log(std::abs(c)) >= log_max) {
            std::ostringstream os;
            os.precision(17);
            os << "backward heat amplification exp(" << exponent << ") overflows at lambda=" << lambda;
            throw EvaluationError(os.str(), lambda);
        }
        out[i] = std::exp(exponent) * c;
    }
    return SpectralField(data.f.basis_ptr(), std::move(out));
}

// --- norms ---------------------------------------------------------------------

double elliptic_solution_norm(const CauchyDataElliptic& data, const TimeGrid& tgrid) {
    std::vector<double> integrand(tgrid.size());
    for (std::size_t n = 0; n < tgrid.size(); ++n) {
        const Trace s = elliptic_state_at(data, tgrid[n]);
        const double a = hs_norm(s.value, SobolevIndex(1.0));
        const double b = hs_norm(s.rate, SobolevIndex(0.0));
        integrand[n] = a * a + b * b;
    }
    return std::sqrt(trapezoid(integrand, tgrid));
}

double hyperbolic_solution_norm(const DirichletDataHyperbolic& data, const TimeGrid& tgrid, double tol) {
    if (std::abs(tgrid.t_end() - data.t_end) > 1e-12 * data.t_end) {
        throw UsageError("time grid does not span [0, T] of the hyperbolic data");
    }
    double best = 0.0;
    for (std::size_t n = 0; n < tgrid.size(); ++n) {
        const Trace s = hyperbolic_state_at(data, tgrid[n], tol);
        const double a = hs_norm(s.value, SobolevIndex(1.0));
        const double b = hs_norm(s.rate, SobolevIndex(0.0));
        best = std::max(best, std::sqrt(a * a + b * b));
    }
    return best;
}

double parabolic_solution_norm(const FinalDataParabolic& data, double a2, const TimeGrid& tgrid) {
    if (std::abs(tgrid.t_end() - data.t_end) > 1e-12 * data.t_end) {
        throw UsageError("time grid does not span [0, T] of the parabolic data");
    }
    const SpectralField u0 = parabolic_backward_oracle(data, a2);
    std::vector<double> integrand(tgrid.size());
    for (std::size_t n = 0; n < tgrid.size(); ++n) {
        const SpectralField u = parabolic_forward(u0, tgrid[n], a2);
        const SpectralField du = apply_function(u, [&](double lambda) { return -lambda * lambda / a2; });
        const double a = hs_norm(u, SobolevIndex(1.0));
        const double b = hs_norm(du, SobolevIndex(-1.0));
        integrand[n] = a * a + b * b;
    }
    return std::sqrt(trapezoid(integrand, tgrid));
}

}  // namespace kmreg
