#include "kmreg/iteration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kmreg/errors.hpp"
#include "kmreg/stable_math.hpp"

namespace kmreg {

std::string_view to_string(MethodKind kind) {
    switch (kind) {
        case MethodKind::elliptic: return "elliptic";
        case MethodKind::hyperbolic: return "hyperbolic";
        case MethodKind::parabolic: return "parabolic";
    }
    return "unknown";
}

MethodKind parse_method_kind(std::string_view name) {
    if (name == "elliptic") return MethodKind::elliptic;
    if (name == "hyperbolic") return MethodKind::hyperbolic;
    if (name == "parabolic") return MethodKind::parabolic;
    throw ConfigError("unknown method '" + std::string(name) + "' (expected elliptic, hyperbolic or parabolic)");
}

namespace {

void require_positive_time(double t_end) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        std::ostringstream os;
        os << "final time must be positive (got " << t_end << ")";
        throw ConfigError(os.str());
    }
}

AffineIteration empty_iteration(MethodKind kind, const BasisPtr& basis, double t_end) {
    AffineIteration it{kind, {}, {}, {}, SpectralField(basis), t_end, 0.0, 1.0};
    it.multiplier.assign(basis->size(), 0.0);
    it.complement.assign(basis->size(), 1.0);
    it.unit_mode.assign(basis->size(), false);
    return it;
}

void fill_elliptic_linear(AffineIteration& it) {
    const SpectralBasis& basis = it.basis();
    for (std::size_t i = 0; i < it.size(); ++i) {
        const double x = basis.eigenvalue(i) * it.t_end;
        it.multiplier[i] = stable::tanh_squared(x);
        it.complement[i] = stable::sech_squared(x);
        if (it.complement[i] == 0.0) {
            it.multiplier[i] = 1.0;
            it.unit_mode[i] = true;
        }
    }
}

void fill_hyperbolic_linear(AffineIteration& it, double tol) {
    const SpectralBasis& basis = it.basis();
    for (std::size_t i = 0; i < it.size(); ++i) {
        const double x = basis.eigenvalue(i) * it.t_end;
        const double s = std::sin(x);
        const double c = std::cos(x);
        it.multiplier[i] = c * c;
        it.complement[i] = s * s;
        if (std::abs(s) < tol) {
            it.multiplier[i] = 1.0;
            it.complement[i] = 0.0;
            it.unit_mode[i] = true;
        }
    }
}

void fill_parabolic_linear(AffineIteration& it) {
    const SpectralBasis& basis = it.basis();
    for (std::size_t i = 0; i < it.size(); ++i) {
        const double lambda = basis.eigenvalue(i);
        const double q = it.gamma * std::exp(-lambda * lambda * it.t_end / it.a2);
        it.complement[i] = q;
        it.multiplier[i] = 1.0 - q;
        if (q == 0.0) it.unit_mode[i] = true;
    }
}

}  // namespace

AffineIteration build_elliptic(const CauchyDataElliptic& data, double t_end) {
    require_positive_time(t_end);
    AffineIteration it = empty_iteration(MethodKind::elliptic, data.f.basis_ptr(), t_end);
    fill_elliptic_linear(it);
    const SpectralBasis& basis = it.basis();
    std::vector<double> h(it.size());
    for (std::size_t i = 0; i < it.size(); ++i) {
        const double lambda = basis.eigenvalue(i);
        const double x = lambda * t_end;
        const double sech = std::sqrt(it.complement[i]);
        h[i] = lambda * std::tanh(x) * sech * data.f[i] + sech * data.g[i];
    }
    it.offset = SpectralField(data.f.basis_ptr(), std::move(h));
    return it;
}

AffineIteration build_hyperbolic(const DirichletDataHyperbolic& data, double tol) {
    require_positive_time(data.t_end);
    AffineIteration it = empty_iteration(MethodKind::hyperbolic, data.f.basis_ptr(), data.t_end);
    fill_hyperbolic_linear(it, tol);
    const SpectralBasis& basis = it.basis();
    std::vector<double> h(it.size(), 0.0);
    for (std::size_t i = 0; i < it.size(); ++i) {
        const double lambda = basis.eigenvalue(i);
        if (it.unit_mode[i]) {
            if (data.f[i] != 0.0 || data.g[i] != 0.0) {
                const ModeIndex mode = basis.mode(i);
                std::ostringstream os;
                os.precision(17);
                os << "Dirichlet data is nonzero on resonant mode (" << mode.k << "," << mode.m
                   << "), lambda=" << lambda << ", T=" << data.t_end;
                throw InconsistencyError(os.str(), lambda);
            }
            continue;
        }
        const double x = lambda * data.t_end;
        const double s = std::sin(x);
        const double c = std::cos(x);
        h[i] = lambda * s * (data.g[i] - c * data.f[i]);
    }
    it.offset = SpectralField(data.f.basis_ptr(), std::move(h));
    return it;
}

AffineIteration build_parabolic(const FinalDataParabolic& data, double gamma, double a2) {
    require_positive_time(data.t_end);
    const GammaReport report = gamma_admissible(gamma, data.f.basis(), data.t_end, a2);
    if (!report.admissible()) throw ParameterBoundError("inadmissible gamma: " + report.describe());
    AffineIteration it = empty_iteration(MethodKind::parabolic, data.f.basis_ptr(), data.t_end);
    it.gamma = gamma;
    it.a2 = a2;
    fill_parabolic_linear(it);
    it.offset = gamma * data.f;
    return it;
}

AffineIteration linear_part(MethodKind kind, const BasisPtr& basis, double t_end, double gamma, double a2,
                            double tol) {
    require_positive_time(t_end);
    AffineIteration it = empty_iteration(kind, basis, t_end);
    switch (kind) {
        case MethodKind::elliptic: fill_elliptic_linear(it); break;
        case MethodKind::hyperbolic: fill_hyperbolic_linear(it, tol); break;
        case MethodKind::parabolic:
            if (!(a2 > 0.0)) throw ConfigError("a2 must be positive");
            it.gamma = gamma;
            it.a2 = a2;
            fill_parabolic_linear(it);
            break;
    }
    return it;
}

// --- gamma bounds ----------------------------------------------------------------

GammaReport gamma_admissible(double gamma, const SpectralBasis& basis, double t_end, double a2) {
    require_positive_time(t_end);
    if (!(a2 > 0.0)) throw ConfigError("a2 must be positive");
    GammaReport r;
    r.gamma = gamma;
    r.lambda_min = basis.min_eigenvalue();
    const double lmin2 = r.lambda_min * r.lambda_min;
    r.nonexpansive_bound = 2.0 * std::exp(lmin2 * t_end / a2);
    r.positive = gamma > 0.0 && std::isfinite(gamma);
    r.nonexpansive = r.positive && gamma < r.nonexpansive_bound;
    const double tilde2 = lmin2 - a2 * std::numbers::ln2 / t_end;
    if (tilde2 > 0.0) {
        r.lambda_tilde = std::sqrt(tilde2);
        r.injectivity_bound = 2.0 * std::exp(tilde2 * t_end / a2);
        r.injective = r.positive && gamma < *r.injectivity_bound;
    }
    return r;
}

std::string GammaReport::describe() const {
    std::ostringstream os;
    os.precision(10);
    os << "gamma=" << gamma << ", non-expansive bound 2exp(lambda_min^2 T/a2)=" << nonexpansive_bound << " ("
       << (nonexpansive ? "holds" : "violated") << ")";
    if (injectivity_bound) {
        os << ", injectivity bound 2exp(lambda_tilde^2 T/a2)=" << *injectivity_bound << " ("
           << (*injective ? "holds" : "violated") << ")";
    } else {
        os << ", injectivity bound undefined (lambda_min^2 <= a2 ln2 / T)";
    }
    if (!positive) os << "; gamma must be positive";
    return os.str();
}

// --- iteration -------------------------------------------------------------------

SpectralField apply_once(const AffineIteration& it, const SpectralField& phi) {
    std::vector<double> out(it.size());
    for (std::size_t i = 0; i < it.size(); ++i) out[i] = it.multiplier[i] * phi[i] + it.offset[i];
    return SpectralField(phi.basis_ptr(), std::move(out));
}

namespace {

struct PowerTerms {
    double power;       // m^k
    double series;      // (1 - m^k) / (1 - m) = sum_{j<k} m^j
};

PowerTerms power_terms(double m, double q, bool unit, std::uint64_t k) {
    const double kd = static_cast<double>(k);
    if (k == 0) return {1.0, 0.0};
    if (unit) return {1.0, kd};
    if (q <= 1.0) {
        // m = 1 - q >= 0: work with log1p(-q) so that m near 1 keeps its digits.
        const double lg = std::log1p(-q);
        return {std::exp(kd * lg), -std::expm1(kd * lg) / q};
    }
    const double p = std::pow(m, kd);
    return {p, (1.0 - p) / q};
}

}  // namespace

SpectralField iterate_closed_form(const AffineIteration& it, const SpectralField& phi0, std::uint64_t k) {
    std::vector<double> out(it.size());
    for (std::size_t i = 0; i < it.size(); ++i) {
        const auto [p, s] = power_terms(it.multiplier[i], it.complement[i], it.unit_mode[i], k);
        out[i] = p * phi0[i] + s * it.offset[i];
    }
    return SpectralField(phi0.basis_ptr(), std::move(out));
}

SpectralField increment_closed_form(const AffineIteration& it, const SpectralField& phi0, std::uint64_t k) {
    std::vector<double> out(it.size(), 0.0);
    if (k > 0) {
        for (std::size_t i = 0; i < it.size(); ++i) {
            const auto [p, s] = power_terms(it.multiplier[i], it.complement[i], it.unit_mode[i], k - 1);
            (void)s;
            out[i] = p * (it.offset[i] - it.complement[i] * phi0[i]);
        }
    }
    return SpectralField(phi0.basis_ptr(), std::move(out));
}

SpectralField iterate_via_solves(const CauchyDataElliptic& data, double t_end, const SpectralField& phi0,
                                 std::uint64_t k) {
    SpectralField phi = phi0;
    for (std::uint64_t step = 0; step < k; ++step) {
        const Trace v = elliptic_mixed_v(data.f, phi, t_end, t_end);
        const Trace w = elliptic_mixed_w(data.g, v.value, t_end, t_end);
        phi = w.rate;
    }
    return phi;
}

SpectralField iterate_via_solves(const DirichletDataHyperbolic& data, const SpectralField& phi0, std::uint64_t k) {
    SpectralField phi = phi0;
    for (std::uint64_t step = 0; step < k; ++step) {
        const Trace v = hyperbolic_ivp(data.f, phi, data.t_end);
        const Trace w = hyperbolic_ivp(data.g, v.rate, data.t_end, /*reversed=*/true);
        phi = w.rate;
    }
    return phi;
}

SpectralField iterate_via_solves(const FinalDataParabolic& data, double gamma, double a2, const SpectralField& phi0,
                                 std::uint64_t k) {
    SpectralField phi = phi0;
    for (std::uint64_t step = 0; step < k; ++step) {
        const SpectralField vT = parabolic_forward(phi, data.t_end, a2);
        phi -= gamma * (vT - data.f);
    }
    return phi;
}

SpectralField fixed_point_projection(const AffineIteration& it, const SpectralField& phi0) {
    const SpectralBasis& basis = it.basis();
    std::vector<double> out(it.size());
    for (std::size_t i = 0; i < it.size(); ++i) {
        if (it.unit_mode[i]) {
            if (it.offset[i] != 0.0) {
                const ModeIndex mode = basis.mode(i);
                std::ostringstream os;
                os.precision(17);
                os << "iteration diverges on unit mode (" << mode.k << "," << mode.m
                   << "), lambda=" << basis.eigenvalue(i);
                throw EvaluationError(os.str(), basis.eigenvalue(i));
            }
            out[i] = phi0[i];
            continue;
        }
        out[i] = it.offset[i] / it.complement[i];
        if (!std::isfinite(out[i])) {
            std::ostringstream os;
            os.precision(17);
            os << "fixed point overflows at lambda=" << basis.eigenvalue(i);
            throw EvaluationError(os.str(), basis.eigenvalue(i));
        }
    }
    return SpectralField(phi0.basis_ptr(), std::move(out));
}

// --- diagnostics -----------------------------------------------------------------

OperatorDiagnostics operator_diagnostics(const AffineIteration& it, double tol) {
    OperatorDiagnostics d;
    d.kind = it.kind;
    d.nonexpansive = true;
    d.positive = true;
    d.below_one = true;
    d.contraction_inequality = true;
    d.min_multiplier = INFINITY;
    d.max_multiplier = -INFINITY;
    for (std::size_t i = 0; i < it.size(); ++i) {
        const double m = it.multiplier[i];
        const double q = it.complement[i];
        d.max_abs_multiplier = std::max(d.max_abs_multiplier, std::abs(m));
        d.min_multiplier = std::min(d.min_multiplier, m);
        d.max_multiplier = std::max(d.max_multiplier, m);
        // |m| <= 1  <=>  0 <= q <= 2
        if (q < 0.0 || q > 2.0) d.nonexpansive = false;
        if (!(m > 0.0)) d.positive = false;
        if (it.unit_mode[i] || !(q > 0.0)) {
            d.below_one = false;
            d.unit_modes.push_back(i);
        }
        // (1 - m)^2 <= 1 - m^2  <=>  q^2 <= q (1 + m)  <=>  0 <= q <= 1
        if (q < 0.0 || q > 1.0) d.contraction_inequality = false;
        if (std::abs(m) <= tol * tol) d.kernel_modes.push_back(i);
    }
    if (it.kind == MethodKind::parabolic) {
        d.gamma = gamma_admissible(it.gamma, it.basis(), it.t_end, it.a2);
    }
    if (it.kind == MethodKind::hyperbolic) {
        d.resonance = resonance_check(it.basis(), it.t_end, tol);
    }
    return d;
}

std::vector<std::string> OperatorDiagnostics::flags() const {
    std::vector<std::string> out;
    std::ostringstream os;
    os.precision(10);
    if (!nonexpansive) {
        os << "not non-expansive: max |m| = " << max_abs_multiplier;
        out.push_back(os.str());
        os.str("");
    }
    if (!unit_modes.empty()) {
        os << "eigenvalue 1 on " << unit_modes.size() << " mode(s)";
        out.push_back(os.str());
        os.str("");
    }
    switch (kind) {
        case MethodKind::elliptic:
            if (!positive) out.emplace_back("multiplier not strictly positive");
            if (!contraction_inequality) out.emplace_back("(1-m)^2 <= 1-m^2 violated");
            break;
        case MethodKind::hyperbolic:
            if (min_multiplier < 0.0) out.emplace_back("multiplier negative");
            if (!contraction_inequality) out.emplace_back("(1-m)^2 <= 1-m^2 violated");
            if (resonance && !resonance->ok()) {
                os << "resonant modes: " << resonance->flagged.size() << " with |sin(lambda T)| < "
                   << resonance->tol;
                out.push_back(os.str());
                os.str("");
            }
            break;
        case MethodKind::parabolic:
            if (gamma && !gamma->admissible()) out.push_back("gamma bound: " + gamma->describe());
            break;
    }
    return out;
}

// --- traces ----------------------------------------------------------------------

IterationTrace trace_iteration(const AffineIteration& it, const SpectralField& phi0,
                               const std::vector<std::uint64_t>& steps, const std::optional<SpectralField>& reference) {
    IterationTrace trace;
    std::optional<std::uint64_t> last;
    const double ref_norm = reference ? reference->norm() : 0.0;
    for (std::uint64_t k : steps) {
        if (last && k <= *last) throw UsageError("checkpoint steps must be strictly increasing");
        last = k;
        Checkpoint cp{k, iterate_closed_form(it, phi0, k), std::nullopt, increment_closed_form(it, phi0, k).norm()};
        if (reference) {
            const double err = (cp.iterate - *reference).norm();
            cp.relative_error = ref_norm > 0.0 ? err / ref_norm : (err == 0.0 ? 0.0 : INFINITY);
        }
        trace.checkpoints.push_back(std::move(cp));
    }
    return trace;
}

std::vector<std::uint64_t> decade_schedule(std::uint64_t cap) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t k = 10; k <= cap; k *= 10) {
        out.push_back(k);
        if (k > cap / 10) break;
    }
    return out;
}

}  // namespace kmreg
