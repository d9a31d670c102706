#include "kmreg/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "kmreg/errors.hpp"

namespace kmreg {

namespace {

double component_value(const ProfileComponent& c, const RectDomain& dom, double x, double y) {
    const double fx = x / dom.lx;
    const double fy = y / dom.ly;
    switch (c.kind) {
        case ProfileComponent::Kind::bump: {
            const double dx = fx - c.center_x;
            const double dy = fy - c.center_y;
            return c.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * c.width * c.width));
        }
        case ProfileComponent::Kind::piecewise:
            return (fx >= c.x0 && fx <= c.x1 && fy >= c.y0 && fy <= c.y1) ? c.amplitude : 0.0;
        default:
            return 0.0;
    }
}

void add_noise(SpectralField& field, double level, std::mt19937_64& rng) {
    if (level == 0.0) return;
    const double rms = field.norm() / std::sqrt(static_cast<double>(field.size()));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < field.size(); ++i) field[i] += level * rms * normal(rng);
}

}  // namespace

SpectralField project_profile(const Profile& profile, const BasisPtr& basis) {
    SpectralField out(basis);
    const RectDomain& dom = basis->domain();
    for (const auto& c : profile) {
        switch (c.kind) {
            case ProfileComponent::Kind::zero: break;
            case ProfileComponent::Kind::mode:
                out[basis->flat_index({c.k, c.m})] += c.amplitude;
                break;
            case ProfileComponent::Kind::coefficients: {
                if (c.coefficients.size() != basis->size()) {
                    std::ostringstream os;
                    os << "coefficient profile needs " << basis->size() << " values, got " << c.coefficients.size();
                    throw ConfigError(os.str());
                }
                for (std::size_t i = 0; i < basis->size(); ++i) out[i] += c.amplitude * c.coefficients[i];
                break;
            }
            case ProfileComponent::Kind::bump:
            case ProfileComponent::Kind::piecewise: {
                const GridField grid =
                    GridField::sample(dom, [&](double x, double y) { return component_value(c, dom, x, y); });
                out += forward_transform(grid, basis);
                break;
            }
        }
    }
    return out;
}

void ExperimentConfig::validate() const {
    domain.validate();
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("T must be positive");
    if (!(a2 > 0.0) || !std::isfinite(a2)) throw ConfigError("a2 must be positive");
    if (method == MethodKind::parabolic && (!(gamma > 0.0) || !std::isfinite(gamma))) {
        throw ConfigError("gamma must be positive");
    }
    if (!(noise_level >= 0.0) || !std::isfinite(noise_level)) throw ConfigError("noise_level must be >= 0");
    if (!(resonance_tol > 0.0)) throw ConfigError("resonance_tol must be positive");
    for (std::size_t i = 1; i < checkpoints.size(); ++i) {
        if (checkpoints[i] <= checkpoints[i - 1]) throw ConfigError("checkpoints must be strictly increasing");
    }
    for (const Profile* p : {&ground_truth, &initial_rate}) {
        for (const auto& c : *p) {
            if (c.kind == ProfileComponent::Kind::bump && !(c.width > 0.0)) {
                throw ConfigError("bump width must be positive");
            }
            if (c.kind == ProfileComponent::Kind::piecewise && !(c.x0 < c.x1 && c.y0 < c.y1)) {
                throw ConfigError("piecewise profile needs x0 < x1 and y0 < y1");
            }
            if (!std::isfinite(c.amplitude)) throw ConfigError("profile amplitude must be finite");
        }
    }
}

ManufacturedProblem manufacture_data(const ExperimentConfig& config) {
    config.validate();
    BasisPtr basis = build_basis(config.domain, config.kmax, config.a2);
    SpectralField u0 = project_profile(config.ground_truth, basis);
    SpectralField r0 = project_profile(config.initial_rate, basis);
    std::mt19937_64 rng(config.seed);

    switch (config.method) {
        case MethodKind::parabolic: {
            SpectralField f = parabolic_forward(u0, config.t_end, config.a2);
            add_noise(f, config.noise_level, rng);
            return {basis, config.method, FinalDataParabolic{std::move(f), config.t_end}, u0, u0, r0};
        }
        case MethodKind::elliptic: {
            const CauchyDataElliptic clean{u0, r0};
            SpectralField truth = elliptic_state_at(clean, config.t_end).rate;
            SpectralField f = u0;
            SpectralField g = r0;
            add_noise(f, config.noise_level, rng);
            add_noise(g, config.noise_level, rng);
            return {basis, config.method, CauchyDataElliptic{std::move(f), std::move(g)}, std::move(truth), u0, r0};
        }
        case MethodKind::hyperbolic: {
            const ResonanceReport res = resonance_check(*basis, config.t_end, config.resonance_tol);
            for (std::size_t i : res.flagged) {
                if (u0[i] != 0.0 || r0[i] != 0.0) {
                    const ModeIndex mode = basis->mode(i);
                    std::ostringstream os;
                    os.precision(17);
                    os << "ground truth excites resonant mode (" << mode.k << "," << mode.m
                       << "), lambda=" << basis->eigenvalue(i) << ", |sin(lambda T)|=" << res.modes[i].abs_sin;
                    throw ResonanceError(os.str(), basis->eigenvalue(i));
                }
            }
            SpectralField f = u0;
            SpectralField g = hyperbolic_ivp(u0, r0, config.t_end).value;
            add_noise(f, config.noise_level, rng);
            add_noise(g, config.noise_level, rng);
            return {basis, config.method, DirichletDataHyperbolic{std::move(f), std::move(g), config.t_end}, r0, u0,
                    r0};
        }
    }
    throw ConfigError("unknown method");
}

AffineIteration build_iteration(const ManufacturedProblem& problem, const ExperimentConfig& config) {
    return std::visit(
        [&](const auto& data) -> AffineIteration {
            using T = std::decay_t<decltype(data)>;
            if constexpr (std::is_same_v<T, CauchyDataElliptic>) {
                return build_elliptic(data, config.t_end);
            } else if constexpr (std::is_same_v<T, DirichletDataHyperbolic>) {
                return build_hyperbolic(data, config.resonance_tol);
            } else {
                return build_parabolic(data, config.gamma, config.a2);
            }
        },
        problem.data);
}

SpectralField iterate_via_solves(const ManufacturedProblem& problem, const ExperimentConfig& config,
                                 const SpectralField& phi0, std::uint64_t k) {
    return std::visit(
        [&](const auto& data) -> SpectralField {
            using T = std::decay_t<decltype(data)>;
            if constexpr (std::is_same_v<T, CauchyDataElliptic>) {
                return iterate_via_solves(data, config.t_end, phi0, k);
            } else if constexpr (std::is_same_v<T, DirichletDataHyperbolic>) {
                return iterate_via_solves(data, phi0, k);
            } else {
                return iterate_via_solves(data, config.gamma, config.a2, phi0, k);
            }
        },
        problem.data);
}

SpectralField forward_solution(const ManufacturedProblem& problem, const ExperimentConfig& config, double t) {
    if (!std::isfinite(t) || t < 0.0) throw UsageError("forward time must be nonnegative");
    switch (problem.method) {
        case MethodKind::parabolic: return parabolic_forward(problem.initial_value, t, config.a2);
        case MethodKind::elliptic:
            return elliptic_solution_at(CauchyDataElliptic{problem.initial_value, problem.initial_rate}, t);
        case MethodKind::hyperbolic: return hyperbolic_ivp(problem.initial_value, problem.initial_rate, t).value;
    }
    throw ConfigError("unknown method");
}

// --- runs ------------------------------------------------------------------------

GridField RunReport::reconstruction(std::size_t row) const {
    return inverse_transform(rows.at(row).iterate);
}

GridField RunReport::error_field(std::size_t row) const {
    const GridField diff = inverse_transform(rows.at(row).iterate - truth);
    std::vector<double> values(diff.values().begin(), diff.values().end());
    for (double& v : values) v = std::abs(v);
    return GridField(diff.domain(), std::move(values));
}

RunReport run_experiment(const ExperimentConfig& config) {
    const ManufacturedProblem problem = manufacture_data(config);
    const AffineIteration it = build_iteration(problem, config);
    const SpectralField phi0(problem.basis);
    const double truth_norm = problem.truth.norm();

    RunReport report{config, problem.truth, {}};
    for (std::uint64_t k : config.checkpoints) {
        const auto start = std::chrono::steady_clock::now();
        SpectralField phi = iterate_closed_form(it, phi0, k);
        const double increment = increment_closed_form(it, phi0, k).norm();
        const auto stop = std::chrono::steady_clock::now();

        const double err = (phi - problem.truth).norm();
        double percent = 0.0;
        if (truth_norm > 0.0) {
            percent = 100.0 * err / truth_norm;
        } else if (err > 0.0) {
            percent = INFINITY;
        }
        ReportRow row{k, percent, increment, std::chrono::duration<double, std::milli>(stop - start).count(),
                      std::move(phi), std::nullopt};
        if (k <= config.cross_validate_up_to) {
            const SpectralField literal = iterate_via_solves(problem, config, phi0, k);
            const double scale = std::max(row.iterate.norm(), 1e-300);
            row.via_solves_discrepancy = (literal - row.iterate).norm() / scale;
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::vector<RateRow> convergence_rate_table(const RunReport& report) {
    if (report.rows.size() < 2) throw UsageError("convergence rates need at least two checkpoints");
    std::vector<RateRow> out;
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        RateRow r{report.rows[i - 1].step, report.rows[i].step, std::nullopt};
        const double prev = report.rows[i - 1].rel_error_percent;
        if (prev > 0.0 && std::isfinite(prev)) r.ratio = report.rows[i].rel_error_percent / prev;
        out.push_back(r);
    }
    return out;
}

SpectralField random_field(const BasisPtr& basis, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    SpectralField out(basis);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = normal(rng);
    return out;
}

std::vector<EquivalenceRow> run_equivalence(const ExperimentConfig& config, const std::vector<std::uint64_t>& ks,
                                            double multiplier_perturbation) {
    for (std::uint64_t k : ks) {
        if (k > kMaxEquivalenceSteps) {
            throw UsageError("equivalence runs the literal loop; k must be <= " +
                             std::to_string(kMaxEquivalenceSteps));
        }
    }
    const ManufacturedProblem problem = manufacture_data(config);
    AffineIteration it = build_iteration(problem, config);
    if (multiplier_perturbation != 0.0) {
        for (std::size_t i = 0; i < it.size(); ++i) {
            it.multiplier[i] *= 1.0 + multiplier_perturbation;
            it.complement[i] = 1.0 - it.multiplier[i];
            it.unit_mode[i] = false;
        }
    }
    const SpectralField phi0 = random_field(problem.basis, config.seed);

    std::vector<EquivalenceRow> rows;
    for (std::uint64_t k : ks) {
        const SpectralField closed = iterate_closed_form(it, phi0, k);
        const SpectralField literal = iterate_via_solves(problem, config, phi0, k);
        double diff = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < closed.size(); ++i) {
            diff = std::max(diff, std::abs(closed[i] - literal[i]));
            scale = std::max(scale, std::abs(literal[i]));
        }
        const double rel = scale > 0.0 ? diff / scale : diff;
        rows.push_back({k, rel, rel <= kEquivalenceTol});
    }
    return rows;
}

BandErrors band_relative_errors(const SpectralField& iterate, const SpectralField& truth) {
    const SpectralBasis& basis = truth.basis();
    const auto order = basis.sorted_order();
    const std::size_t half = order.size() / 2;
    double err_lo = 0.0, err_hi = 0.0, ref_lo = 0.0, ref_hi = 0.0;
    for (std::size_t r = 0; r < order.size(); ++r) {
        const std::size_t i = order[r];
        const double e = iterate[i] - truth[i];
        if (r < half) {
            err_lo += e * e;
            ref_lo += truth[i] * truth[i];
        } else {
            err_hi += e * e;
            ref_hi += truth[i] * truth[i];
        }
    }
    const auto ratio = [](double e, double r) { return r > 0.0 ? std::sqrt(e / r) : (e > 0.0 ? INFINITY : 0.0); };
    return {ratio(err_lo, ref_lo), ratio(err_hi, ref_hi)};
}

}  // namespace kmreg
