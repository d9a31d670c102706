#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kmreg/iteration.hpp"
#include "kmreg/problems.hpp"
#include "kmreg/spectral.hpp"

namespace kmreg {

/// One analytic building block of a ground-truth profile. Positions and
/// widths are fractions of the domain lengths.
struct ProfileComponent {
    enum class Kind { zero, mode, bump, piecewise, coefficients };

    Kind kind = Kind::zero;
    double amplitude = 1.0;
    // mode
    std::size_t k = 1;
    std::size_t m = 1;
    // bump: amplitude * exp(-|x - c|^2 / (2 width^2))
    double center_x = 0.5;
    double center_y = 0.5;
    double width = 0.1;
    // piecewise: amplitude on [x0, x1] x [y0, y1], zero elsewhere
    double x0 = 0.55;
    double x1 = 0.85;
    double y0 = 0.25;
    double y1 = 0.75;
    // coefficients: flat (k, m) row-major list of kmax^2 amplitudes
    std::vector<double> coefficients;
};

/// Sum of components; empty means zero.
using Profile = std::vector<ProfileComponent>;

/// Projects a profile onto the basis (grid sampling + forward transform).
SpectralField project_profile(const Profile& profile, const BasisPtr& basis);

struct ExperimentConfig {
    RectDomain domain{1.0, 1.0, 33, 33};
    std::size_t kmax = 8;
    MethodKind method = MethodKind::parabolic;
    double t_end = 0.625;
    double a2 = 2.0;
    double gamma = 2.0;
    /// u(0) of the manufactured solution.
    Profile ground_truth;
    /// du/dt(0) of the manufactured solution (elliptic and hyperbolic).
    Profile initial_rate;
    double noise_level = 0.0;
    std::vector<std::uint64_t> checkpoints{10, 100, 1000, 10000, 100000};
    std::uint64_t seed = 1;
    double resonance_tol = kDefaultResonanceTol;
    /// Re-run checkpoints up to this step through the literal sub-solve loop.
    std::uint64_t cross_validate_up_to = 0;

    /// Throws ConfigError on inconsistent or unphysical values.
    void validate() const;
};

using ProblemData = std::variant<CauchyDataElliptic, DirichletDataHyperbolic, FinalDataParabolic>;

struct ManufacturedProblem {
    BasisPtr basis;
    MethodKind method = MethodKind::parabolic;
    ProblemData data;
    /// Trace the iteration should recover: du/dt(T) (elliptic), du/dt(0)
    /// (hyperbolic) or u(0) (parabolic), computed from noiseless data.
    SpectralField truth;
    SpectralField initial_value;
    SpectralField initial_rate;
};

/// Generates consistent data from the configured ground truth, then adds the
/// seeded per-mode noise (if any) to the data fields.
ManufacturedProblem manufacture_data(const ExperimentConfig& config);

/// Builds the affine map for the manufactured data.
AffineIteration build_iteration(const ManufacturedProblem& problem, const ExperimentConfig& config);

/// The literal sub-solve loop for the manufactured data.
SpectralField iterate_via_solves(const ManufacturedProblem& problem, const ExperimentConfig& config,
                                 const SpectralField& phi0, std::uint64_t k);

/// Forward solution at time t for the method's direct problem: u(t) of the
/// manufactured trajectory.
SpectralField forward_solution(const ManufacturedProblem& problem, const ExperimentConfig& config, double t);

struct ReportRow {
    std::uint64_t step = 0;
    double rel_error_percent = 0.0;  ///< 100 ||phi_k - truth|| / ||truth||; 0 when both vanish
    double increment_norm = 0.0;     ///< ||phi_k - phi_{k-1}||
    double wall_ms = 0.0;
    SpectralField iterate;
    std::optional<double> via_solves_discrepancy;
};

struct RunReport {
    ExperimentConfig config;
    SpectralField truth;
    std::vector<ReportRow> rows;

    /// phi_k on the grid for the given row.
    GridField reconstruction(std::size_t row) const;
    /// |phi_k - truth| on the grid for the given row.
    GridField error_field(std::size_t row) const;
};

RunReport run_experiment(const ExperimentConfig& config);

struct RateRow {
    std::uint64_t from_step = 0;
    std::uint64_t to_step = 0;
    std::optional<double> ratio;  ///< error(to) / error(from); undefined when error(from) = 0
};

/// Ratios of successive checkpoint errors. Needs at least two rows.
std::vector<RateRow> convergence_rate_table(const RunReport& report);

struct BandErrors {
    double low = 0.0;   ///< relative error on the lower half of the spectrum
    double high = 0.0;  ///< relative error on the upper half
};

/// Seeded standard-normal coefficients on every mode.
SpectralField random_field(const BasisPtr& basis, std::uint64_t seed);

inline constexpr double kEquivalenceTol = 1e-10;
inline constexpr std::uint64_t kMaxEquivalenceSteps = 1000;

struct EquivalenceRow {
    std::uint64_t k = 0;
    double discrepancy = 0.0;  ///< max |closed - literal| / max |literal|
    bool pass = false;
};

/// Compares iterate_closed_form with the literal sub-solve loop from a
/// seeded random initial guess. multiplier_perturbation scales every
/// multiplier by (1 + perturbation) before the closed form runs; it exists
/// so tests can check that a wrong operator is caught.
std::vector<EquivalenceRow> run_equivalence(const ExperimentConfig& config, const std::vector<std::uint64_t>& ks,
                                            double multiplier_perturbation = 0.0);

/// Splits modes at the median eigenvalue and reports ||e|| / ||truth|| per band.
BandErrors band_relative_errors(const SpectralField& iterate, const SpectralField& truth);

}  // namespace kmreg
