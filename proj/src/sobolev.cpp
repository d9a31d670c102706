#include "kmreg/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kmreg/errors.hpp"

namespace kmreg {

SobolevIndex::SobolevIndex(double s) : s_(s) {
    if (!std::isfinite(s_)) throw ConfigError("Sobolev index must be finite");
}

TimeGrid::TimeGrid(double t_end, std::size_t nt) : t_end_(t_end) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("time grid needs a positive finite end time");
    if (nt < 2) throw ConfigError("time grid needs at least 2 nodes");
    nodes_.resize(nt);
    const double dt = t_end / static_cast<double>(nt - 1);
    for (std::size_t i = 0; i < nt; ++i) nodes_[i] = static_cast<double>(i) * dt;
    nodes_.back() = t_end;
}

double hs_norm(const SpectralField& field, SobolevIndex s) {
    const SpectralBasis& basis = field.basis();
    double sum = 0.0;
    for (std::size_t i = 0; i < field.size(); ++i) {
        const double lambda = basis.eigenvalue(i);
        sum += std::pow(1.0 + lambda * lambda, s.value()) * field[i] * field[i];
    }
    return std::sqrt(sum);
}

namespace {

void check_trajectory(std::span<const SpectralField> trajectory, const TimeGrid& tgrid) {
    if (trajectory.empty()) throw UsageError("empty trajectory");
    if (trajectory.size() != tgrid.size()) {
        std::ostringstream os;
        os << "trajectory has " << trajectory.size() << " samples but the time grid has " << tgrid.size();
        throw UsageError(os.str());
    }
}

}  // namespace

double trapezoid(std::span<const double> samples, const TimeGrid& tgrid) {
    if (samples.size() != tgrid.size()) throw UsageError("sample count does not match the time grid");
    double acc = 0.0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        acc += 0.5 * (tgrid[i] - tgrid[i - 1]) * (samples[i] + samples[i - 1]);
    }
    return acc;
}

double spacetime_l2_norm(std::span<const SpectralField> trajectory, SobolevIndex s, const TimeGrid& tgrid) {
    check_trajectory(trajectory, tgrid);
    std::vector<double> sq(trajectory.size());
    std::transform(trajectory.begin(), trajectory.end(), sq.begin(), [&](const SpectralField& u) {
        const double n = hs_norm(u, s);
        return n * n;
    });
    return std::sqrt(trapezoid(sq, tgrid));
}

double spacetime_sup_norm(std::span<const SpectralField> trajectory, SobolevIndex s, const TimeGrid& tgrid) {
    check_trajectory(trajectory, tgrid);
    double best = 0.0;
    for (const auto& u : trajectory) best = std::max(best, hs_norm(u, s));
    return best;
}

}  // namespace kmreg
