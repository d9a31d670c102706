#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kmreg/spectral.hpp"

namespace kmreg {

/// Order s of the Hilbert scale H^s; any finite real, negative allowed.
class SobolevIndex {
public:
    explicit SobolevIndex(double s);
    double value() const { return s_; }

private:
    double s_;
};

/// Uniform nodes 0 = t_0 < ... < t_{nt-1} = t_end.
class TimeGrid {
public:
    static constexpr std::size_t kDefaultNodes = 101;

    explicit TimeGrid(double t_end, std::size_t nt = kDefaultNodes);

    double t_end() const { return t_end_; }
    std::size_t size() const { return nodes_.size(); }
    std::span<const double> nodes() const { return nodes_; }
    double operator[](std::size_t i) const { return nodes_[i]; }

private:
    double t_end_;
    std::vector<double> nodes_;
};

/// (sum (1 + lambda^2)^s c^2)^(1/2).
double hs_norm(const SpectralField& field, SobolevIndex s);

/// Trapezoidal (int_0^T ||u(t)||_s^2 dt)^(1/2) over the time grid.
double spacetime_l2_norm(std::span<const SpectralField> trajectory, SobolevIndex s, const TimeGrid& tgrid);

/// max over time nodes of ||u(t)||_s.
double spacetime_sup_norm(std::span<const SpectralField> trajectory, SobolevIndex s, const TimeGrid& tgrid);

/// Trapezoidal rule for samples on the time grid.
double trapezoid(std::span<const double> samples, const TimeGrid& tgrid);

}  // namespace kmreg
