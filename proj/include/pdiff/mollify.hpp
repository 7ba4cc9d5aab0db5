#pragma once

#include <vector>

#include <Eigen/Core>

#include "pdiff/grid.hpp"

namespace pdiff {

/// phi(s) = exp(-1 / (1 - s)) for s < 1, else 0.
double bump(double s);

/// Sampled omega_eps(x) = eps^-n * phi(|x / eps|^2) / Z on the lattice
/// h * Z^n, centered at the origin.
///
/// Z is integrated by tensor-product midpoint quadrature over [-1, 1]^n with
/// refine * ceil(2 eps / h) panels per axis. The samples are then rescaled
/// so that h^n * sum(samples) == 1; `mass` keeps that rescaled value and
/// `raw_mass` the value before rescaling.
struct MollifierKernel {
    int dim = 0;
    double eps = 0.0;
    double spacing = 0.0;
    int radius = 0; // nodes per half-axis: floor(eps / spacing)
    double z = 0.0;
    double raw_mass = 0.0;
    double mass = 0.0;
    GridFunction samples;
};

/// Rejects eps < h and kernels whose raw mass is off by more than 10%.
MollifierKernel make_mollifier(int dim, double eps, double h, int refine = 8);

/// Midpoint-rule Z = int_{[-1,1]^n} phi(|x|^2) dx with `panels` per axis.
double mollifier_normalization(int dim, int panels);

/// (f * k)(z) = h^n * sum_x f(x) k(z - x) on f's grid shrunk by the kernel
/// radius on every side.
GridFunction convolve(const GridFunction& f, const MollifierKernel& k);

struct KernelAudit {
    double mass_error = 0.0;       // |mass - 1|
    double min_value = 0.0;
    double symmetry_error = 0.0;   // max |k(x) - k(-x)|
    double support_violation = 0.0; // max |k(x)| over |x| > eps
    double support_radius = 0.0;   // largest |x| with k(x) > 0
};

KernelAudit audit(const MollifierKernel& k);

struct ConvergenceTrace {
    std::vector<double> eps;
    std::vector<double> errors;
    bool non_increasing = true; // e[i+1] <= 1.05 * e[i]
};

/// L1 distance between f * omega_eps and f for each eps, measured on the
/// interior common to all kernels. eps must be strictly descending.
ConvergenceTrace l1_convergence(const GridFunction& f, const std::vector<double>& eps, int refine = 8);

/// |(f * omega_eps)(x0) - f(x0)| at a fixed node of f, for each eps.
std::vector<double> pointwise_errors(const GridFunction& f, const std::vector<double>& eps,
                                     const Eigen::VectorXi& node, int refine = 8);

struct CommutationResult {
    double deviation = 0.0;
    double scale = 0.0; // |f|_inf * h^n * sum |Dk|, a bound on either side
};

/// Linf gap between the centered difference along `axis` (1-based) of f * k
/// and f convolved with the centered difference of k.
CommutationResult derivative_commute(const GridFunction& f, const MollifierKernel& k, int axis);

} // namespace pdiff
