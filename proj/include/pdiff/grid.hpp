#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "pdiff/expr.hpp"

namespace pdiff {

/// Uniform axis-aligned lattice: node(i) = origin + h * i, shared spacing on
/// every axis. Nodes are ordered row-major (last axis fastest).
class GridSpec {
public:
    GridSpec(Eigen::VectorXd origin, double h, Eigen::VectorXi extents);

    /// The cube [lo, lo + h*(count-1)]^dim.
    static GridSpec cube(int dim, double lo, double h, int count);

    int dim() const noexcept { return static_cast<int>(origin_.size()); }
    double h() const noexcept { return h_; }
    const Eigen::VectorXd& origin() const noexcept { return origin_; }
    const Eigen::VectorXi& extents() const noexcept { return extents_; }
    const Eigen::VectorXi& strides() const noexcept { return strides_; }
    Eigen::Index size() const noexcept { return size_; }

    Eigen::Index flat(const Eigen::VectorXi& index) const { return strides_.dot(index); }
    Eigen::VectorXi unflat(Eigen::Index k) const;
    Eigen::VectorXd node(const Eigen::VectorXi& index) const {
        return origin_ + h_ * index.cast<double>();
    }
    Eigen::VectorXd node(Eigen::Index k) const { return node(unflat(k)); }

    bool on_boundary(const Eigen::VectorXi& index) const;

    /// Same dimension, spacing, origin and extents. Coordinates compared with
    /// a relative tolerance of 1e-12 in units of h.
    bool same_as(const GridSpec& other) const;

private:
    Eigen::VectorXd origin_;
    double h_;
    Eigen::VectorXi extents_;
    Eigen::VectorXi strides_;
    Eigen::Index size_ = 0;
};

/// Real samples on a GridSpec. Immutable; every value is finite.
class GridFunction {
public:
    GridFunction(GridSpec spec, Eigen::VectorXd values);

    static GridFunction zeros(const GridSpec& spec);

    const GridSpec& spec() const noexcept { return spec_; }
    const Eigen::VectorXd& values() const noexcept { return values_; }
    double operator[](Eigen::Index k) const { return values_[k]; }
    double at(const Eigen::VectorXi& index) const { return values_[spec_.flat(index)]; }

private:
    GridSpec spec_;
    Eigen::VectorXd values_;
};

enum class NormKind { L1, Linf };

GridFunction sample(const Expr& e, const GridSpec& spec);
GridFunction sample(const std::function<double(const Eigen::VectorXd&)>& f, const GridSpec& spec);

/// l1 = h^n * sum |u|, linf = max |u|.
double norm(const GridFunction& u, NormKind kind);

/// Drop lo[i] leading and hi[i] trailing nodes on axis i.
GridFunction shrink(const GridFunction& u, const Eigen::VectorXi& lo, const Eigen::VectorXi& hi);
GridSpec shrink(const GridSpec& spec, const Eigen::VectorXi& lo, const Eigen::VectorXi& hi);

/// Extract the nodes of `u` that lie on `target`. The target lattice must be
/// aligned with u's lattice and contained in it.
GridFunction restrict_to(const GridFunction& u, const GridSpec& target);

/// Pointwise a*u + b*v on identical specs.
GridFunction combine(double a, const GridFunction& u, double b, const GridFunction& v);

} // namespace pdiff
