#pragma once

// Affiliated self-adjoint observables through their Cayley transform
// u_T = h₀(T), h₀(z) = (z + i)(z − i)⁻¹. h₀ maps R onto the unit circle
// minus {1}; the point 1 carries "infinity", and T = ∞ is u_T = 1.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "repfam/algebra/element.hpp"
#include "repfam/error.hpp"
#include "repfam/families.hpp"
#include "repfam/lambda_grid.hpp"
#include "repfam/linalg.hpp"
#include "repfam/matrix.hpp"
#include "repfam/parallel.hpp"
#include "repfam/spectral.hpp"
#include "repfam/spectrum_set.hpp"

namespace repfam {

inline Complex cayley_h0(double x) { return (Complex(x, 1.0)) / Complex(x, -1.0); }

/// h₀⁻¹(w) = i(w + 1)/(w − 1), real for |w| = 1, w ≠ 1.
inline Complex cayley_inverse(Complex w) { return Complex(0.0, 1.0) * (w + 1.0) / (w - 1.0); }

class Observable {
  public:
    enum class Kind { Bounded, Infinite, Fibered };

    /// Self-adjoint matrix.
    static Observable bounded(ComplexMatrix t, std::string label = "T") {
        require_self_adjoint(t, label);
        Observable o(Kind::Bounded, std::move(label));
        o.values_.push_back(std::move(t));
        return o;
    }

    /// Self-adjoint element of an algebra model; its spectrum is read from
    /// the values at the grid points.
    static Observable bounded(const AlgebraElement& a, std::string label = "T") {
        for (const auto& v : a.values()) require_self_adjoint(v, label);
        Observable o(Kind::Bounded, std::move(label));
        o.values_ = a.values();
        return o;
    }

    /// θ_T = 0.
    static Observable infinite(std::string label = "infinity") { return Observable(Kind::Infinite, std::move(label)); }

    /// λ ↦ T(λ) sampled at every node of `grid`, in node order.
    template <typename F>
    static Observable fibered(const LambdaGrid& grid, F&& fiber, std::string label = "T") {
        auto fibers = parallel_map(grid.size(), [&](std::size_t i) { return ComplexMatrix(fiber(grid.nodes()[i])); });
        return fibered(grid, std::move(fibers), std::move(label));
    }

    static Observable fibered(const LambdaGrid& grid, std::vector<ComplexMatrix> fibers, std::string label = "T") {
        if (fibers.size() != grid.size()) throw InvalidArgument("fibered observable needs one fiber per grid node");
        for (std::size_t i = 0; i < fibers.size(); ++i)
            require_self_adjoint(fibers[i], label + " at lambda = " + LambdaGrid::format(grid.nodes()[i]));
        Observable o(Kind::Fibered, std::move(label));
        o.values_ = std::move(fibers);
        o.grid_.emplace_back(grid);
        return o;
    }

    Kind kind() const noexcept { return kind_; }
    const std::string& label() const noexcept { return label_; }
    /// Bounded: the matrix, or the element's grid values. Fibered: the fibers.
    const std::vector<ComplexMatrix>& values() const noexcept { return values_; }
    const LambdaGrid* grid() const noexcept { return grid_.empty() ? nullptr : &grid_.front(); }

  private:
    Observable(Kind k, std::string label) : kind_(k), label_(std::move(label)) {}

    static void require_self_adjoint(const ComplexMatrix& m, const std::string& label) {
        if (!is_hermitian(m, kDefaultTol)) throw NotSelfAdjoint("observable '" + label + "' is not self-adjoint");
    }

    Kind kind_;
    std::string label_;
    std::vector<ComplexMatrix> values_;
    std::vector<LambdaGrid> grid_;  // at most one; LambdaGrid has no empty state
};

inline const char* to_string(Observable::Kind k) {
    switch (k) {
        case Observable::Kind::Bounded: return "bounded";
        case Observable::Kind::Infinite: return "infinite";
        case Observable::Kind::Fibered: return "fibered";
    }
    return "?";
}

/// u_T. For the Infinite kind `values` is empty and the element is 1.
struct CayleyElement {
    Observable::Kind kind;
    std::vector<ComplexMatrix> values;

    bool is_one() const noexcept { return kind == Observable::Kind::Infinite; }

    /// max ‖uᴴu − 1‖ over the stored matrices.
    double unitarity_defect() const {
        double d = 0.0;
        for (const auto& u : values) d = std::max(d, op_norm(u.adjoint() * u - ComplexMatrix::identity(u.dim())));
        return d;
    }
};

inline ComplexMatrix cayley(const ComplexMatrix& t) {
    return func_calc(t, [](double x) { return cayley_h0(x); });
}

inline CayleyElement cayley(const Observable& t) {
    CayleyElement u{t.kind(), {}};
    u.values = parallel_map(t.values().size(), [&](std::size_t i) { return cayley(t.values()[i]); });
    return u;
}

/// Spec(T) = h₀⁻¹(Spec(u_T)). Eigenvalues of u_T within `resolution` of 1
/// carry the infinite part and are discarded; doing so marks the result
/// truncated. Fibered observables are always truncated (finite window).
/// Spec(∞) = ∅, not truncated.
inline SpectrumSet spec_observable(const Observable& t, double resolution = kDefaultTol) {
    const auto u = cayley(t);
    bool discarded = false;
    std::vector<Complex> pts;
    for (const auto& m : u.values) {
        for (Complex w : eig_normal(m, resolution).points()) {
            if (std::abs(w - 1.0) <= resolution) {
                discarded = true;
                continue;
            }
            pts.emplace_back(cayley_inverse(w).real());
        }
    }
    return SpectrumSet(std::move(pts), resolution, discarded || t.kind() == Observable::Kind::Fibered);
}

/// Images φ(T) of one observable under the members of a family, with the
/// certificate the family carries.
struct ObservableFamily {
    std::string label;
    std::vector<Observable> members;
    SpectralContract certified = SpectralContract::Equal;
};

struct ObservableUnion {
    SpectrumSet spectrum;
    SpectralContract contract = SpectralContract::Equal;
    bool degenerate = false;  // every member spectrum empty

    /// "equal": the union is Spec(T); "dense in Spec(T)": only its closure is.
    std::string relation() const {
        switch (contract) {
            case SpectralContract::Equal: return "equal";
            case SpectralContract::Closure: return "dense in Spec(T)";
            case SpectralContract::None: return "uncertified";
        }
        return "?";
    }
};

inline ObservableUnion spec_union_observable(const ObservableFamily& f, double resolution = kDefaultTol) {
    ObservableUnion r{SpectrumSet({}, resolution), f.certified, true};
    for (const auto& m : f.members) {
        const auto s = spec_observable(m, resolution);
        if (!s.empty()) r.degenerate = false;
        r.spectrum = r.spectrum.united(s);
    }
    return r;
}

enum class InvertMode {
    Exhausting,  // invertible iff every φ(T) is
    Faithful,    // additionally dist(0, Spec φ(T)) ≥ 1/bound for every φ
};

struct ObservableInvertibility {
    bool invertible = false;
    bool degenerate = false;    // vacuous: every member spectrum empty
    double distance_to_zero = std::numeric_limits<double>::infinity();  // min over members
    std::string nearest_member; // member realising distance_to_zero
};

inline ObservableInvertibility invertible_observable(const ObservableFamily& f, InvertMode mode, double bound = 0.0,
                                                     double resolution = kDefaultTol) {
    if (mode == InvertMode::Exhausting && f.certified != SpectralContract::Equal)
        throw NotCertified("family '" + f.label + "' carries no exhausting certificate");
    if (mode == InvertMode::Faithful) {
        if (f.certified == SpectralContract::None)
            throw NotCertified("family '" + f.label + "' carries no faithful certificate");
        if (!(bound > 0.0)) throw InvalidArgument("faithful mode needs a positive inverse bound");
    }
    ObservableInvertibility r;
    r.degenerate = true;
    for (const auto& m : f.members) {
        const auto s = spec_observable(m, resolution);
        if (s.empty()) continue;
        r.degenerate = false;
        const double d = s.distance_to(0.0);
        if (d < r.distance_to_zero) {
            r.distance_to_zero = d;
            r.nearest_member = m.label();
        }
    }
    r.invertible = r.distance_to_zero > resolution;
    if (mode == InvertMode::Faithful) r.invertible = r.invertible && r.distance_to_zero * bound >= 1.0 - 1e-12;
    return r;
}

}  // namespace repfam
