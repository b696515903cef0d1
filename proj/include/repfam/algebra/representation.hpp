#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "repfam/algebra/element.hpp"
#include "repfam/algebra/model.hpp"
#include "repfam/algebra/toeplitz.hpp"
#include "repfam/error.hpp"
#include "repfam/linalg.hpp"

namespace repfam {

/// ev_t : a ↦ a(t).
struct EvalPoint {
    double t;
    friend bool operator==(const EvalPoint&, const EvalPoint&) = default;
};
/// ev_t^i : a ↦ i-th diagonal block of a(t), at a constrained point t.
struct CompressedEval {
    double t;
    std::size_t block;
    friend bool operator==(const CompressedEval&, const CompressedEval&) = default;
};
/// The identity representation π of the Toeplitz algebra on l²(N).
struct ToeplitzIdentity {
    friend bool operator==(const ToeplitzIdentity&, const ToeplitzIdentity&) = default;
};
/// χ_θ : x ↦ σ(θ), vanishing on the compact ideal.
struct ToeplitzCharacter {
    double theta;
    friend bool operator==(const ToeplitzCharacter&, const ToeplitzCharacter&) = default;
};

class Representation {
  public:
    using Kind = std::variant<EvalPoint, CompressedEval, ToeplitzIdentity, ToeplitzCharacter>;

    Representation(Kind k) : kind_(k) {}  // NOLINT(google-explicit-constructor)
    Representation(EvalPoint k) : kind_(k) {}  // NOLINT(google-explicit-constructor)
    Representation(CompressedEval k) : kind_(k) {}  // NOLINT(google-explicit-constructor)
    Representation(ToeplitzIdentity k) : kind_(k) {}  // NOLINT(google-explicit-constructor)
    Representation(ToeplitzCharacter k) : kind_(k) {}  // NOLINT(google-explicit-constructor)

    const Kind& kind() const noexcept { return kind_; }

    template <typename T>
    bool is() const noexcept {
        return std::holds_alternative<T>(kind_);
    }
    template <typename T>
    const T& as() const {
        return std::get<T>(kind_);
    }

    bool is_toeplitz() const noexcept { return is<ToeplitzIdentity>() || is<ToeplitzCharacter>(); }

    /// Stable identifier, e.g. "ev(0.5)", "ev(1)[0]", "pi", "chi(3.14159)".
    std::string label() const {
        return std::visit(
            [](const auto& k) -> std::string {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, EvalPoint>) return "ev(" + fmt(k.t) + ")";
                else if constexpr (std::is_same_v<T, CompressedEval>)
                    return "ev(" + fmt(k.t) + ")[" + std::to_string(k.block) + "]";
                else if constexpr (std::is_same_v<T, ToeplitzIdentity>) return "pi";
                else return "chi(" + fmt(k.theta) + ")";
            },
            kind_);
    }

    friend bool operator==(const Representation&, const Representation&) = default;

  private:
    static std::string fmt(double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return buf;
    }

    Kind kind_;
};

/// φ(a) for an element of a function-algebra model.
inline ComplexMatrix rep_apply(const Representation& phi, const AlgebraElement& a) {
    const auto& model = *a.model();
    if (const auto* ev = std::get_if<EvalPoint>(&phi.kind())) {
        if (!model.base.contains(ev->t) && !model.base.index_of(ev->t))
            throw IncompatibleModel(phi.label() + " is not a point of the base space");
        return a.at(ev->t);
    }
    if (const auto* ce = std::get_if<CompressedEval>(&phi.kind())) {
        const auto* c = model.blocks.constraint_at(ce->t);
        if (!c) throw IncompatibleModel(phi.label() + ": no block constraint at this point");
        if (ce->block >= c->blocks.size()) throw IncompatibleModel(phi.label() + ": no such block");
        const auto [b, e] = c->blocks[ce->block];
        return a.at(ce->t).block(b, e);
    }
    throw IncompatibleModel(phi.label() + " is a Toeplitz representation, element is a function-algebra element");
}

/// φ(x) for a Toeplitz element; π needs the section size `n`.
inline ComplexMatrix rep_apply(const Representation& phi, const ToeplitzElement& x, std::size_t n) {
    if (phi.is<ToeplitzIdentity>()) return x.section(n);
    if (const auto* ch = std::get_if<ToeplitzCharacter>(&phi.kind())) {
        ComplexMatrix m(1);
        m(0, 0) = x.symbol(ch->theta);
        return m;
    }
    throw IncompatibleModel(phi.label() + " is not a Toeplitz representation");
}

/// ‖φ(x)‖. For π this is the finite-section norm over the element's sections.
inline double rep_norm(const Representation& phi, const ToeplitzElement& x) {
    if (phi.is<ToeplitzIdentity>()) return toeplitz_norm(x).value;
    return op_norm(rep_apply(phi, x, 0));
}

inline double rep_norm(const Representation& phi, const AlgebraElement& a) { return op_norm(rep_apply(phi, a)); }

/// A primitive ideal, named by the irreducible representation whose kernel
/// it is, with the points known to lie in its closure.
struct PrimPoint {
    Representation label;
    std::vector<Representation> closure_hint;
};

using AnyModel = std::variant<ModelPtr, std::shared_ptr<const ToeplitzModel>>;

/// Irreducible representations (up to equivalence) of a function-algebra
/// model, one per unconstrained grid point and one per block at constrained
/// points. The base spaces are Hausdorff, so closures are trivial.
inline std::vector<PrimPoint> enum_prim(const AlgebraModel& model) {
    std::vector<PrimPoint> out;
    for (double t : model.base.grid()) {
        if (const auto* c = model.blocks.constraint_at(t)) {
            for (std::size_t i = 0; i < c->blocks.size(); ++i) out.push_back(PrimPoint{CompressedEval{t, i}, {}});
        } else {
            out.push_back(PrimPoint{EvalPoint{t}, {}});
        }
    }
    return out;
}

/// π together with the sampled characters; every χ_θ lies in closure{π}.
inline std::vector<PrimPoint> enum_prim(const ToeplitzModel& model) {
    std::vector<PrimPoint> out;
    std::vector<Representation> chars;
    for (std::size_t j = 0; j < model.theta_samples; ++j) chars.emplace_back(ToeplitzCharacter{model.theta(j)});
    out.push_back(PrimPoint{ToeplitzIdentity{}, chars});
    for (const auto& ch : chars) out.push_back(PrimPoint{ch, {}});
    return out;
}

inline std::vector<PrimPoint> enum_prim(const AnyModel& model) {
    return std::visit([](const auto& m) -> std::vector<PrimPoint> {
        if (!m) throw UnsupportedModel("enum_prim: null model");
        return enum_prim(*m);
    }, model);
}

/// supp(φ): primitive ideals containing ker φ, i.e. the closure of the
/// irreducible constituents of φ.
inline std::vector<Representation> support(const Representation& phi, const AnyModel& model) {
    if (const auto* alg = std::get_if<ModelPtr>(&model)) {
        const auto& m = **alg;
        if (phi.is_toeplitz()) throw IncompatibleModel(phi.label() + " does not act on " + m.name);
        if (const auto* ev = std::get_if<EvalPoint>(&phi.kind())) {
            auto idx = m.base.index_of(ev->t);
            if (!idx) throw IncompatibleModel(phi.label() + " is not a sampled point");
            const double t = m.base.grid()[*idx];
            if (const auto* c = m.blocks.constraint_at(t)) {
                std::vector<Representation> s;
                for (std::size_t i = 0; i < c->blocks.size(); ++i) s.emplace_back(CompressedEval{t, i});
                return s;
            }
            return {Representation(EvalPoint{t})};
        }
        return {phi};
    }
    const auto& tm = *std::get<std::shared_ptr<const ToeplitzModel>>(model);
    if (!phi.is_toeplitz()) throw IncompatibleModel(phi.label() + " does not act on the Toeplitz model");
    if (phi.is<ToeplitzIdentity>()) {
        std::vector<Representation> s{Representation(ToeplitzIdentity{})};
        for (std::size_t j = 0; j < tm.theta_samples; ++j) s.emplace_back(ToeplitzCharacter{tm.theta(j)});
        return s;
    }
    return {phi};
}

/// Distance between primitive ideals at sampling resolution: the base-space
/// distance of their points, infinite between distinct blocks at one point
/// and between distinct points of a discrete space. π is isolated among the
/// Toeplitz points (it is open), characters use the angular distance.
inline double prim_distance(const AnyModel& model, const Representation& p, const Representation& q) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (p == q) return 0.0;
    if (const auto* alg = std::get_if<ModelPtr>(&model)) {
        auto point_of = [](const Representation& r) {
            if (const auto* e = std::get_if<EvalPoint>(&r.kind())) return e->t;
            return std::get<CompressedEval>(r.kind()).t;
        };
        const double s = point_of(p), t = point_of(q);
        const double d = (*alg)->base.distance(s, t);
        if (d == 0.0) return inf;  // distinct blocks over the same point
        return d;
    }
    if (p.is<ToeplitzIdentity>() || q.is<ToeplitzIdentity>()) return inf;
    const double d = std::abs(p.as<ToeplitzCharacter>().theta - q.as<ToeplitzCharacter>().theta);
    return std::min(d, 2.0 * std::numbers::pi - d);
}

/// Resolution at which the primitive spectrum of a model is sampled.
inline double prim_resolution(const AnyModel& model) {
    if (const auto* alg = std::get_if<ModelPtr>(&model)) return (*alg)->base.grid_step();
    return std::get<std::shared_ptr<const ToeplitzModel>>(model)->theta_step();
}

/// n_a sampled on the primitive spectrum: ‖π(a)‖ for every PrimPoint.
inline std::vector<std::pair<PrimPoint, double>> n_a_profile(const AlgebraElement& a) {
    std::vector<std::pair<PrimPoint, double>> out;
    for (auto& p : enum_prim(*a.model())) {
        const double n = rep_norm(p.label, a);
        out.emplace_back(std::move(p), n);
    }
    return out;
}

inline std::vector<std::pair<PrimPoint, double>> n_a_profile(const ToeplitzElement& x, const ToeplitzModel& model) {
    std::vector<std::pair<PrimPoint, double>> out;
    for (auto& p : enum_prim(model)) {
        const double n = rep_norm(p.label, x);
        out.emplace_back(std::move(p), n);
    }
    return out;
}

}  // namespace repfam
