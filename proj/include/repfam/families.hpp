#pragma once

// Families of representations and what they certify.
//
// Universal statements over the algebra ("for every a") are replaced by
// certificates over explicit probe sets. Every report produced by
// family_report uses the probe gallery below, which contains one bump per
// sampled primitive ideal; on that gallery the implications
// full ⇒ exhausting ⇒ faithful hold by construction.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "repfam/algebra/element.hpp"
#include "repfam/algebra/model.hpp"
#include "repfam/algebra/representation.hpp"
#include "repfam/algebra/toeplitz.hpp"
#include "repfam/error.hpp"
#include "repfam/linalg.hpp"
#include "repfam/parallel.hpp"
#include "repfam/spectral.hpp"
#include "repfam/spectrum_set.hpp"

namespace repfam {

using ToeplitzModelPtr = std::shared_ptr<const ToeplitzModel>;

struct FamilyOptions {
    double resolution = kDefaultTol;  // singular values at or below count as zero
    double attain_tol = 1e-10;        // relative slack when comparing norms
};

namespace detail {

inline bool same_point(const Representation& p, const Representation& q) {
    constexpr double tol = BaseSpace::kMatchTol;
    if (p.kind().index() != q.kind().index()) return false;
    if (const auto* e = std::get_if<EvalPoint>(&p.kind())) return std::abs(e->t - q.as<EvalPoint>().t) <= tol;
    if (const auto* c = std::get_if<CompressedEval>(&p.kind())) {
        const auto& d = q.as<CompressedEval>();
        return c->block == d.block && std::abs(c->t - d.t) <= tol;
    }
    if (p.is<ToeplitzIdentity>()) return true;
    return std::abs(p.as<ToeplitzCharacter>().theta - q.as<ToeplitzCharacter>().theta) <= tol;
}

inline std::string model_name(const AnyModel& m) {
    if (const auto* a = std::get_if<ModelPtr>(&m)) return (*a)->name;
    return "toeplitz";
}

}  // namespace detail

/// A finite family of representations of one model.
class RepFamily {
  public:
    RepFamily(std::string label, AnyModel model, std::vector<Representation> members)
        : label_(std::move(label)), model_(std::move(model)), members_(std::move(members)) {
        std::visit([](const auto& m) {
            if (!m) throw UnsupportedModel("family over a null model");
        }, model_);
        if (members_.empty()) throw InvalidArgument("family '" + label_ + "' has no members");
        for (auto& phi : members_) phi = normalized(phi);
    }

    /// One member per sampled primitive ideal.
    static RepFamily all_prims(const AnyModel& model, std::string label = "all-prims") {
        std::vector<Representation> m;
        for (auto& p : enum_prim(model)) m.push_back(p.label);
        return RepFamily(std::move(label), model, std::move(m));
    }

    /// ev_t for every grid point, optionally without the endpoint t = 1 and
    /// with selected blocks of the endpoint evaluation added back.
    static RepFamily ev_grid(const ModelPtr& model, bool exclude_endpoint = false,
                             const std::vector<std::size_t>& keep_blocks = {}, std::string label = "") {
        if (!model) throw UnsupportedModel("ev_grid over a null model");
        std::vector<Representation> m;
        const bool is_interval = model->base.kind() == BaseKind::Interval;
        for (double t : model->base.grid()) {
            if (exclude_endpoint && is_interval && t == 1.0) continue;
            m.emplace_back(EvalPoint{t});
        }
        if (!keep_blocks.empty()) {
            if (!is_interval || !model->blocks.constraint_at(1.0))
                throw InvalidArgument("keep_blocks needs a block constraint at the endpoint t = 1");
            for (std::size_t b : keep_blocks) m.emplace_back(CompressedEval{1.0, b});
        }
        if (label.empty()) {
            label = exclude_endpoint ? "ev-grid exclude-endpoint" : "ev-grid";
            for (std::size_t b : keep_blocks) label += " keep-block " + std::to_string(b);
        }
        return RepFamily(std::move(label), model, std::move(m));
    }

    static RepFamily toeplitz_pi(const ToeplitzModelPtr& model) {
        return RepFamily("toeplitz-pi", model, {ToeplitzIdentity{}});
    }

    /// The sampled characters χ_θ: a family of the quotient C(S¹).
    static RepFamily toeplitz_characters(const ToeplitzModelPtr& model) {
        if (!model) throw UnsupportedModel("toeplitz_characters over a null model");
        std::vector<Representation> m;
        for (std::size_t j = 0; j < model->theta_samples; ++j) m.emplace_back(ToeplitzCharacter{model->theta(j)});
        return RepFamily("toeplitz-characters", model, std::move(m));
    }

    const std::string& label() const noexcept { return label_; }
    const AnyModel& model() const noexcept { return model_; }
    const std::vector<Representation>& members() const noexcept { return members_; }
    std::size_t size() const noexcept { return members_.size(); }

    bool is_toeplitz() const noexcept { return std::holds_alternative<ToeplitzModelPtr>(model_); }

    const ModelPtr& algebra_model() const {
        if (const auto* m = std::get_if<ModelPtr>(&model_)) return *m;
        throw IncompatibleModel("family '" + label_ + "' is over the Toeplitz model");
    }
    const ToeplitzModelPtr& toeplitz_model() const {
        if (const auto* m = std::get_if<ToeplitzModelPtr>(&model_)) return *m;
        throw IncompatibleModel("family '" + label_ + "' is not over the Toeplitz model");
    }

  private:
    // Snaps member points onto the sample grid and rejects members that do
    // not act on the model.
    Representation normalized(const Representation& phi) const {
        if (const auto* alg = std::get_if<ModelPtr>(&model_)) {
            const auto& base = (*alg)->base;
            if (phi.is_toeplitz()) throw IncompatibleModel(phi.label() + " does not act on " + (*alg)->name);
            const double t = phi.is<EvalPoint>() ? phi.as<EvalPoint>().t : phi.as<CompressedEval>().t;
            const auto idx = base.index_of(t);
            if (!idx) throw IncompatibleModel(phi.label() + " is not at a sample point of " + (*alg)->name);
            const double g = base.grid()[*idx];
            if (phi.is<EvalPoint>()) return EvalPoint{g};
            const auto* c = (*alg)->blocks.constraint_at(g);
            const std::size_t b = phi.as<CompressedEval>().block;
            if (!c || b >= c->blocks.size()) throw IncompatibleModel(phi.label() + " names no constrained block");
            return CompressedEval{g, b};
        }
        if (!phi.is_toeplitz()) throw IncompatibleModel(phi.label() + " does not act on the Toeplitz model");
        return phi;
    }

    std::string label_;
    AnyModel model_;
    std::vector<Representation> members_;
};

// ---------------------------------------------------------------------------
// Evaluation of members on elements

namespace detail {

struct RefNorm {
    double value;
    double error;
};

inline RefNorm reference_norm(const AlgebraElement& a) {
    const auto n = elem_norm(a);
    return {n.value, n.error};
}
inline RefNorm reference_norm(const ToeplitzElement& x) {
    const auto n = toeplitz_norm(x);
    return {n.value, std::abs(n.last_increment)};
}

inline void check_compatible(const RepFamily& f, const AlgebraElement& a) {
    if (f.algebra_model() != a.model())
        throw IncompatibleModel("element of " + a.model()->name + " used with family '" + f.label() + "' over " +
                                f.algebra_model()->name);
}
inline void check_compatible(const RepFamily& f, const ToeplitzElement&) { (void)f.toeplitz_model(); }

inline ComplexMatrix member_image(const Representation& phi, const AlgebraElement& a) { return rep_apply(phi, a); }

/// π is evaluated on the element's largest section.
inline ComplexMatrix member_image(const Representation& phi, const ToeplitzElement& x) {
    return rep_apply(phi, x, x.section_sizes().empty() ? 0 : x.section_sizes().back());
}

}  // namespace detail

/// ‖φ(a)‖ for every member, in member order.
template <typename E>
std::vector<double> member_norms(const RepFamily& f, const E& a) {
    detail::check_compatible(f, a);
    return parallel_map(f.size(), [&](std::size_t i) { return rep_norm(f.members()[i], a); });
}

/// sup over the family of ‖φ(a)‖.
template <typename E>
double norm_via_family(const RepFamily& f, const E& a) {
    const auto n = member_norms(f, a);
    return *std::max_element(n.begin(), n.end());
}

// ---------------------------------------------------------------------------
// Probes

enum class ProbeKind {
    User,     // element under study
    Derived,  // b = ‖a‖² − a*a of a user element
    Gallery,  // fixed elements of the model
    Bump,     // supported at a single sampled primitive ideal
};

inline const char* to_string(ProbeKind k) {
    switch (k) {
        case ProbeKind::User: return "user";
        case ProbeKind::Derived: return "derived";
        case ProbeKind::Gallery: return "gallery";
        case ProbeKind::Bump: return "bump";
    }
    return "?";
}

template <typename E>
struct Probe {
    std::string name;
    E element;
    ProbeKind kind;
};

/// ‖a‖²·1 − a*a, the element whose attained norm decides invertibility of a.
inline AlgebraElement invertibility_probe(const AlgebraElement& a) {
    const double n = elem_norm(a).value;
    return AlgebraElement::scalar(a.model(), n * n) - a.adjoint() * a;
}
inline ToeplitzElement invertibility_probe(const ToeplitzElement& x) {
    const double n = toeplitz_norm(x).value;
    return (ToeplitzElement::scalar(n * n) - x.adjoint() * x).with_sections(x.section_sizes());
}

namespace detail {

inline std::vector<Probe<AlgebraElement>> model_gallery(const ModelPtr& model) {
    std::vector<Probe<AlgebraElement>> out;
    out.push_back({"identity", AlgebraElement::identity(model), ProbeKind::Gallery});
    const std::size_t d = model->fiber_dim();
    for (const auto& p : enum_prim(*model)) {
        double t;
        ComplexMatrix proj(d);
        if (const auto* ce = std::get_if<CompressedEval>(&p.label.kind())) {
            t = ce->t;
            const auto [b, e] = model->blocks.constraint_at(t)->blocks[ce->block];
            for (std::size_t i = b; i < e; ++i) proj(i, i) = 1.0;
        } else {
            t = p.label.as<EvalPoint>().t;
            proj = ComplexMatrix::identity(d);
        }
        const std::size_t idx = *model->base.index_of(t);
        std::vector<ComplexMatrix> vals(model->base.size(), ComplexMatrix(d));
        vals[idx] = proj;
        out.push_back({"bump@" + p.label.label(), AlgebraElement(model, std::move(vals)), ProbeKind::Bump});
    }
    return out;
}

inline std::vector<Probe<ToeplitzElement>> model_gallery(const ToeplitzModelPtr&) {
    ComplexMatrix e00(1);
    e00(0, 0) = 1.0;
    return {{"identity", ToeplitzElement::scalar(1.0), ProbeKind::Gallery},
            {"shift", ToeplitzElement::shift(), ProbeKind::Gallery},
            {"E00", ToeplitzElement::compact(e00), ProbeKind::Gallery},
            {"2cos", ToeplitzElement::from_symbol({{-1, 1.0}, {1, 1.0}}), ProbeKind::Gallery}};
}

}  // namespace detail

/// Gallery of the family's model, then the user elements, then
/// b = ‖a‖² − a*a for each user element.
template <typename E>
std::vector<Probe<E>> probe_gallery(const RepFamily& f, const std::vector<std::pair<std::string, E>>& user) {
    std::vector<Probe<E>> out;
    if constexpr (std::is_same_v<E, AlgebraElement>) out = detail::model_gallery(f.algebra_model());
    else out = detail::model_gallery(f.toeplitz_model());
    for (const auto& [name, a] : user) {
        detail::check_compatible(f, a);
        out.push_back({name, a, ProbeKind::User});
    }
    for (const auto& [name, a] : user) out.push_back({"b(" + name + ")", invertibility_probe(a), ProbeKind::Derived});
    return out;
}

// ---------------------------------------------------------------------------
// Classification

struct FullResult {
    bool full = false;
    std::optional<std::string> witness;  // first uncovered primitive ideal
    std::vector<std::string> prims;      // enum_prim labels
    std::vector<long> covered_by;        // member index covering each prim, −1 if none
};

/// True iff the supports of the members cover every sampled primitive ideal.
inline FullResult check_full(const RepFamily& f) {
    FullResult r;
    const auto prims = enum_prim(f.model());
    std::vector<std::vector<Representation>> supports;
    supports.reserve(f.size());
    for (const auto& phi : f.members()) supports.push_back(support(phi, f.model()));
    for (const auto& p : prims) {
        long by = -1;
        for (std::size_t m = 0; m < supports.size() && by < 0; ++m)
            for (const auto& s : supports[m])
                if (detail::same_point(s, p.label)) {
                    by = long(m);
                    break;
                }
        r.prims.push_back(p.label.label());
        r.covered_by.push_back(by);
        if (by < 0 && !r.witness) r.witness = p.label.label();
    }
    r.full = !r.witness;
    return r;
}

struct ProbeAttainment {
    std::string probe;
    ProbeKind kind;
    double norm;        // reference norm of the probe
    double error;       // its certified error bar
    double family_max;  // max over members of ‖φ(probe)‖
    long argmax;        // member attaining family_max
};

struct ExhaustingResult {
    bool exhausting = false;
    std::optional<std::string> witness;  // first probe whose norm is not attained
    double witness_gap = 0.0;            // norm − family_max for the witness
    std::vector<ProbeAttainment> attainment;
};

namespace detail {

template <typename E>
std::vector<ProbeAttainment> attainment(const RepFamily& f, const std::vector<Probe<E>>& probes) {
    for (const auto& p : probes) check_compatible(f, p.element);
    return parallel_map(probes.size(), [&](std::size_t i) {
        const auto& p = probes[i];
        const auto ref = reference_norm(p.element);
        ProbeAttainment a{p.name, p.kind, ref.value, ref.error, 0.0, -1};
        for (std::size_t m = 0; m < f.size(); ++m) {
            const auto& phi = f.members()[m];
            // π is computed exactly like the reference norm.
            const double n = phi.is<ToeplitzIdentity>() ? ref.value : rep_norm(phi, p.element);
            if (a.argmax < 0 || n > a.family_max) {
                a.family_max = n;
                a.argmax = long(m);
            }
        }
        return a;
    });
}

inline double attain_slack(double norm, const FamilyOptions& opt) { return opt.attain_tol * std::max(1.0, norm); }

}  // namespace detail

/// True iff every probe's norm is attained as a maximum over the members.
/// Error bars are reported but do not excuse a norm that is only approached.
template <typename E>
ExhaustingResult check_exhausting(const RepFamily& f, const std::vector<Probe<E>>& probes, const FamilyOptions& opt = {}) {
    if (probes.empty()) throw InvalidArgument("check_exhausting needs at least one probe");
    ExhaustingResult r;
    r.attainment = detail::attainment(f, probes);
    for (const auto& a : r.attainment) {
        const double gap = a.norm - a.family_max;
        if (gap > detail::attain_slack(a.norm, opt) && !r.witness) {
            r.witness = a.probe;
            r.witness_gap = gap;
        }
    }
    r.exhausting = !r.witness;
    return r;
}

struct FaithfulResult {
    bool faithful = false;
    std::optional<std::string> witness;  // annihilated probe or uncovered primitive ideal
    double density_gap = 0.0;            // farthest distance from an uncovered prim to a covered one
    double resolution = 0.0;             // sampling resolution of the primitive spectrum
};

/// True iff no nonzero probe (bumps excepted) is annihilated by every member
/// and the union of supports is dense in the primitive spectrum at sampling
/// resolution. Bumps are grid-local, so their annihilation by a dense
/// family is a sampling artifact rather than a kernel element.
template <typename E>
FaithfulResult check_faithful(const RepFamily& f, const std::vector<Probe<E>>& probes, const FamilyOptions& opt = {}) {
    FaithfulResult r;
    r.resolution = prim_resolution(f.model());
    const auto att = detail::attainment(f, probes);
    for (const auto& a : att) {
        if (a.kind == ProbeKind::Bump) continue;
        const double tau = detail::attain_slack(a.norm, opt);
        if (a.norm > 2.0 * tau && a.family_max <= tau) {
            r.witness = a.probe;
            break;
        }
    }
    const auto cov = check_full(f);
    const auto prims = enum_prim(f.model());
    std::optional<std::string> far;
    for (std::size_t i = 0; i < prims.size(); ++i) {
        if (cov.covered_by[i] >= 0) continue;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < prims.size(); ++j)
            if (cov.covered_by[j] >= 0) best = std::min(best, prim_distance(f.model(), prims[i].label, prims[j].label));
        if (!far || best > r.density_gap) {
            far = prims[i].label.label();
            r.density_gap = best;
        }
    }
    const bool dense = r.density_gap <= r.resolution + BaseSpace::kMatchTol;
    if (!r.witness && !dense) r.witness = "uncovered region near " + *far;
    r.faithful = !r.witness;
    return r;
}

struct FamilyReport {
    std::string label;
    std::string model;
    std::size_t members = 0;
    FullResult full;
    ExhaustingResult exhausting;
    FaithfulResult faithful;
    std::size_t probes_used = 0;
    FamilyOptions options;
};

template <typename E>
FamilyReport family_report(const RepFamily& f, const std::vector<std::pair<std::string, E>>& user = {},
                           const FamilyOptions& opt = {}) {
    const auto probes = probe_gallery(f, user);
    FamilyReport r;
    r.label = f.label();
    r.model = detail::model_name(f.model());
    r.members = f.size();
    r.full = check_full(f);
    r.exhausting = check_exhausting(f, probes, opt);
    r.faithful = check_faithful(f, probes, opt);
    r.probes_used = probes.size();
    r.options = opt;
    return r;
}

inline FamilyReport family_report(const RepFamily& f, const FamilyOptions& opt = {}) {
    if (f.is_toeplitz()) return family_report<ToeplitzElement>(f, {}, opt);
    return family_report<AlgebraElement>(f, {}, opt);
}

// ---------------------------------------------------------------------------
// Invertibility

struct MemberInvertibility {
    bool invertible = false;
    double threshold = 0.0;         // σ_min must exceed this
    double min_sigma = 0.0;         // smallest σ_min over members
    long weakest = -1;              // member attaining min_sigma
    double max_inverse_norm = 0.0;  // 1 / min_sigma (inf when singular)
};

/// Every member image invertible beyond `threshold`. On its own this says
/// nothing about a unless the family is exhausting; see the two callers.
inline MemberInvertibility members_invertible(const RepFamily& f, const AlgebraElement& a, double threshold) {
    detail::check_compatible(f, a);
    const auto sig = parallel_map(f.size(), [&](std::size_t i) {
        return min_singular_value(rep_apply(f.members()[i], a));
    });
    MemberInvertibility r;
    r.threshold = threshold;
    r.min_sigma = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sig.size(); ++i)
        if (sig[i] < r.min_sigma) {
            r.min_sigma = sig[i];
            r.weakest = long(i);
        }
    r.max_inverse_norm = r.min_sigma > 0.0 ? 1.0 / r.min_sigma : std::numeric_limits<double>::infinity();
    r.invertible = r.min_sigma > threshold;
    return r;
}

/// Invertibility of a from its member images, sound when the family attains
/// ‖b‖ for b = ‖a‖² − a*a. Attainment is only certified up to the slack τ,
/// and ‖a‖² − max_φ‖φ(b)‖ = min_φ σ_min(φ(a))², so member singular values
/// at or below √τ count as zero.
inline MemberInvertibility invertible_via_exhausting(const RepFamily& f, const AlgebraElement& a,
                                                     const FamilyOptions& opt = {}) {
    detail::check_compatible(f, a);
    std::vector<Probe<AlgebraElement>> probes{{"b", invertibility_probe(a), ProbeKind::Derived}};
    const auto cert = check_exhausting(f, probes, opt);
    if (!cert.exhausting)
        throw NotCertified("family '" + f.label() + "' does not attain the norm of b = |a|^2 - a*a (gap " +
                           std::to_string(cert.witness_gap) + ")");
    const double tau = detail::attain_slack(cert.attainment.front().norm, opt);
    return members_invertible(f, a, std::max(opt.resolution, std::sqrt(tau)));
}

inline MemberInvertibility invertible_via_exhausting(const RepFamily& f, const ToeplitzElement&, const FamilyOptions& = {}) {
    throw UnsupportedModel("invertibility of Toeplitz elements from finite sections is not certified; family '" +
                           f.label() + "': use fredholm_via_family on the characters");
}

/// Invertibility with a uniform inverse bound: every member image invertible
/// with ‖φ(a)⁻¹‖ ≤ bound. Needs a faithful family.
inline MemberInvertibility invertible_via_faithful(const RepFamily& f, const AlgebraElement& a, double bound,
                                                   const FamilyOptions& opt = {}) {
    if (!(bound > 0.0)) throw InvalidArgument("inverse bound must be positive");
    const auto cert = check_faithful(f, probe_gallery<AlgebraElement>(f, {{"a", a}}), opt);
    if (!cert.faithful) throw NotCertified("family '" + f.label() + "' is not faithful: " + *cert.witness);
    auto r = members_invertible(f, a, opt.resolution);
    r.invertible = r.invertible && r.max_inverse_norm <= bound * (1.0 + opt.attain_tol);
    return r;
}

inline MemberInvertibility invertible_via_faithful(const RepFamily& f, const ToeplitzElement&, double,
                                                   const FamilyOptions& = {}) {
    throw UnsupportedModel("invertibility of Toeplitz elements from finite sections is not certified; family '" +
                           f.label() + "': use fredholm_via_family on the characters");
}

enum class Verdict { Invertible, NotInvertible, Undetermined };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Invertible: return "invertible";
        case Verdict::NotInvertible: return "not-invertible";
        case Verdict::Undetermined: return "undetermined";
    }
    return "?";
}

struct DirectInvertibility {
    Verdict verdict = Verdict::Undetermined;
    double min_sigma = 0.0;        // min over the grid of σ_min(a(t))
    double lipschitz_slack = 0.0;  // lipschitz_bound · grid_step / 2
};

/// Invertibility of a read off its values. σ_min is 1-Lipschitz in the
/// matrix, so over the whole base space σ_min ≥ min_grid − slack.
inline DirectInvertibility direct_invertibility(const AlgebraElement& a, const FamilyOptions& opt = {}) {
    DirectInvertibility r;
    r.min_sigma = std::numeric_limits<double>::infinity();
    for (const auto& v : a.values()) r.min_sigma = std::min(r.min_sigma, min_singular_value(v));
    r.lipschitz_slack = a.lipschitz_bound() * a.model()->base.grid_step() / 2.0;
    if (r.min_sigma <= opt.resolution) r.verdict = Verdict::NotInvertible;
    else if (r.min_sigma > std::max(opt.resolution, r.lipschitz_slack)) r.verdict = Verdict::Invertible;
    return r;
}

// ---------------------------------------------------------------------------
// Spectra

enum class SpectralContract {
    Equal,    // family exhausting on the probes: the union is the spectrum
    Closure,  // family faithful only: the union is dense in the spectrum
    None,     // neither certified
};

inline const char* to_string(SpectralContract c) {
    switch (c) {
        case SpectralContract::Equal: return "equal";
        case SpectralContract::Closure: return "closure";
        case SpectralContract::None: return "none";
    }
    return "?";
}

struct SpectrumUnion {
    SpectrumSet spectrum;
    SpectralContract contract = SpectralContract::None;
};

/// ∪_φ Spec(φ(a)) for normal a, with the contract the family certifies.
/// For π on the Toeplitz model the largest section is used and the result
/// is marked truncated.
template <typename E>
SpectrumUnion spectrum_union(const RepFamily& f, const E& a, const FamilyOptions& opt = {}) {
    detail::check_compatible(f, a);
    const auto parts = parallel_map(f.size(), [&](std::size_t i) {
        const auto& phi = f.members()[i];
        const auto img = detail::member_image(phi, a);
        if (normality_defect(img) > opt.resolution)
            throw NotNormal(phi.label() + "(a) is not normal" +
                            (phi.is<ToeplitzIdentity>() ? " (finite sections are normal only for self-adjoint x)" : ""));
        return eig_normal(img, opt.resolution);
    });
    std::vector<Complex> pts;
    bool truncated = false;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        pts.insert(pts.end(), parts[i].points().begin(), parts[i].points().end());
        truncated = truncated || f.members()[i].is<ToeplitzIdentity>();
    }
    SpectrumUnion r{SpectrumSet(std::move(pts), opt.resolution, truncated), SpectralContract::None};
    const auto probes = probe_gallery<E>(f, {{"a", a}});
    if (check_exhausting(f, probes, opt).exhausting) r.contract = SpectralContract::Equal;
    else if (check_faithful(f, probes, opt).faithful) r.contract = SpectralContract::Closure;
    return r;
}

struct FredholmResult {
    bool fredholm = false;
    bool decided = false;       // false when the sampled minimum sits inside the Lipschitz slack
    double min_symbol = 0.0;    // min over members of |σ(θ)|
    double inverse_bound = 0.0; // 1 / min_symbol
    double lipschitz = 0.0;     // Lipschitz constant of σ
    double angular_gap = 0.0;   // largest gap between member angles
};

/// Fredholmness through the quotient family of characters: x is Fredholm
/// iff its symbol is invertible in C(S¹), certified on the sampled angles
/// by min|σ| − lipschitz·gap/2 > resolution.
inline FredholmResult fredholm_via_family(const RepFamily& quot, const ToeplitzElement& x, const FamilyOptions& opt = {}) {
    (void)quot.toeplitz_model();
    std::vector<double> thetas;
    for (const auto& phi : quot.members()) {
        if (!phi.is<ToeplitzCharacter>())
            throw UnsupportedModel("quotient family '" + quot.label() + "' must consist of characters, found " +
                                   phi.label());
        double th = std::fmod(phi.as<ToeplitzCharacter>().theta, 2.0 * std::numbers::pi);
        if (th < 0) th += 2.0 * std::numbers::pi;
        thetas.push_back(th);
    }
    std::sort(thetas.begin(), thetas.end());
    FredholmResult r;
    r.angular_gap = 2.0 * std::numbers::pi - thetas.back() + thetas.front();
    for (std::size_t i = 1; i < thetas.size(); ++i) r.angular_gap = std::max(r.angular_gap, thetas[i] - thetas[i - 1]);
    r.min_symbol = std::numeric_limits<double>::infinity();
    for (double th : thetas) r.min_symbol = std::min(r.min_symbol, std::abs(x.symbol(th)));
    r.inverse_bound = r.min_symbol > 0.0 ? 1.0 / r.min_symbol : std::numeric_limits<double>::infinity();
    r.lipschitz = x.symbol_lipschitz();
    const double lower = r.min_symbol - r.lipschitz * r.angular_gap / 2.0;
    if (r.min_symbol <= opt.resolution) {
        r.decided = true;
    } else if (lower > opt.resolution) {
        r.decided = true;
        r.fredholm = true;
    }
    return r;
}

inline FredholmResult fredholm_via_family(const RepFamily& quot, const AlgebraElement&, const FamilyOptions& = {}) {
    throw UnsupportedModel("model of family '" + quot.label() + "' exposes no quotient family");
}

}  // namespace repfam
