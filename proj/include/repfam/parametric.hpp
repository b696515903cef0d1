#pragma once

// Translation-invariant operators on M × Rⁿ and their fibers T̂(λ).
//
// M is a Fourier-truncated circle (modes k ∈ [−K, K], −Δ_M = diag(k²)) or a
// finite graph (−Δ_M = graph Laplacian L). The full symbol is a polynomial
// p(ξ, λ) = Σ c·ξᵃ·λᵝ; on the circle ξ acts as the mode number k, on a graph
// ξᵃ acts as L^{a/2} and a must be even.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "repfam/affiliated.hpp"
#include "repfam/error.hpp"
#include "repfam/lambda_grid.hpp"
#include "repfam/linalg.hpp"
#include "repfam/matrix.hpp"
#include "repfam/parallel.hpp"
#include "repfam/spectral.hpp"
#include "repfam/spectrum_set.hpp"

namespace repfam {

struct CircleFourier {
    int K = 8;
};

struct GraphLaplacian {
    std::vector<std::vector<double>> adjacency;  // symmetric, nonnegative
};

using BaseManifold = std::variant<CircleFourier, GraphLaplacian>;

/// c·ξ^xi_power·Π λ_j^lambda_powers[j].
struct Monomial {
    int xi_power = 0;
    std::vector<int> lambda_powers;
    Complex coeff = 1.0;

    int degree() const {
        int d = xi_power;
        for (int p : lambda_powers) d += p;
        return d;
    }
};

/// Lower-order multiplication term c·λᵝ·e^{i·shift·x}: couples mode k to
/// mode k + shift. Circle base only.
struct ModeCoupling {
    int shift = 0;
    Complex coeff = 0.0;
    std::vector<int> lambda_powers;

    int degree() const {
        int d = 0;
        for (int p : lambda_powers) d += p;
        return d;
    }
};

namespace detail {

inline Complex lambda_power(const std::vector<int>& powers, const std::vector<double>& lambda) {
    Complex r = 1.0;
    for (std::size_t j = 0; j < powers.size(); ++j) r *= std::pow(lambda[j], powers[j]);
    return r;
}

inline ComplexMatrix graph_laplacian(const std::vector<std::vector<double>>& adj) {
    const std::size_t n = adj.size();
    ComplexMatrix L(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (adj[i].size() != n) throw InvalidArgument("graph adjacency must be square");
        for (std::size_t j = 0; j < n; ++j) {
            if (adj[i][j] < 0.0 || adj[i][j] != adj[j][i])
                throw InvalidArgument("graph adjacency must be symmetric and nonnegative");
            if (i != j) {
                L(i, j) -= adj[i][j];
                L(i, i) += adj[i][j];
            }
        }
    }
    return L;
}

inline ComplexMatrix matrix_power(const ComplexMatrix& a, int p) {
    ComplexMatrix r = ComplexMatrix::identity(a.dim());
    for (int i = 0; i < p; ++i) r = r * a;
    return r;
}

}  // namespace detail

class InvariantOperator {
  public:
    /// Order m is the joint top degree of the nonzero symbol monomials.
    /// Sobolev source index s defaults to m. Couplings must be of degree < m.
    InvariantOperator(BaseManifold base, std::size_t n, std::vector<Monomial> symbol,
                      std::vector<ModeCoupling> couplings = {}, std::optional<double> sobolev_s = std::nullopt,
                      std::string label = "P")
        : base_(std::move(base)), n_(n), couplings_(std::move(couplings)), label_(std::move(label)) {
        if (n_ == 0) throw InvalidArgument("parametric operator needs n >= 1");
        for (auto& mono : symbol) {
            if (mono.lambda_powers.empty()) mono.lambda_powers.assign(n_, 0);
            if (mono.lambda_powers.size() != n_) throw InvalidArgument("monomial lambda multi-index has wrong length");
            if (mono.xi_power < 0 || std::any_of(mono.lambda_powers.begin(), mono.lambda_powers.end(),
                                                 [](int p) { return p < 0; }))
                throw InvalidArgument("monomial powers must be nonnegative");
            if (is_graph() && mono.xi_power % 2 != 0)
                throw InvalidArgument("graph base admits only even powers of xi");
            if (mono.coeff != 0.0) symbol_.push_back(mono);
        }
        if (symbol_.empty()) throw InvalidArgument("symbol must have a nonzero monomial");
        order_ = 0;
        for (const auto& mono : symbol_) order_ = std::max(order_, mono.degree());
        for (auto& c : couplings_) {
            if (c.lambda_powers.empty()) c.lambda_powers.assign(n_, 0);
            if (c.lambda_powers.size() != n_) throw InvalidArgument("coupling lambda multi-index has wrong length");
            if (is_graph()) throw InvalidArgument("mode couplings need a circle base");
            if (c.degree() >= order_) throw InvalidArgument("mode couplings must be of lower order than the symbol");
        }
        if (is_graph()) laplacian_ = detail::graph_laplacian(std::get<GraphLaplacian>(base_).adjacency);
        if (!is_graph() && std::get<CircleFourier>(base_).K < 0) throw InvalidArgument("mode cutoff must be >= 0");
        sobolev_s_ = sobolev_s.value_or(double(order_));
    }

    const BaseManifold& base() const noexcept { return base_; }
    bool is_graph() const noexcept { return std::holds_alternative<GraphLaplacian>(base_); }
    std::size_t n() const noexcept { return n_; }
    int order() const noexcept { return order_; }
    double sobolev_s() const noexcept { return sobolev_s_; }
    const std::vector<Monomial>& symbol() const noexcept { return symbol_; }
    const std::vector<ModeCoupling>& couplings() const noexcept { return couplings_; }
    const std::string& label() const noexcept { return label_; }

    /// Dimension of the truncated M-basis.
    std::size_t basis_dim() const {
        return is_graph() ? laplacian_.dim() : std::size_t(2 * std::get<CircleFourier>(base_).K + 1);
    }

    /// −Δ_M on the truncated basis.
    ComplexMatrix minus_laplacian() const {
        if (is_graph()) return laplacian_;
        const int K = std::get<CircleFourier>(base_).K;
        std::vector<Complex> d;
        for (int k = -K; k <= K; ++k) d.emplace_back(double(k) * k);
        return ComplexMatrix::diagonal(d);
    }

    /// Real symbol and Hermitian-paired couplings.
    bool formally_self_adjoint() const {
        for (const auto& mono : symbol_)
            if (mono.coeff.imag() != 0.0) return false;
        for (const auto& c : couplings_) {
            Complex partner = 0.0, self = 0.0;
            for (const auto& d : couplings_) {
                if (d.lambda_powers != c.lambda_powers) continue;
                if (d.shift == -c.shift) partner += d.coeff;
                if (d.shift == c.shift) self += d.coeff;
            }
            if (std::abs(partner - std::conj(self)) > 1e-14 * std::max(1.0, std::abs(self))) return false;
        }
        return true;
    }

    /// Full symbol p(ξ, λ).
    Complex symbol_at(double xi, const std::vector<double>& lambda) const {
        Complex s = 0.0;
        for (const auto& mono : symbol_)
            s += mono.coeff * std::pow(xi, mono.xi_power) * detail::lambda_power(mono.lambda_powers, lambda);
        return s;
    }

    /// σ_m(ξ, λ): the degree-m part of the symbol.
    Complex principal_symbol(double xi, const std::vector<double>& lambda) const {
        Complex s = 0.0;
        for (const auto& mono : symbol_)
            if (mono.degree() == order_)
                s += mono.coeff * std::pow(xi, mono.xi_power) * detail::lambda_power(mono.lambda_powers, lambda);
        return s;
    }

    void require_lambda(const std::vector<double>& lambda) const {
        if (lambda.size() != n_) throw InvalidArgument("lambda has dimension " + std::to_string(lambda.size()) +
                                                       ", operator expects " + std::to_string(n_));
        for (double x : lambda)
            if (!std::isfinite(x)) throw InvalidArgument("lambda must be finite");
    }

  private:
    BaseManifold base_;
    std::size_t n_;
    std::vector<Monomial> symbol_;
    std::vector<ModeCoupling> couplings_;
    std::string label_;
    int order_ = 0;
    double sobolev_s_ = 0.0;
    ComplexMatrix laplacian_;
};

/// T̂(λ) on the truncated M-basis.
inline ComplexMatrix fiber(const InvariantOperator& T, const std::vector<double>& lambda) {
    T.require_lambda(lambda);
    if (T.is_graph()) {
        const ComplexMatrix L = T.minus_laplacian();
        ComplexMatrix r(L.dim());
        for (const auto& mono : T.symbol())
            r += detail::matrix_power(L, mono.xi_power / 2) * (mono.coeff * detail::lambda_power(mono.lambda_powers, lambda));
        return r;
    }
    const int K = std::get<CircleFourier>(T.base()).K;
    const std::size_t dim = T.basis_dim();
    ComplexMatrix r(dim);
    for (int k = -K; k <= K; ++k) r(std::size_t(k + K), std::size_t(k + K)) = T.symbol_at(double(k), lambda);
    for (const auto& c : T.couplings()) {
        if (std::abs(c.shift) > 2 * K)
            throw CutoffTooSmall("coupling shift " + std::to_string(c.shift) + " exceeds mode window K = " +
                                 std::to_string(K));
        const Complex w = c.coeff * detail::lambda_power(c.lambda_powers, lambda);
        for (int k = -K; k <= K; ++k) {
            const int to = k + c.shift;
            if (to < -K || to > K) continue;
            r(std::size_t(to + K), std::size_t(k + K)) += w;
        }
    }
    return r;
}

/// Unit directions (ξ, λ) ∈ S^n, sampled as (cos θ, sin θ·u) over 360 angles
/// θ and a fixed set of λ-directions u, keeping |sin θ| ≥ δ_dir.
class PrincipalSymbolField {
  public:
    static constexpr int kAngles = 360;

    PrincipalSymbolField(const InvariantOperator& T, double delta_dir) : T_(&T), delta_dir_(delta_dir) {
        if (!(delta_dir >= 0.0) || delta_dir >= 1.0) throw InvalidArgument("delta_dir must lie in [0, 1)");
        const std::size_t n = T.n();
        std::vector<std::vector<double>> us;
        if (n == 1) {
            us.push_back({1.0});
        } else {
            // normalized nonzero vectors of {−1,0,1}ⁿ with first nonzero entry positive
            std::size_t total = 1;
            for (std::size_t d = 0; d < n; ++d) total *= 3;
            for (std::size_t c = 0; c < total; ++c) {
                std::vector<double> u(n);
                std::size_t code = c;
                for (std::size_t d = 0; d < n; ++d, code /= 3) u[d] = double(int(code % 3) - 1);
                const auto first = std::find_if(u.begin(), u.end(), [](double x) { return x != 0.0; });
                if (first == u.end() || *first < 0.0) continue;
                const double norm = std::sqrt(LambdaGrid::norm2(u));
                for (double& x : u) x /= norm;
                us.push_back(std::move(u));
            }
        }
        for (int j = 0; j < kAngles; ++j) {
            const double theta = 2.0 * std::numbers::pi * j / kAngles;
            double c = std::cos(theta), s = std::sin(theta);
            // exact axes at multiples of 90°
            if (std::abs(c) < 1e-15) c = 0.0;
            if (std::abs(s) < 1e-15) s = 0.0;
            if (std::abs(s) < delta_dir) continue;
            for (const auto& u : us) {
                std::vector<double> dir{c};
                for (double x : u) dir.push_back(s * x);
                directions_.push_back(std::move(dir));
            }
        }
    }

    double delta_dir() const noexcept { return delta_dir_; }
    /// Each direction is (ξ, λ₁, …, λₙ).
    const std::vector<std::vector<double>>& directions() const noexcept { return directions_; }

    Complex operator()(const std::vector<double>& dir) const {
        return T_->principal_symbol(dir[0], std::vector<double>(dir.begin() + 1, dir.end()));
    }

    /// max |σ_m(t·v) − tᵐσ_m(v)| / max(1, |tᵐσ_m(v)|) over the samples.
    double homogeneity_defect(double t = 2.0) const {
        double worst = 0.0;
        const double tm = std::pow(t, T_->order());
        for (const auto& d : directions_) {
            std::vector<double> scaled = d;
            for (double& x : scaled) x *= t;
            const Complex expect = tm * (*this)(d);
            worst = std::max(worst, std::abs((*this)(scaled) - expect) / std::max(1.0, std::abs(expect)));
        }
        return worst;
    }

  private:
    const InvariantOperator* T_;
    double delta_dir_;
    std::vector<std::vector<double>> directions_;
};

/// Throws NotElliptic when |σ_m| ≤ threshold on a sampled direction of the
/// whole sphere.
inline void require_elliptic(const InvariantOperator& T, double threshold) {
    PrincipalSymbolField field(T, 0.0);
    for (const auto& d : field.directions()) {
        if (std::abs(field(d)) <= threshold)
            throw NotElliptic("principal symbol of '" + T.label() + "' vanishes at direction " + LambdaGrid::format(d));
    }
}

/// Fibers at every grid node, in node order.
inline std::vector<ComplexMatrix> fibers_on(const InvariantOperator& T, const LambdaGrid& grid) {
    if (grid.dim() != T.n()) throw InvalidArgument("lambda grid dimension does not match the operator");
    return parallel_map(grid.size(), [&](std::size_t i) { return fiber(T, grid.nodes()[i]); });
}

/// Fibered observable λ ↦ T̂(λ).
inline Observable parametric_observable(const InvariantOperator& T, const LambdaGrid& grid) {
    if (!T.formally_self_adjoint()) throw NotSelfAdjoint("operator '" + T.label() + "' is not formally self-adjoint");
    return Observable::fibered(grid, fibers_on(T, grid), T.label());
}

/// ∪_λ Spec T̂(λ) over the grid nodes. Always truncated.
inline SpectrumSet spectrum_parametric(const InvariantOperator& T, const LambdaGrid& grid,
                                       double resolution = kDefaultTol) {
    if (!T.formally_self_adjoint()) throw NotSelfAdjoint("operator '" + T.label() + "' is not formally self-adjoint");
    require_elliptic(T, resolution);
    const auto obs = parametric_observable(T, grid);
    return spec_union_observable(ObservableFamily{T.label(), {obs}, SpectralContract::Closure}, resolution).spectrum;
}

/// P₁ = (1 − Δ)^{(s−m)/2} P (1 − Δ)^{−s/2}, realised fiberwise with
/// (1 − Δ)̂(λ) = 1 + |λ|² − Δ_M.
class ReducedOperator {
  public:
    explicit ReducedOperator(InvariantOperator P) : P_(std::move(P)) {}

    const InvariantOperator& source() const noexcept { return P_; }
    int order() const noexcept { return 0; }

    ComplexMatrix fiber(const std::vector<double>& lambda) const {
        const ComplexMatrix p = repfam::fiber(P_, lambda);
        const double s = P_.sobolev_s(), m = double(P_.order());
        const ComplexMatrix D = ComplexMatrix::identity(P_.basis_dim()) * Complex(1.0 + LambdaGrid::norm2(lambda)) +
                                P_.minus_laplacian();
        if (!P_.is_graph()) {
            // diagonal: scale entries directly
            ComplexMatrix r = p;
            for (std::size_t i = 0; i < r.dim(); ++i)
                for (std::size_t j = 0; j < r.dim(); ++j)
                    r(i, j) *= std::pow(D(i, i).real(), (s - m) / 2) * std::pow(D(j, j).real(), -s / 2);
            return r;
        }
        const auto left = func_calc(D, [&](double x) { return std::pow(x, (s - m) / 2); });
        const auto right = func_calc(D, [&](double x) { return std::pow(x, -s / 2); });
        return left * p * right;
    }

  private:
    InvariantOperator P_;
};

inline ReducedOperator order_reduction(const InvariantOperator& P) { return ReducedOperator(P); }

struct ParametricInvertibility {
    bool invertible = false;
    bool fibers_invertible = true;
    bool symbol_nonvanishing = true;
    double min_fiber_sigma = std::numeric_limits<double>::infinity();  // over reduced fibers
    std::vector<double> weakest_fiber;                                 // node realising min_fiber_sigma
    std::optional<std::vector<double>> failing_fiber;
    double min_symbol = std::numeric_limits<double>::infinity();  // min |σ_m| over sampled directions
    std::optional<std::vector<double>> failing_direction;         // (ξ, λ…)
    double delta_dir = 0.0;
    double delta_sym = 0.0;
    std::size_t directions_sampled = 0;
    std::size_t fibers_sampled = 0;
};

/// (a) every reduced fiber has σ_min > resolution and (b) |σ_m| ≥ δ_sym on
/// every sampled direction with |λ-component| ≥ δ_dir. The failing fiber is
/// the one with the smallest σ_min; the failing direction is the first
/// sampled direction of smallest |σ_m|.
inline ParametricInvertibility invertible_parametric(const InvariantOperator& T, const LambdaGrid& grid,
                                                     double delta_dir = 0.1, double delta_sym = 1e-6,
                                                     double resolution = kDefaultTol) {
    if (!(delta_dir > 0.0) || delta_dir >= 1.0) throw InvalidArgument("delta_dir must lie in (0, 1)");
    if (!(delta_sym > 0.0)) throw InvalidArgument("delta_sym must be positive");
    if (grid.dim() != T.n()) throw InvalidArgument("lambda grid dimension does not match the operator");
    ParametricInvertibility r;
    r.delta_dir = delta_dir;
    r.delta_sym = delta_sym;
    r.fibers_sampled = grid.size();

    const auto reduced = order_reduction(T);
    const auto sigmas =
        parallel_map(grid.size(), [&](std::size_t i) { return min_singular_value(reduced.fiber(grid.nodes()[i])); });
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
        if (sigmas[i] < r.min_fiber_sigma) {
            r.min_fiber_sigma = sigmas[i];
            r.weakest_fiber = grid.nodes()[i];
        }
    }
    if (!(r.min_fiber_sigma > resolution)) {
        r.fibers_invertible = false;
        r.failing_fiber = r.weakest_fiber;
    }

    PrincipalSymbolField field(T, delta_dir);
    r.directions_sampled = field.directions().size();
    const std::vector<double>* weakest = nullptr;
    for (const auto& d : field.directions()) {
        const double v = std::abs(field(d));
        if (v < r.min_symbol) {
            r.min_symbol = v;
            weakest = &d;
        }
    }
    if (weakest && r.min_symbol < delta_sym) {
        r.symbol_nonvanishing = false;
        r.failing_direction = *weakest;
    }
    r.invertible = r.fibers_invertible && r.symbol_nonvanishing;
    return r;
}

struct SymbolRestriction {
    bool consistent = false;
    double ratio_gap = 0.0;   // max over ±K of |r(λ₁) − r(λ₂)|
    double allowed = 0.0;     // O(1/K) bound the gap must respect
    Complex sigma_on_SM = 0.0;  // σ_m(1, 0)
};

/// Checks that the top-order diagonal growth of T̂(λ) in k does not depend on
/// λ: r(k, λ) = T̂(λ)_{kk} / (σ_m(1, 0)·|k|ᵐ) at k = ±K must agree for λ₁ and
/// λ₂ up to the lower-order bound Σ_{lower} |c|·(|λ₁|^β + |λ₂|^β) / (|σ_m(1,0)|·K).
/// A principal symbol vanishing on S*M (top order sitting in λ) fails.
inline SymbolRestriction symbol_restriction_check(const InvariantOperator& T, const std::vector<double>& lambda1,
                                                  const std::vector<double>& lambda2) {
    if (T.is_graph()) throw UnsupportedModel("symbol restriction check needs a circle base");
    const int K = std::get<CircleFourier>(T.base()).K;
    if (K < 1) throw CutoffTooSmall("symbol restriction check needs K >= 1");
    T.require_lambda(lambda1);
    T.require_lambda(lambda2);
    SymbolRestriction r;
    std::vector<double> origin(T.n(), 0.0);
    r.sigma_on_SM = T.principal_symbol(1.0, origin);
    const double scale = std::abs(r.sigma_on_SM);
    if (scale <= kDefaultTol) {
        r.ratio_gap = std::numeric_limits<double>::infinity();
        return r;
    }
    auto mag = [](const std::vector<int>& p, const std::vector<double>& l) {
        return std::abs(detail::lambda_power(p, l));
    };
    double lower = 0.0;
    for (const auto& mono : T.symbol()) {
        if (mono.xi_power >= T.order()) continue;
        lower += std::abs(mono.coeff) * (mag(mono.lambda_powers, lambda1) + mag(mono.lambda_powers, lambda2));
    }
    for (const auto& c : T.couplings())
        if (c.shift == 0) lower += std::abs(c.coeff) * (mag(c.lambda_powers, lambda1) + mag(c.lambda_powers, lambda2));
    r.allowed = lower / (scale * K) + 1e-12;

    const auto f1 = fiber(T, lambda1);
    const auto f2 = fiber(T, lambda2);
    const double km = std::pow(double(K), T.order());
    for (std::size_t idx : {std::size_t(0), std::size_t(2 * K)}) {
        const Complex r1 = f1(idx, idx) / (r.sigma_on_SM * km);
        const Complex r2 = f2(idx, idx) / (r.sigma_on_SM * km);
        r.ratio_gap = std::max(r.ratio_gap, std::abs(r1 - r2));
    }
    r.consistent = r.ratio_gap <= r.allowed;
    return r;
}

namespace gallery {

/// c − Δ on S¹ × Rⁿ: p = c + ξ² + Σ λ_j².
inline InvariantOperator shifted_laplacian(double c, int K, std::size_t n = 1) {
    std::vector<Monomial> sym;
    if (c != 0.0) sym.push_back({0, std::vector<int>(n, 0), c});
    sym.push_back({2, std::vector<int>(n, 0), 1.0});
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<int> p(n, 0);
        p[j] = 2;
        sym.push_back({0, p, 1.0});
    }
    return InvariantOperator(CircleFourier{K}, n, std::move(sym), {}, std::nullopt,
                             c == 0.0 ? "-Delta" : std::to_string(c) + " - Delta");
}

}  // namespace gallery

}  // namespace repfam
