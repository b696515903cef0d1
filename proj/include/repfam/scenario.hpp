#pragma once

// Scenario files: a model, a family and a list of queries, read from YAML
// and answered with a deterministic JSON report.
//
//   repfam-scenario: 1
//   name: ...
//   model:      {gallery: <name>, ...parameters}
//   family:     {generator: <name>, ...}      (optional)
//   elements:   {name: payload, ...}          (optional)
//   operators:  {name: symbol table, ...}     (optional)
//   observables:{name: payload, ...}          (optional)
//   queries:    [{id, kind, ...}, ...]
//
// Reports carry no timing, so equal input gives byte-identical output.

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "repfam/affiliated.hpp"
#include "repfam/algebra/element.hpp"
#include "repfam/algebra/model.hpp"
#include "repfam/algebra/toeplitz.hpp"
#include "repfam/error.hpp"
#include "repfam/families.hpp"
#include "repfam/lambda_grid.hpp"
#include "repfam/parametric.hpp"
#include "repfam/spectrum_set.hpp"

namespace repfam::scenario {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kFormat = 1;

inline const std::vector<std::string>& query_kinds() {
    static const std::vector<std::string> k{"norm",     "invertible",          "fredholm",          "spectrum",
                                            "family-report", "parametric-spectrum", "observable-spectrum"};
    return k;
}

struct GalleryEntry {
    std::string name;
    std::string parameters;
    std::string summary;
};

inline const std::vector<GalleryEntry>& model_gallery() {
    static const std::vector<GalleryEntry> g{
        {"scalar-interval", "step, refine", "C([0,1]) with scalar values"},
        {"matrix-endpoint", "step, refine (default 24)", "M2-valued functions on [0,1], diagonal at t = 1"},
        {"interval", "step, dim, constraints, refine", "M_d-valued functions on [0,1] with block constraints"},
        {"discrete", "points, dim, constraints", "M_d-valued functions on a finite set"},
        {"circle", "step, dim", "M_d-valued functions on the circle"},
        {"toeplitz", "theta-samples", "Toeplitz algebra: symbol plus finite-rank correction"},
        {"circle-fourier", "K, n", "translation-invariant operators on S1 x R^n, modes |k| <= K"},
        {"graph", "adjacency, n", "translation-invariant operators on G x R^n for a finite graph G"},
    };
    return g;
}

inline const std::vector<GalleryEntry>& family_generators() {
    static const std::vector<GalleryEntry> g{
        {"all-prims", "", "one member per sampled primitive ideal"},
        {"ev-grid", "exclude-endpoint, keep-blocks", "evaluations at every grid point"},
        {"toeplitz-pi", "", "the identity representation of the Toeplitz model"},
        {"toeplitz-characters", "", "sampled characters of the symbol quotient"},
        {"lambda-grid", "window, step", "fibers of a parametric operator over a lambda grid"},
        {"members", "members", "explicit list: {ev: t}, {ev: t, block: b}, pi, {chi: theta}"},
    };
    return g;
}

namespace detail {

[[noreturn]] inline void fail(const YAML::Node& n, const std::string& what) {
    const auto m = n.Mark();
    throw ParseError(what, m.line + 1, m.column + 1);
}

inline void check_keys(const YAML::Node& n, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!n.IsMap()) fail(n, where + " must be a mapping");
    for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            fail(kv.first, "unknown key '" + key + "' in " + where);
    }
}

inline YAML::Node require(const YAML::Node& n, const char* key, const std::string& where) {
    const auto v = n[key];
    if (!v) fail(n, where + " needs '" + key + "'");
    return v;
}

/// A number, or a string "p/q".
inline double as_double(const YAML::Node& n) {
    if (!n.IsScalar()) fail(n, "expected a number");
    const auto s = n.Scalar();
    try {
        std::size_t used = 0;
        if (const auto slash = s.find('/'); slash != std::string::npos) {
            const double p = std::stod(s.substr(0, slash), &used);
            if (used != slash) throw std::invalid_argument(s);
            const auto rest = s.substr(slash + 1);
            const double q = std::stod(rest, &used);
            if (used != rest.size() || q == 0.0) throw std::invalid_argument(s);
            return p / q;
        }
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail(n, "expected a number, got '" + s + "'");
    }
}

inline long as_int(const YAML::Node& n) {
    const double v = as_double(n);
    if (v != std::floor(v) || std::abs(v) > 1e15) fail(n, "expected an integer");
    return long(v);
}

inline std::size_t as_count(const YAML::Node& n) {
    const long v = as_int(n);
    if (v < 0) fail(n, "expected a nonnegative integer");
    return std::size_t(v);
}

inline bool as_bool(const YAML::Node& n) {
    try {
        return n.as<bool>();
    } catch (const YAML::Exception&) {
        fail(n, "expected true or false");
    }
}

inline std::string as_string(const YAML::Node& n) {
    if (!n.IsScalar()) fail(n, "expected a string");
    return n.Scalar();
}

inline double get_double(const YAML::Node& n, const char* key, double fallback) {
    return n[key] ? as_double(n[key]) : fallback;
}

inline double positive(const YAML::Node& n, const char* key, double fallback) {
    const double v = get_double(n, key, fallback);
    if (!(v > 0.0)) fail(n[key] ? n[key] : n, std::string(key) + " must be positive");
    return v;
}

/// A number or [re, im].
inline Complex as_complex(const YAML::Node& n) {
    if (n.IsSequence()) {
        if (n.size() != 2) fail(n, "complex numbers are written [re, im]");
        return {as_double(n[0]), as_double(n[1])};
    }
    return as_double(n);
}

inline ComplexMatrix as_matrix(const YAML::Node& n) {
    if (!n.IsSequence() || n.size() == 0) fail(n, "expected a matrix (list of rows)");
    const std::size_t d = n.size();
    std::vector<Complex> e;
    for (const auto& row : n) {
        if (!row.IsSequence() || row.size() != d) fail(row, "matrix must be square");
        for (const auto& x : row) e.push_back(as_complex(x));
    }
    return ComplexMatrix(d, std::move(e));
}

inline std::vector<int> as_powers(const YAML::Node& n, std::size_t dim) {
    if (!n) return std::vector<int>(dim, 0);
    std::vector<int> p;
    if (n.IsSequence()) {
        for (const auto& x : n) p.push_back(int(as_int(x)));
    } else {
        p.push_back(int(as_int(n)));
    }
    if (p.size() != dim) fail(n, "lambda multi-index must have " + std::to_string(dim) + " entries");
    return p;
}

inline json num(double x) {
    if (x == 0.0) return 0.0;  // no negative zero in reports
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

inline json complex_json(Complex z) { return json::array({num(z.real()), num(z.imag())}); }

inline json spectrum_json(const SpectrumSet& s, bool include_points) {
    json j;
    j["count"] = s.size();
    j["resolution"] = s.resolution();
    j["truncated"] = s.truncated();
    if (!s.empty()) {
        j["min_real"] = num(s.min_real());
        j["max_real"] = num(s.max_real());
    }
    if (include_points) {
        json pts = json::array();
        for (const auto& p : s.points()) pts.push_back(complex_json(p));
        j["points"] = std::move(pts);
    }
    return j;
}

inline json optional_string(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

inline json lambda_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

}  // namespace detail

using Element = std::variant<AlgebraElement, ToeplitzElement>;

struct Query {
    std::string id;
    std::string kind;
    YAML::Node node;
    FamilyOptions tolerances;
};

/// A parsed scenario. Every structural problem is reported as ParseError
/// with the position of the offending node.
class Scenario {
  public:
    static Scenario from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot read scenario '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        return from_string(ss.str());
    }

    static Scenario from_string(const std::string& text) {
        YAML::Node root;
        try {
            root = YAML::Load(text);
        } catch (const YAML::ParserException& e) {
            throw ParseError(e.msg, e.mark.line + 1, e.mark.column + 1);
        }
        Scenario s;
        s.parse(root);
        return s;
    }

    const std::string& name() const noexcept { return name_; }
    const std::vector<Query>& queries() const noexcept { return queries_; }

    json model_json() const { return model_desc_; }
    json family_json() const { return family_desc_; }

    // ---- resolved objects -------------------------------------------------

    bool has_model() const noexcept { return algebra_ || toeplitz_ || manifold_; }
    const ModelPtr& algebra_model() const { return algebra_; }
    const ToeplitzModelPtr& toeplitz_model() const { return toeplitz_; }

    /// The representation family; defaults to all-prims of the model.
    const RepFamily& family(const Query& q) const {
        if (family_) return *family_;
        if (grid_) throw IncompatibleQuery("query '" + q.id + "' needs a representation family, scenario has a lambda grid");
        throw IncompatibleQuery("query '" + q.id + "' needs an algebra or Toeplitz model");
    }

    const LambdaGrid& grid(const Query& q) const {
        if (!grid_) throw IncompatibleQuery("query '" + q.id + "' needs a lambda-grid family");
        return *grid_;
    }

    const Element& element(const Query& q, const YAML::Node& ref) const {
        const auto name = detail::as_string(ref);
        const auto it = elements_.find(name);
        if (it == elements_.end()) throw IncompatibleQuery("query '" + q.id + "' names unknown element '" + name + "'");
        return it->second;
    }

    const InvariantOperator& op(const Query& q, const YAML::Node& ref) const {
        const auto name = detail::as_string(ref);
        const auto it = operators_.find(name);
        if (it == operators_.end()) throw IncompatibleQuery("query '" + q.id + "' names unknown operator '" + name + "'");
        return it->second;
    }

    Observable observable(const Query& q, const YAML::Node& ref) const {
        const auto name = detail::as_string(ref);
        const auto it = observables_.find(name);
        if (it == observables_.end())
            throw IncompatibleQuery("query '" + q.id + "' names unknown observable '" + name + "'");
        const YAML::Node& n = it->second;
        if (n["bounded"]) return Observable::bounded(detail::as_matrix(n["bounded"]), name);
        if (n["infinite"]) return Observable::infinite(name);
        if (n["element"]) {
            const auto& e = element(q, n["element"]);
            if (!std::holds_alternative<AlgebraElement>(e))
                throw IncompatibleQuery("observable '" + name + "' needs a function-algebra element");
            return Observable::bounded(std::get<AlgebraElement>(e), name);
        }
        const auto& T = op(q, n["fibered"]);
        if (!T.formally_self_adjoint()) throw NotSelfAdjoint("operator '" + T.label() + "' is not formally self-adjoint");
        return Observable::fibered(grid(q), fibers_on(T, grid(q)), name);
    }

  private:
    void parse(const YAML::Node& root) {
        using namespace detail;
        if (!root || !root.IsMap()) throw ParseError("scenario must be a mapping", 1, 1);
        check_keys(root, {"repfam-scenario", "name", "model", "family", "elements", "operators", "observables", "queries"},
                   "scenario");
        const auto tag = root["repfam-scenario"];
        if (!tag) throw ParseError("missing header 'repfam-scenario: 1'", 1, 1);
        if (as_int(tag) != kFormat) fail(tag, "unsupported scenario format " + tag.Scalar());
        name_ = root["name"] ? as_string(root["name"]) : "unnamed";
        if (root["model"]) parse_model(root["model"]);
        if (root["family"]) parse_family(root["family"]);
        else if (algebra_) family_.emplace(RepFamily::all_prims(algebra_));
        else if (toeplitz_) family_.emplace(RepFamily::all_prims(toeplitz_));
        if (family_) family_desc_ = json{{"label", family_->label()}, {"members", family_->size()}};
        if (root["elements"]) parse_elements(root["elements"]);
        if (root["operators"]) parse_operators(root["operators"]);
        if (root["observables"]) parse_observables(root["observables"]);
        const auto qs = root["queries"];
        if (qs && !qs.IsNull()) {
            if (!qs.IsSequence()) fail(qs, "queries must be a list");
            std::set<std::string> ids;
            for (const auto& q : qs) parse_query(q, ids);
        }
    }

    void parse_model(const YAML::Node& m) {
        using namespace detail;
        const auto gallery = as_string(require(m, "gallery", "model"));
        model_desc_ = json{{"gallery", gallery}};
        auto constraints = [&](std::size_t dim) {
            BlockStructure bs(dim);
            if (const auto cs = m["constraints"]) {
                if (!cs.IsSequence()) fail(cs, "constraints must be a list");
                for (const auto& c : cs) {
                    check_keys(c, {"at", "diagonal", "blocks"}, "constraint");
                    const double at = as_double(require(c, "at", "constraint"));
                    if (c["blocks"]) {
                        std::vector<std::pair<std::size_t, std::size_t>> ranges;
                        for (const auto& r : c["blocks"]) {
                            if (!r.IsSequence() || r.size() != 2) fail(r, "block ranges are [begin, end)");
                            ranges.emplace_back(as_count(r[0]), as_count(r[1]));
                        }
                        try {
                            bs.subblocks_at(at, std::move(ranges));
                        } catch (const InvalidArgument& e) {
                            fail(c, e.what());
                        }
                    } else {
                        bs.diagonal_at(at);
                    }
                }
            }
            return bs;
        };
        try {
            if (gallery == "scalar-interval") {
                check_keys(m, {"gallery", "step", "refine"}, "model");
                const double step = positive(m, "step", 1.0 / 64);
                const int refine = int(m["refine"] ? as_int(m["refine"]) : 0);
                algebra_ = gallery::scalar_interval(step, refine);
                model_desc_["step"] = step;
                model_desc_["refine"] = refine;
            } else if (gallery == "matrix-endpoint") {
                check_keys(m, {"gallery", "step", "refine"}, "model");
                const double step = positive(m, "step", 1.0 / 64);
                const int refine = int(m["refine"] ? as_int(m["refine"]) : 24);
                algebra_ = gallery::matrix_endpoint(step, refine);
                model_desc_["step"] = step;
                model_desc_["refine"] = refine;
            } else if (gallery == "interval") {
                check_keys(m, {"gallery", "step", "dim", "constraints", "refine"}, "model");
                const double step = positive(m, "step", 1.0 / 64);
                const std::size_t dim = m["dim"] ? as_count(m["dim"]) : 1;
                const int refine = int(m["refine"] ? as_int(m["refine"]) : 0);
                algebra_ = gallery::interval(step, constraints(dim), refine);
                model_desc_["step"] = step;
                model_desc_["dim"] = dim;
                model_desc_["refine"] = refine;
            } else if (gallery == "discrete") {
                check_keys(m, {"gallery", "points", "dim", "constraints"}, "model");
                const std::size_t points = as_count(require(m, "points", "model"));
                const std::size_t dim = m["dim"] ? as_count(m["dim"]) : 1;
                algebra_ = gallery::discrete(points, constraints(dim));
                model_desc_["points"] = points;
                model_desc_["dim"] = dim;
            } else if (gallery == "circle") {
                check_keys(m, {"gallery", "step", "dim"}, "model");
                const double step = positive(m, "step", 1.0 / 64);
                const std::size_t dim = m["dim"] ? as_count(m["dim"]) : 1;
                algebra_ = gallery::circle(step, dim);
                model_desc_["step"] = step;
                model_desc_["dim"] = dim;
            } else if (gallery == "toeplitz") {
                check_keys(m, {"gallery", "theta-samples"}, "model");
                auto tm = std::make_shared<ToeplitzModel>();
                if (m["theta-samples"]) tm->theta_samples = as_count(m["theta-samples"]);
                if (tm->theta_samples == 0) fail(m["theta-samples"], "theta-samples must be positive");
                toeplitz_ = tm;
                model_desc_["theta_samples"] = tm->theta_samples;
            } else if (gallery == "circle-fourier") {
                check_keys(m, {"gallery", "K", "n"}, "model");
                const long K = as_int(require(m, "K", "model"));
                if (K < 0) fail(m["K"], "K must be nonnegative");
                n_ = m["n"] ? as_count(m["n"]) : 1;
                manifold_ = CircleFourier{int(K)};
                model_desc_["K"] = K;
                model_desc_["n"] = n_;
            } else if (gallery == "graph") {
                check_keys(m, {"gallery", "adjacency", "n"}, "model");
                const auto adj_node = require(m, "adjacency", "model");
                std::vector<std::vector<double>> adj;
                for (const auto& row : adj_node) {
                    adj.emplace_back();
                    for (const auto& x : row) adj.back().push_back(as_double(x));
                }
                n_ = m["n"] ? as_count(m["n"]) : 1;
                repfam::detail::graph_laplacian(adj);  // validates
                manifold_ = GraphLaplacian{adj};
                model_desc_["vertices"] = adj.size();
                model_desc_["n"] = n_;
            } else {
                throw UnsupportedModel("unknown model gallery '" + gallery + "'");
            }
        } catch (const InvalidArgument& e) {
            fail(m, e.what());
        }
        if (algebra_) model_desc_["grid_points"] = algebra_->base.size();
    }

    void parse_family(const YAML::Node& f) {
        using namespace detail;
        const auto gen = as_string(require(f, "generator", "family"));
        auto need_algebra = [&] {
            if (!algebra_) throw IncompatibleQuery("family generator '" + gen + "' needs a function-algebra model");
        };
        auto need_toeplitz = [&] {
            if (!toeplitz_) throw IncompatibleQuery("family generator '" + gen + "' needs the Toeplitz model");
        };
        try {
            if (gen == "all-prims") {
                check_keys(f, {"generator"}, "family");
                if (algebra_) family_.emplace(RepFamily::all_prims(algebra_));
                else if (toeplitz_) family_.emplace(RepFamily::all_prims(toeplitz_));
                else throw IncompatibleQuery("family generator 'all-prims' needs an algebra or Toeplitz model");
            } else if (gen == "ev-grid") {
                check_keys(f, {"generator", "exclude-endpoint", "keep-blocks"}, "family");
                need_algebra();
                const bool excl = f["exclude-endpoint"] && as_bool(f["exclude-endpoint"]);
                std::vector<std::size_t> keep;
                if (const auto k = f["keep-blocks"])
                    for (const auto& b : k) keep.push_back(as_count(b));
                family_.emplace(RepFamily::ev_grid(algebra_, excl, keep));
            } else if (gen == "toeplitz-pi") {
                check_keys(f, {"generator"}, "family");
                need_toeplitz();
                family_.emplace(RepFamily::toeplitz_pi(toeplitz_));
            } else if (gen == "toeplitz-characters") {
                check_keys(f, {"generator"}, "family");
                need_toeplitz();
                family_.emplace(RepFamily::toeplitz_characters(toeplitz_));
            } else if (gen == "lambda-grid") {
                check_keys(f, {"generator", "window", "step"}, "family");
                if (!manifold_) throw IncompatibleQuery("family generator 'lambda-grid' needs a parametric model");
                const double window = positive(f, "window", 4.0);
                const double step = positive(f, "step", 1.0 / 32);
                grid_.emplace(n_, window, step);
                family_desc_ = json{{"label", "lambda-grid"}, {"n", n_}, {"window", window}, {"step", step},
                                    {"nodes", grid_->size()}};
            } else if (gen == "members") {
                check_keys(f, {"generator", "members", "label"}, "family");
                const auto ms = require(f, "members", "family");
                std::vector<Representation> reps;
                for (const auto& m : ms) reps.push_back(parse_member(m));
                const std::string label = f["label"] ? as_string(f["label"]) : "members";
                if (algebra_) family_.emplace(label, algebra_, std::move(reps));
                else if (toeplitz_) family_.emplace(label, toeplitz_, std::move(reps));
                else throw IncompatibleQuery("explicit members need an algebra or Toeplitz model");
            } else {
                fail(f["generator"], "unknown family generator '" + gen + "'");
            }
        } catch (const InvalidArgument& e) {
            fail(f, e.what());
        } catch (const IncompatibleModel& e) {
            throw IncompatibleQuery(e.what());
        }
    }

    static Representation parse_member(const YAML::Node& m) {
        using namespace detail;
        if (m.IsScalar()) {
            if (m.Scalar() == "pi") return ToeplitzIdentity{};
            fail(m, "unknown member '" + m.Scalar() + "'");
        }
        if (m["ev"]) {
            check_keys(m, {"ev", "block"}, "member");
            const double t = as_double(m["ev"]);
            if (m["block"]) return CompressedEval{t, as_count(m["block"])};
            return EvalPoint{t};
        }
        if (m["chi"]) {
            check_keys(m, {"chi"}, "member");
            return ToeplitzCharacter{as_double(m["chi"])};
        }
        fail(m, "member must be {ev: t}, {ev: t, block: b}, pi or {chi: theta}");
    }

    void parse_elements(const YAML::Node& es) {
        using namespace detail;
        if (!es.IsMap()) fail(es, "elements must be a mapping");
        for (const auto& kv : es) {
            const auto name = as_string(kv.first);
            const auto& e = kv.second;
            try {
                if (toeplitz_) elements_.emplace(name, parse_toeplitz(e));
                else if (algebra_) elements_.emplace(name, parse_algebra(e));
                else throw IncompatibleQuery("element '" + name + "' needs an algebra or Toeplitz model");
            } catch (const InvalidArgument& err) {
                fail(e, "element '" + name + "': " + err.what());
            }
        }
    }

    static ToeplitzElement parse_toeplitz(const YAML::Node& e) {
        using namespace detail;
        check_keys(e, {"symbol", "correction", "sections"}, "Toeplitz element");
        std::map<int, Complex> coeffs;
        const auto sym = require(e, "symbol", "Toeplitz element");
        if (!sym.IsMap()) fail(sym, "symbol is a mapping k: coefficient");
        for (const auto& kv : sym) coeffs[int(as_int(kv.first))] += as_complex(kv.second);
        ComplexMatrix corr;
        if (e["correction"]) corr = as_matrix(e["correction"]);
        std::vector<std::size_t> sections = ToeplitzElement::kDefaultSections;
        if (const auto s = e["sections"]) {
            sections.clear();
            for (const auto& x : s) sections.push_back(as_count(x));
        }
        return ToeplitzElement::from_symbol(coeffs, std::move(corr), std::move(sections));
    }

    AlgebraElement parse_algebra(const YAML::Node& e) const {
        using namespace detail;
        check_keys(e, {"poly", "poly-diag", "fourier-diag", "values"}, "element");
        const std::size_t d = algebra_->fiber_dim();
        auto poly = [](const YAML::Node& n) {
            std::vector<Complex> c;
            if (n.IsSequence()) {
                for (const auto& x : n) c.push_back(as_complex(x));  // complex coefficients nest as [re, im]
            } else {
                c.push_back(as_complex(n));
            }
            return c;
        };
        auto eval_poly = [](const std::vector<Complex>& c, double t) {
            Complex s = 0.0;
            for (std::size_t i = c.size(); i-- > 0;) s = s * t + c[i];
            return s;
        };
        if (const auto pd = e["poly-diag"]) {
            if (!pd.IsSequence() || pd.size() != d) fail(pd, "poly-diag needs " + std::to_string(d) + " entries");
            std::vector<std::vector<Complex>> diag;
            for (const auto& x : pd) diag.push_back(poly(x));
            return AlgebraElement::from_function(algebra_, [&](double t) {
                ComplexMatrix m(d);
                for (std::size_t i = 0; i < d; ++i) m(i, i) = eval_poly(diag[i], t);
                return m;
            });
        }
        if (const auto p = e["poly"]) {
            if (!p.IsSequence() || p.size() != d) fail(p, "poly needs " + std::to_string(d) + " rows");
            std::vector<std::vector<std::vector<Complex>>> entries;
            for (const auto& row : p) {
                if (!row.IsSequence() || row.size() != d) fail(row, "poly rows need " + std::to_string(d) + " entries");
                entries.emplace_back();
                for (const auto& x : row) entries.back().push_back(poly(x));
            }
            return AlgebraElement::from_function(algebra_, [&](double t) {
                ComplexMatrix m(d);
                for (std::size_t i = 0; i < d; ++i)
                    for (std::size_t j = 0; j < d; ++j) m(i, j) = eval_poly(entries[i][j], t);
                return m;
            });
        }
        if (const auto fd = e["fourier-diag"]) {
            if (!fd.IsSequence() || fd.size() != d) fail(fd, "fourier-diag needs " + std::to_string(d) + " entries");
            std::vector<std::map<int, Complex>> diag;
            for (const auto& x : fd) {
                if (!x.IsMap()) fail(x, "fourier-diag entries are mappings k: coefficient");
                diag.emplace_back();
                for (const auto& kv : x) diag.back()[int(as_int(kv.first))] += as_complex(kv.second);
            }
            return AlgebraElement::from_function(algebra_, [&](double t) {
                ComplexMatrix m(d);
                for (std::size_t i = 0; i < d; ++i)
                    for (const auto& [k, c] : diag[i]) m(i, i) += c * std::polar(1.0, 2.0 * std::numbers::pi * k * t);
                return m;
            });
        }
        const auto vs = require(e, "values", "element");
        std::vector<ComplexMatrix> vals;
        for (const auto& v : vs) vals.push_back(as_matrix(v));
        return AlgebraElement(algebra_, std::move(vals));
    }

    void parse_operators(const YAML::Node& os) {
        using namespace detail;
        if (!os.IsMap()) fail(os, "operators must be a mapping");
        if (!manifold_) throw IncompatibleQuery("operators need a circle-fourier or graph model");
        for (const auto& kv : os) {
            const auto name = as_string(kv.first);
            const auto& o = kv.second;
            check_keys(o, {"symbol", "couplings", "sobolev"}, "operator");
            std::vector<Monomial> sym;
            for (const auto& t : require(o, "symbol", "operator")) {
                check_keys(t, {"xi", "lambda", "coeff"}, "symbol term");
                sym.push_back({int(t["xi"] ? as_int(t["xi"]) : 0), as_powers(t["lambda"], n_),
                               as_complex(require(t, "coeff", "symbol term"))});
            }
            std::vector<ModeCoupling> cpl;
            if (const auto cs = o["couplings"]) {
                for (const auto& c : cs) {
                    check_keys(c, {"shift", "coeff", "lambda"}, "coupling");
                    cpl.push_back({int(as_int(require(c, "shift", "coupling"))), as_complex(require(c, "coeff", "coupling")),
                                   as_powers(c["lambda"], n_)});
                }
            }
            std::optional<double> s;
            if (o["sobolev"]) s = as_double(o["sobolev"]);
            try {
                operators_.emplace(name, InvariantOperator(*manifold_, n_, std::move(sym), std::move(cpl), s, name));
            } catch (const InvalidArgument& e) {
                fail(o, "operator '" + name + "': " + e.what());
            }
        }
    }

    void parse_observables(const YAML::Node& os) {
        using namespace detail;
        if (!os.IsMap()) fail(os, "observables must be a mapping");
        for (const auto& kv : os) {
            const auto& o = kv.second;
            check_keys(o, {"bounded", "infinite", "element", "fibered"}, "observable");
            if (o.size() != 1) fail(o, "observable needs exactly one of bounded, infinite, element, fibered");
            if (o["bounded"]) as_matrix(o["bounded"]);
            observables_.emplace(as_string(kv.first), o);
        }
    }

    void parse_query(const YAML::Node& q, std::set<std::string>& ids) {
        using namespace detail;
        if (!q.IsMap()) fail(q, "query must be a mapping");
        Query out;
        out.kind = as_string(require(q, "kind", "query"));
        const auto& kinds = query_kinds();
        if (std::find(kinds.begin(), kinds.end(), out.kind) == kinds.end())
            fail(q["kind"], "unknown query kind '" + out.kind + "'");
        out.id = q["id"] ? as_string(q["id"]) : out.kind + "-" + std::to_string(queries_.size());
        if (!ids.insert(out.id).second) fail(q, "duplicate query id '" + out.id + "'");
        check_keys(q, {"id", "kind", "element", "elements", "operator", "observables", "certified", "mode", "bound",
                       "bounds", "delta-dir", "delta-sym", "resolution", "attain-tol", "include-points", "lambda"},
                   "query");
        out.tolerances.resolution = positive(q, "resolution", kDefaultTol);
        out.tolerances.attain_tol = positive(q, "attain-tol", 1e-10);
        out.node = q;
        queries_.push_back(std::move(out));
    }

    std::string name_;
    json model_desc_ = json::object();
    json family_desc_ = nullptr;
    ModelPtr algebra_;
    ToeplitzModelPtr toeplitz_;
    std::optional<BaseManifold> manifold_;
    std::size_t n_ = 1;
    std::optional<RepFamily> family_;
    std::optional<LambdaGrid> grid_;
    std::map<std::string, Element> elements_;
    std::map<std::string, InvariantOperator> operators_;
    std::map<std::string, YAML::Node> observables_;
    std::vector<Query> queries_;
};

// ---------------------------------------------------------------------------
// Query evaluation

namespace detail {

inline std::string member_label(const RepFamily& f, long i) {
    return i >= 0 ? f.members()[std::size_t(i)].label() : std::string();
}

inline json norm_query(const Scenario& s, const Query& q) {
    const auto& f = s.family(q);
    const auto& e = s.element(q, require(q.node, "element", "norm query"));
    json r;
    std::visit([&](const auto& a) {
        using E = std::decay_t<decltype(a)>;
        repfam::detail::check_compatible(f, a);
        const auto norms = member_norms(f, a);
        const auto it = std::max_element(norms.begin(), norms.end());
        if constexpr (std::is_same_v<E, AlgebraElement>) {
            const auto n = elem_norm(a);
            r["norm"] = n.value;
            r["error"] = n.error;
            r["argmax"] = n.argmax;
        } else {
            const auto n = toeplitz_norm(a);
            r["norm"] = n.value;
            r["last_increment"] = n.last_increment;
            json secs = json::array();
            for (const auto& [N, v] : n.by_section) secs.push_back(json::array({N, v}));
            r["by_section"] = std::move(secs);
        }
        r["family_max"] = *it;
        r["attained_by"] = f.members()[std::size_t(it - norms.begin())].label();
    }, e);
    return r;
}

inline json member_invertibility_json(const RepFamily& f, const MemberInvertibility& m) {
    return json{{"invertible", m.invertible},
                {"threshold", m.threshold},
                {"min_sigma", num(m.min_sigma)},
                {"weakest", member_label(f, m.weakest)},
                {"max_inverse_norm", num(m.max_inverse_norm)}};
}

inline json invertible_element(const Scenario& s, const Query& q) {
    const auto& f = s.family(q);
    const auto& e = s.element(q, q.node["element"]);
    if (!std::holds_alternative<AlgebraElement>(e))
        throw IncompatibleQuery("query '" + q.id +
                                "': Toeplitz invertibility is not certified by finite sections; ask for fredholm");
    const auto& a = std::get<AlgebraElement>(e);
    repfam::detail::check_compatible(f, a);
    const auto& opt = q.tolerances;
    json r;
    const auto members = members_invertible(f, a, opt.resolution);
    r["members"] = member_invertibility_json(f, members);
    const auto direct = direct_invertibility(a, opt);
    r["direct"] = json{{"verdict", to_string(direct.verdict)},
                       {"min_sigma", direct.min_sigma},
                       {"lipschitz_slack", direct.lipschitz_slack}};
    std::optional<bool> certified_answer;
    try {
        const auto ex = invertible_via_exhausting(f, a, opt);
        r["via_exhausting"] = member_invertibility_json(f, ex);
        r["via_exhausting"]["certified"] = true;
        certified_answer = ex.invertible;
    } catch (const NotCertified& err) {
        r["via_exhausting"] = json{{"certified", false}, {"reason", err.what()}};
    }
    json faithful = json::array();
    if (const auto bs = q.node["bounds"]) {
        for (const auto& b : bs) {
            const double bound = as_double(b);
            if (!(bound > 0.0)) fail(b, "bounds must be positive");
            try {
                const auto fr = invertible_via_faithful(f, a, bound, opt);
                faithful.push_back(json{{"bound", bound}, {"certified", true}, {"invertible", fr.invertible}});
            } catch (const NotCertified& err) {
                faithful.push_back(json{{"bound", bound}, {"certified", false}, {"reason", err.what()}});
            }
        }
    }
    r["via_faithful"] = std::move(faithful);
    if (certified_answer) r["invertible"] = *certified_answer;
    else if (direct.verdict == Verdict::Invertible) r["invertible"] = true;
    else if (direct.verdict == Verdict::NotInvertible) r["invertible"] = false;
    else r["invertible"] = nullptr;
    if (members.invertible && direct.verdict == Verdict::NotInvertible) {
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "every member image is invertible, but the inverse norms are unbounded over the family "
                      "(largest sampled %.6g); the element itself is not invertible",
                      members.max_inverse_norm);
        r["note"] = buf;
    }
    return r;
}

inline json invertible_operator(const Scenario& s, const Query& q) {
    const auto& T = s.op(q, q.node["operator"]);
    const auto& g = s.grid(q);
    const double dd = get_double(q.node, "delta-dir", 0.1);
    const double ds = positive(q.node, "delta-sym", 1e-6);
    if (!(dd > 0.0) || dd >= 1.0) fail(q.node["delta-dir"], "delta-dir must lie in (0, 1)");
    const auto r = invertible_parametric(T, g, dd, ds, q.tolerances.resolution);
    json j{{"invertible", r.invertible},
           {"fibers_invertible", r.fibers_invertible},
           {"symbol_nonvanishing", r.symbol_nonvanishing},
           {"min_fiber_sigma", num(r.min_fiber_sigma)},
           {"weakest_fiber", lambda_json(r.weakest_fiber)},
           {"failing_fiber", r.failing_fiber ? lambda_json(*r.failing_fiber) : json(nullptr)},
           {"min_symbol", num(r.min_symbol)},
           {"failing_direction", r.failing_direction ? lambda_json(*r.failing_direction) : json(nullptr)},
           {"delta_dir", r.delta_dir},
           {"delta_sym", r.delta_sym},
           {"fibers_sampled", r.fibers_sampled},
           {"directions_sampled", r.directions_sampled},
           {"sobolev_s", T.sobolev_s()},
           {"order", T.order()}};
    if (const auto* c = std::get_if<CircleFourier>(&T.base())) j["mode_cutoff"] = c->K;
    return j;
}

inline json fredholm_query(const Scenario& s, const Query& q) {
    const auto& e = s.element(q, require(q.node, "element", "fredholm query"));
    if (!std::holds_alternative<ToeplitzElement>(e) || !s.toeplitz_model())
        throw IncompatibleQuery("query '" + q.id + "': fredholm needs a Toeplitz element");
    const auto quot = RepFamily::toeplitz_characters(s.toeplitz_model());
    const auto r = fredholm_via_family(quot, std::get<ToeplitzElement>(e), q.tolerances);
    return json{{"fredholm", r.fredholm},         {"decided", r.decided},      {"min_symbol", r.min_symbol},
                {"inverse_bound", num(r.inverse_bound)}, {"lipschitz", r.lipschitz}, {"angular_gap", r.angular_gap},
                {"quotient_family", quot.label()}, {"characters", quot.size()}};
}

inline SpectrumSet element_spectrum(const Scenario& s, const Query& q, SpectralContract* contract) {
    const auto& f = s.family(q);
    const auto& e = s.element(q, require(q.node, "element", "spectrum query"));
    return std::visit([&](const auto& a) {
        const auto u = spectrum_union(f, a, q.tolerances);
        if (contract) *contract = u.contract;
        return u.spectrum;
    }, e);
}

inline SpectrumSet parametric_spectrum(const Scenario& s, const Query& q) {
    const auto& T = s.op(q, require(q.node, "operator", "parametric-spectrum query"));
    return spectrum_parametric(T, s.grid(q), q.tolerances.resolution);
}

inline SpectralContract parse_contract(const YAML::Node& n) {
    if (!n) return SpectralContract::Equal;
    const auto c = as_string(n);
    if (c == "equal") return SpectralContract::Equal;
    if (c == "closure") return SpectralContract::Closure;
    if (c == "none") return SpectralContract::None;
    fail(n, "certified must be equal, closure or none");
}

inline ObservableFamily observable_family(const Scenario& s, const Query& q) {
    const auto names = require(q.node, "observables", "observable-spectrum query");
    if (!names.IsSequence()) fail(names, "observables must be a list of names");
    ObservableFamily fam{q.id, {}, parse_contract(q.node["certified"])};
    for (const auto& n : names) fam.members.push_back(s.observable(q, n));
    return fam;
}

inline bool include_points(const Query& q) { return !q.node["include-points"] || as_bool(q.node["include-points"]); }

inline json run_query(const Scenario& s, const Query& q) {
    json r;
    if (q.kind == "norm") {
        r = norm_query(s, q);
    } else if (q.kind == "invertible") {
        const bool has_e = bool(q.node["element"]), has_o = bool(q.node["operator"]);
        if (has_e == has_o) fail(q.node, "invertible query needs exactly one of element, operator");
        r = has_e ? invertible_element(s, q) : invertible_operator(s, q);
    } else if (q.kind == "fredholm") {
        r = fredholm_query(s, q);
    } else if (q.kind == "spectrum") {
        SpectralContract c = SpectralContract::None;
        const auto sp = element_spectrum(s, q, &c);
        r["contract"] = to_string(c);
        r["spectrum"] = spectrum_json(sp, include_points(q));
    } else if (q.kind == "family-report") {
        const auto& f = s.family(q);
        FamilyReport rep;
        if (f.is_toeplitz()) {
            std::vector<std::pair<std::string, ToeplitzElement>> user;
            if (const auto es = q.node["elements"])
                for (const auto& n : es) {
                    const auto& e = s.element(q, n);
                    if (!std::holds_alternative<ToeplitzElement>(e)) throw IncompatibleQuery("element kind mismatch");
                    user.emplace_back(as_string(n), std::get<ToeplitzElement>(e));
                }
            rep = family_report<ToeplitzElement>(f, user, q.tolerances);
        } else {
            std::vector<std::pair<std::string, AlgebraElement>> user;
            if (const auto es = q.node["elements"])
                for (const auto& n : es) {
                    const auto& e = s.element(q, n);
                    if (!std::holds_alternative<AlgebraElement>(e)) throw IncompatibleQuery("element kind mismatch");
                    user.emplace_back(as_string(n), std::get<AlgebraElement>(e));
                }
            rep = family_report<AlgebraElement>(f, user, q.tolerances);
        }
        std::size_t uncovered = 0;
        for (long c : rep.full.covered_by) uncovered += c < 0;
        r["family"] = rep.label;
        r["model"] = rep.model;
        r["members"] = rep.members;
        r["full"] = rep.full.full;
        r["exhausting"] = rep.exhausting.exhausting;
        r["faithful"] = rep.faithful.faithful;
        r["full_witness"] = optional_string(rep.full.witness);
        r["uncovered_prims"] = uncovered;
        r["prims"] = rep.full.prims.size();
        r["exhausting_witness"] = optional_string(rep.exhausting.witness);
        r["exhausting_gap"] = rep.exhausting.witness_gap;
        r["faithful_witness"] = optional_string(rep.faithful.witness);
        r["density_gap"] = num(rep.faithful.density_gap);
        r["prim_resolution"] = num(rep.faithful.resolution);
        r["probes"] = rep.probes_used;
    } else if (q.kind == "parametric-spectrum") {
        const auto& T = s.op(q, q.node["operator"]);
        r["spectrum"] = spectrum_json(parametric_spectrum(s, q), include_points(q));
        if (const auto* c = std::get_if<CircleFourier>(&T.base())) r["mode_cutoff"] = c->K;
        r["window"] = s.grid(q).window();
        r["step"] = s.grid(q).step();
    } else if (q.kind == "observable-spectrum") {
        const auto fam = observable_family(s, q);
        const auto u = spec_union_observable(fam, q.tolerances.resolution);
        r["relation"] = u.relation();
        r["degenerate"] = u.degenerate;
        r["spectrum"] = spectrum_json(u.spectrum, include_points(q));
        if (const auto mode = q.node["mode"]) {
            const auto m = as_string(mode);
            InvertMode im;
            if (m == "exhausting") im = InvertMode::Exhausting;
            else if (m == "faithful") im = InvertMode::Faithful;
            else fail(mode, "mode must be exhausting or faithful");
            const double bound = get_double(q.node, "bound", 0.0);
            try {
                const auto inv = invertible_observable(fam, im, bound, q.tolerances.resolution);
                r["invertible"] = json{{"certified", true},
                                       {"invertible", inv.invertible},
                                       {"degenerate", inv.degenerate},
                                       {"distance_to_zero", num(inv.distance_to_zero)},
                                       {"nearest_member", inv.nearest_member}};
            } catch (const NotCertified& err) {
                r["invertible"] = json{{"certified", false}, {"reason", err.what()}};
            }
        }
    }
    return r;
}

}  // namespace detail

/// One query's result inside a report.
inline json query_report(const Scenario& s, const Query& q) {
    json j;
    j["id"] = q.id;
    j["kind"] = q.kind;
    j["tolerances"] = json{{"resolution", q.tolerances.resolution}, {"attain_tol", q.tolerances.attain_tol}};
    j["result"] = detail::run_query(s, q);
    return j;
}

inline json run_scenario(const Scenario& s) {
    json r;
    r["repfam-report"] = kFormat;
    r["version"] = kVersion;
    r["scenario"] = s.name();
    r["model"] = s.has_model() ? s.model_json() : json(nullptr);
    r["family"] = s.family_json();
    json qs = json::array();
    for (const auto& q : s.queries()) qs.push_back(query_report(s, q));
    r["queries"] = std::move(qs);
    return r;
}

inline json run_scenario(const std::string& path) { return run_scenario(Scenario::from_file(path)); }

/// The report as written by the CLI: two-space indent, trailing newline.
inline std::string render(const json& report) { return report.dump(2) + "\n"; }

/// The spectrum a spectrum-valued query produces.
inline SpectrumSet query_spectrum(const Scenario& s, const std::string& id) {
    const auto it = std::find_if(s.queries().begin(), s.queries().end(), [&](const Query& q) { return q.id == id; });
    if (it == s.queries().end()) throw IncompatibleQuery("scenario has no query '" + id + "'");
    const auto& q = *it;
    if (q.kind == "spectrum") return detail::element_spectrum(s, q, nullptr);
    if (q.kind == "parametric-spectrum") return detail::parametric_spectrum(s, q);
    if (q.kind == "observable-spectrum")
        return spec_union_observable(detail::observable_family(s, q), q.tolerances.resolution).spectrum;
    throw IncompatibleQuery("query '" + id + "' of kind " + q.kind + " does not produce a spectrum");
}

/// CSV `re,im,resolution,truncated`, one row per point in canonical order.
inline std::string spectrum_csv(const SpectrumSet& s) {
    std::string out = "re,im,resolution,truncated\n";
    char buf[128];
    for (const auto& p : s.points()) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%s\n", p.real() + 0.0, p.imag() + 0.0, s.resolution(),
                      s.truncated() ? "true" : "false");
        out += buf;
    }
    return out;
}

inline void emit_spectrum_dump(const SpectrumSet& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << spectrum_csv(s);
    if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace repfam::scenario
