// Copyright 2026 The ddeq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ddeq/problem_spec.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ddeq {

using nlohmann::json;

namespace {

std::string join_issues(const std::vector<SpecIssue>& issues)
{
    std::ostringstream os;
    os << "invalid problem spec (" << issues.size() << (issues.size() == 1 ? " issue)" : " issues)");
    for (const auto& i : issues) {
        os << "\n  " << (i.path.empty() ? "/" : i.path) << ": " << i.message;
    }
    return os.str();
}

std::vector<std::string> flatten(const std::vector<SpecIssue>& issues)
{
    std::vector<std::string> out;
    for (const auto& i : issues) {
        out.push_back((i.path.empty() ? "/" : i.path) + ": " + i.message);
    }
    return out;
}

/// Collects located issues while walking the document.
class Reader {
public:
    std::vector<SpecIssue> issues;

    void fail(const std::string& path, std::string message) { issues.push_back({path, std::move(message)}); }

    const json* member(const json& obj, const std::string& path, const char* key, bool required)
    {
        if (!obj.is_object()) {
            fail(path, "expected an object");
            return nullptr;
        }
        const auto it = obj.find(key);
        if (it == obj.end()) {
            if (required) {
                fail(path + "/" + key, "missing required field");
            }
            return nullptr;
        }
        return &*it;
    }

    void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed)
    {
        if (!obj.is_object()) {
            return;
        }
        const std::set<std::string> names(allowed.begin(), allowed.end());
        for (const auto& [key, value] : obj.items()) {
            if (!names.contains(key)) {
                fail(path + "/" + key, "unknown field");
            }
        }
    }

    std::optional<double> number(const json& v, const std::string& path)
    {
        if (!v.is_number()) {
            fail(path, "expected a number");
            return std::nullopt;
        }
        const double x = v.get<double>();
        if (!std::isfinite(x)) {
            fail(path, "must be finite");
            return std::nullopt;
        }
        return x;
    }

    std::optional<Index> index(const json& v, const std::string& path, Index bound)
    {
        if (!v.is_number_integer()) {
            fail(path, "expected an integer index");
            return std::nullopt;
        }
        const auto i = v.get<long long>();
        if (i < 0 || (bound >= 0 && i >= bound)) {
            fail(path, "index " + std::to_string(i) + " out of range [0, " + std::to_string(bound) + ")");
            return std::nullopt;
        }
        return static_cast<Index>(i);
    }

    std::optional<cplx> complex(const json& v, const std::string& path)
    {
        if (v.is_number()) {
            auto x = number(v, path);
            return x ? std::optional<cplx>(cplx(*x, 0.0)) : std::nullopt;
        }
        if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
            const cplx z(v[0].get<double>(), v[1].get<double>());
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                fail(path, "must be finite");
                return std::nullopt;
            }
            return z;
        }
        fail(path, "expected a number or [re, im]");
        return std::nullopt;
    }

    std::optional<std::vector<double>> real_list(const json& v, const std::string& path)
    {
        if (!v.is_array()) {
            fail(path, "expected an array of numbers");
            return std::nullopt;
        }
        std::vector<double> out;
        bool ok = true;
        for (std::size_t k = 0; k < v.size(); ++k) {
            auto x = number(v[k], path + "/" + std::to_string(k));
            ok = ok && x.has_value();
            out.push_back(x.value_or(0.0));
        }
        return ok ? std::optional(out) : std::nullopt;
    }

    std::optional<ComplexVector> complex_vector(const json& v, const std::string& path)
    {
        if (!v.is_array()) {
            fail(path, "expected an array");
            return std::nullopt;
        }
        ComplexVector out(static_cast<Index>(v.size()));
        bool ok = true;
        for (std::size_t k = 0; k < v.size(); ++k) {
            auto z = complex(v[k], path + "/" + std::to_string(k));
            ok = ok && z.has_value();
            out(static_cast<Index>(k)) = z.value_or(cplx(0.0, 0.0));
        }
        return ok ? std::optional(out) : std::nullopt;
    }

    std::optional<ComplexMatrix> complex_matrix(const json& v, const std::string& path)
    {
        if (!v.is_array() || v.empty() || !v[0].is_array()) {
            fail(path, "expected a non-empty array of rows");
            return std::nullopt;
        }
        const auto rows = static_cast<Index>(v.size());
        const auto cols = static_cast<Index>(v[0].size());
        ComplexMatrix out(rows, cols);
        bool ok = true;
        for (Index r = 0; r < rows; ++r) {
            const std::string rp = path + "/" + std::to_string(r);
            const json& row = v[static_cast<std::size_t>(r)];
            if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
                fail(rp, "rows must all have " + std::to_string(cols) + " entries");
                ok = false;
                continue;
            }
            for (Index c = 0; c < cols; ++c) {
                auto z = complex(row[static_cast<std::size_t>(c)], rp + "/" + std::to_string(c));
                ok = ok && z.has_value();
                out(r, c) = z.value_or(cplx(0.0, 0.0));
            }
        }
        return ok ? std::optional(out) : std::nullopt;
    }

    std::optional<PhaseType> kernel(const json& v, const std::string& path)
    {
        if (!v.is_object()) {
            fail(path, "expected a kernel object");
            return std::nullopt;
        }
        PhaseType ph;
        if (v.contains("family")) {
            check_keys(v, path, {"family", "rate", "rates", "k", "continuation"});
            if (!v["family"].is_string()) {
                fail(path + "/family", "expected a string");
                return std::nullopt;
            }
            const std::string family = v["family"].get<std::string>();
            if (family != "exponential" && family != "erlang" && family != "hypoexponential" &&
                family != "coxian") {
                fail(path + "/family", "expected exponential, erlang, hypoexponential or coxian");
                return std::nullopt;
            }
            NamedParams params;
            if (const json* r = member(v, path, "rate", false)) {
                if (auto x = number(*r, path + "/rate")) {
                    params.rates.push_back(*x);
                }
            }
            if (const json* r = member(v, path, "rates", false)) {
                if (auto xs = real_list(*r, path + "/rates")) {
                    params.rates = *xs;
                }
            }
            if (const json* q = member(v, path, "continuation", false)) {
                if (auto xs = real_list(*q, path + "/continuation")) {
                    params.continuation = *xs;
                }
            }
            if (const json* k = member(v, path, "k", false)) {
                if (!k->is_number_integer()) {
                    fail(path + "/k", "expected an integer");
                } else {
                    params.k = k->get<int>();
                }
            }
            try {
                ph = make_named(family, params);
            } catch (const Error& e) {
                fail(path, e.what());
                return std::nullopt;
            }
        } else {
            check_keys(v, path, {"alpha", "G"});
            const json* a = member(v, path, "alpha", true);
            const json* g = member(v, path, "G", true);
            if (!a || !g) {
                return std::nullopt;
            }
            auto alpha = real_list(*a, path + "/alpha");
            auto G = complex_matrix(*g, path + "/G");
            if (!alpha || !G) {
                return std::nullopt;
            }
            if (G->imag().cwiseAbs().maxCoeff() != 0.0) {
                fail(path + "/G", "generator entries must be real");
                return std::nullopt;
            }
            ph.alpha = Eigen::Map<const RealVector>(alpha->data(), static_cast<Index>(alpha->size()));
            ph.G = G->real();
            if (ph.G.rows() != ph.G.cols() || ph.G.rows() != ph.alpha.size()) {
                fail(path, "alpha and G dimensions disagree");
                return std::nullopt;
            }
        }
        const auto report = validate(ph);
        for (const auto& violation : report.violations) {
            fail(path, violation);
        }
        return report.valid() ? std::optional(ph) : std::nullopt;
    }
};

struct SystemParts {
    Index n = 0;
    SparseMatrix A;
    std::vector<KernelTerm> terms;
};

std::optional<SystemParts> read_system(Reader& r, const json& v, const std::string& path)
{
    r.check_keys(v, path, {"n", "A", "terms"});
    const json* jn = r.member(v, path, "n", true);
    if (!jn) {
        return std::nullopt;
    }
    if (!jn->is_number_integer() || jn->get<long long>() < 1) {
        r.fail(path + "/n", "expected a positive integer");
        return std::nullopt;
    }
    SystemParts parts;
    parts.n = jn->get<Index>();
    const std::size_t before = r.issues.size();

    std::vector<Triplet> triplets;
    if (const json* ja = r.member(v, path, "A", false)) {
        if (!ja->is_array()) {
            r.fail(path + "/A", "expected an array of [i, j, re] or [i, j, re, im] triplets");
        } else {
            for (std::size_t k = 0; k < ja->size(); ++k) {
                const std::string tp = path + "/A/" + std::to_string(k);
                const json& t = (*ja)[k];
                if (!t.is_array() || t.size() < 3 || t.size() > 4) {
                    r.fail(tp, "expected [i, j, re] or [i, j, re, im]");
                    continue;
                }
                auto i = r.index(t[0], tp + "/0", parts.n);
                auto j = r.index(t[1], tp + "/1", parts.n);
                auto re = r.number(t[2], tp + "/2");
                std::optional<double> im = 0.0;
                if (t.size() == 4) {
                    im = r.number(t[3], tp + "/3");
                }
                if (i && j && re && im) {
                    triplets.emplace_back(*i, *j, cplx(*re, *im));
                }
            }
        }
    }
    parts.A = SparseMatrix(parts.n, parts.n);
    parts.A.setFromTriplets(triplets.begin(), triplets.end());

    const json* jt = r.member(v, path, "terms", true);
    if (jt && !jt->is_array()) {
        r.fail(path + "/terms", "expected an array");
    } else if (jt) {
        if (jt->empty()) {
            r.fail(path + "/terms", "no kernel terms; a system without memory is a plain ODE");
        }
        for (std::size_t k = 0; k < jt->size(); ++k) {
            const std::string tp = path + "/terms/" + std::to_string(k);
            const json& t = (*jt)[k];
            r.check_keys(t, tp, {"row", "col", "weight", "kernel"});
            const json* jr = r.member(t, tp, "row", true);
            const json* jc = r.member(t, tp, "col", true);
            const json* jw = r.member(t, tp, "weight", true);
            const json* jk = r.member(t, tp, "kernel", true);
            std::optional<Index> row;
            std::optional<Index> col;
            std::optional<cplx> w;
            std::optional<PhaseType> kernel;
            if (jr) row = r.index(*jr, tp + "/row", parts.n);
            if (jc) col = r.index(*jc, tp + "/col", parts.n);
            if (jw) w = r.complex(*jw, tp + "/weight");
            if (jk) kernel = r.kernel(*jk, tp + "/kernel");
            if (row && col && w && kernel) {
                parts.terms.push_back(KernelTerm{*row, *col, *w, *kernel});
            }
        }
    }
    if (r.issues.size() != before) {
        return std::nullopt;
    }
    return parts;
}

std::optional<GmeSpec> read_gme(Reader& r, const json& v, const std::string& path)
{
    r.check_keys(v, path, {"type", "rates", "kernels"});
    const json* jr = r.member(v, path, "rates", true);
    const json* jk = r.member(v, path, "kernels", true);
    if (!jr || !jk) {
        return std::nullopt;
    }
    auto rates = r.complex_matrix(*jr, path + "/rates");
    if (!rates) {
        return std::nullopt;
    }
    if (rates->rows() != rates->cols() || rates->imag().cwiseAbs().maxCoeff() != 0.0) {
        r.fail(path + "/rates", "expected a real square matrix");
        return std::nullopt;
    }
    GmeSpec spec;
    spec.n_states = rates->rows();
    spec.rates = rates->real();
    if (!jk->is_array()) {
        r.fail(path + "/kernels", "expected an array");
        return std::nullopt;
    }
    bool ok = true;
    for (std::size_t k = 0; k < jk->size(); ++k) {
        const std::string kp = path + "/kernels/" + std::to_string(k);
        const json& e = (*jk)[k];
        r.check_keys(e, kp, {"row", "col", "kernel"});
        const json* a = r.member(e, kp, "row", true);
        const json* b = r.member(e, kp, "col", true);
        const json* c = r.member(e, kp, "kernel", true);
        std::optional<Index> i;
        std::optional<Index> j;
        std::optional<PhaseType> ph;
        if (a) i = r.index(*a, kp + "/row", spec.n_states);
        if (b) j = r.index(*b, kp + "/col", spec.n_states);
        if (c) ph = r.kernel(*c, kp + "/kernel");
        if (i && j && ph) {
            if (!spec.kernels.emplace(std::pair{*i, *j}, *ph).second) {
                r.fail(kp, "duplicate kernel for this rate");
                ok = false;
            }
        } else {
            ok = false;
        }
    }
    return ok ? std::optional(spec) : std::nullopt;
}

std::optional<RedfieldSpec> read_redfield(Reader& r, const json& v, const std::string& path)
{
    r.check_keys(v, path, {"type", "H_S", "couplings", "correlations"});
    const json* jh = r.member(v, path, "H_S", true);
    const json* jt = r.member(v, path, "couplings", true);
    const json* jc = r.member(v, path, "correlations", true);
    if (!jh || !jt || !jc) {
        return std::nullopt;
    }
    RedfieldSpec spec;
    bool ok = true;
    if (auto h = r.complex_matrix(*jh, path + "/H_S")) {
        spec.H_S = *h;
    } else {
        ok = false;
    }
    if (!jt->is_array()) {
        r.fail(path + "/couplings", "expected an array of matrices");
        return std::nullopt;
    }
    for (std::size_t k = 0; k < jt->size(); ++k) {
        if (auto T = r.complex_matrix((*jt)[k], path + "/couplings/" + std::to_string(k))) {
            spec.couplings.push_back(*T);
        } else {
            ok = false;
        }
    }
    if (!jc->is_array()) {
        r.fail(path + "/correlations", "expected an array");
        return std::nullopt;
    }
    const auto h = static_cast<Index>(jt->size());
    for (std::size_t k = 0; k < jc->size(); ++k) {
        const std::string cp = path + "/correlations/" + std::to_string(k);
        const json& e = (*jc)[k];
        r.check_keys(e, cp, {"m", "n", "components"});
        const json* jm = r.member(e, cp, "m", true);
        const json* jn = r.member(e, cp, "n", true);
        const json* js = r.member(e, cp, "components", true);
        std::optional<Index> m;
        std::optional<Index> n;
        if (jm) m = r.index(*jm, cp + "/m", h);
        if (jn) n = r.index(*jn, cp + "/n", h);
        std::vector<CorrelationComponent> comps;
        if (js && js->is_array()) {
            for (std::size_t q = 0; q < js->size(); ++q) {
                const std::string qp = cp + "/components/" + std::to_string(q);
                const json& c = (*js)[q];
                r.check_keys(c, qp, {"weight", "kernel"});
                const json* jw = r.member(c, qp, "weight", true);
                const json* jk = r.member(c, qp, "kernel", true);
                std::optional<cplx> w;
                std::optional<PhaseType> ph;
                if (jw) w = r.complex(*jw, qp + "/weight");
                if (jk) ph = r.kernel(*jk, qp + "/kernel");
                if (w && ph) {
                    comps.push_back({*w, *ph});
                } else {
                    ok = false;
                }
            }
        } else if (js) {
            r.fail(cp + "/components", "expected an array");
        }
        if (m && n) {
            if (!spec.correlations.emplace(std::pair{*m, *n}, comps).second) {
                r.fail(cp, "duplicate correlation");
            }
        } else {
            ok = false;
        }
    }
    return ok ? std::optional(spec) : std::nullopt;
}

void read_run(Reader& r, const json& v, const std::string& path, RunSettings& run)
{
    r.check_keys(v, path,
                 {"method", "t_end", "step", "times", "dde_step", "eps_grid", "np", "allow_shift", "shift_margin",
                  "normalize", "recovery"});
    if (const json* m = r.member(v, path, "method", false)) {
        const auto method = m->is_string() ? parse_method(m->get<std::string>()) : std::nullopt;
        if (!method) {
            r.fail(path + "/method", "expected one of dde-direct, lct-ode, schrodingerize");
        } else {
            run.method = *method;
        }
    }
    auto positive = [&](const char* key, double& target) {
        if (const json* x = r.member(v, path, key, false)) {
            if (auto val = r.number(*x, path + "/" + key)) {
                if (*val > 0.0) {
                    target = *val;
                } else {
                    r.fail(path + "/" + key, "must be positive");
                }
            }
        }
    };
    if (const json* x = r.member(v, path, "t_end", false)) {
        if (auto val = r.number(*x, path + "/t_end")) {
            if (*val >= 0.0) {
                run.t_end = *val;
            } else {
                r.fail(path + "/t_end", "must be non-negative");
            }
        }
    }
    double step = 0.0;
    positive("step", step);
    if (step > 0.0) {
        run.step = step;
    }
    positive("dde_step", run.dde_step);
    if (const json* x = r.member(v, path, "eps_grid", false)) {
        if (auto val = r.number(*x, path + "/eps_grid")) {
            if (*val > 0.0 && *val < 1.0) {
                run.eps_grid = *val;
            } else {
                r.fail(path + "/eps_grid", "must lie in (0, 1)");
            }
        }
    }
    if (const json* x = r.member(v, path, "np", false)) {
        if (!x->is_number_integer() || x->get<long long>() < 2 ||
            (x->get<long long>() & (x->get<long long>() - 1)) != 0) {
            r.fail(path + "/np", "expected a power of two >= 2");
        } else {
            run.points = x->get<Index>();
        }
    }
    if (const json* x = r.member(v, path, "allow_shift", false)) {
        if (!x->is_boolean()) {
            r.fail(path + "/allow_shift", "expected true or false");
        } else {
            run.allow_shift = x->get<bool>();
        }
    }
    if (const json* x = r.member(v, path, "shift_margin", false)) {
        if (auto val = r.number(*x, path + "/shift_margin")) {
            if (*val >= 0.0) {
                run.shift_margin = *val;
            } else {
                r.fail(path + "/shift_margin", "must be non-negative");
            }
        }
    }
    if (const json* x = r.member(v, path, "normalize", false)) {
        if (*x == "strict") {
            run.normalization = Normalization::strict;
        } else if (*x == "auto") {
            run.normalization = Normalization::automatic;
        } else {
            r.fail(path + "/normalize", "expected \"strict\" or \"auto\"");
        }
    }
    if (const json* x = r.member(v, path, "recovery", false)) {
        if (*x == "pointwise") {
            run.recovery = RecoveryMethod::pointwise;
        } else if (*x == "integral") {
            run.recovery = RecoveryMethod::integral;
        } else {
            r.fail(path + "/recovery", "expected \"pointwise\" or \"integral\"");
        }
    }
    if (const json* x = r.member(v, path, "times", false)) {
        if (auto ts = r.real_list(*x, path + "/times")) {
            for (std::size_t k = 0; k < ts->size(); ++k) {
                if ((*ts)[k] < 0.0 || (k > 0 && !((*ts)[k] > (*ts)[k - 1]))) {
                    r.fail(path + "/times", "times must be non-negative and strictly ascending");
                    break;
                }
            }
            run.times = *ts;
        }
    }
}

json complex_json(cplx z)
{
    if (z.imag() == 0.0) {
        return z.real();
    }
    return json::array({z.real(), z.imag()});
}

}  // namespace

SpecError::SpecError(std::vector<SpecIssue> issues)
    : ValidationError(join_issues(issues), flatten(issues)), issues_(std::move(issues))
{
}

std::string to_string(SolveMethod method)
{
    switch (method) {
    case SolveMethod::dde_direct:
        return "dde-direct";
    case SolveMethod::lct_ode:
        return "lct-ode";
    case SolveMethod::schrodingerize:
        return "schrodingerize";
    }
    return "unknown";
}

std::optional<SolveMethod> parse_method(std::string_view name)
{
    if (name == "dde-direct") {
        return SolveMethod::dde_direct;
    }
    if (name == "lct-ode") {
        return SolveMethod::lct_ode;
    }
    if (name == "schrodingerize") {
        return SolveMethod::schrodingerize;
    }
    return std::nullopt;
}

std::vector<double> RunSettings::output_times() const
{
    if (!times.empty()) {
        return times;
    }
    if (t_end == 0.0) {
        return {0.0};
    }
    const double h = step.value_or(t_end / 100.0);
    const auto count = static_cast<long long>(std::floor(t_end / h + 1e-9));
    std::vector<double> out;
    for (long long k = 0; k <= count; ++k) {
        out.push_back(static_cast<double>(k) * h);
    }
    if (t_end - out.back() > 1e-9 * t_end) {
        out.push_back(t_end);
    }
    return out;
}

ProblemSpec parse_spec(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw SpecError(std::vector<SpecIssue>{{"", std::string("syntax error: ") + e.what()}});
    }
    Reader r;
    if (!doc.is_object()) {
        throw SpecError(std::vector<SpecIssue>{{"", "the document must be a JSON object"}});
    }
    r.check_keys(doc, "", {"schema", "system", "model", "initial", "run"});
    if (const json* s = r.member(doc, "", "schema", false)) {
        if (*s != kSpecSchema) {
            r.fail("/schema", std::string("unsupported schema; expected \"") + kSpecSchema + "\"");
        }
    }
    const json* js = r.member(doc, "", "system", false);
    const json* jm = r.member(doc, "", "model", false);
    if ((js == nullptr) == (jm == nullptr)) {
        r.fail("", "exactly one of \"system\" or \"model\" must be present");
        throw SpecError(r.issues);
    }

    RunSettings run;
    if (const json* jr = r.member(doc, "", "run", false)) {
        read_run(r, *jr, "/run", run);
    }

    ModelKind kind = ModelKind::system;
    std::optional<SystemParts> parts;
    std::optional<GmeSpec> gme;
    std::optional<RedfieldSpec> redfield;
    if (js) {
        parts = read_system(r, *js, "/system");
    } else {
        const json* type = r.member(*jm, "/model", "type", true);
        if (type && *type == "gme") {
            kind = ModelKind::gme;
            gme = read_gme(r, *jm, "/model");
        } else if (type && *type == "redfield") {
            kind = ModelKind::redfield;
            redfield = read_redfield(r, *jm, "/model");
        } else if (type) {
            r.fail("/model/type", "expected \"gme\" or \"redfield\"");
        }
    }

    const json* ji = r.member(doc, "", "initial", true);
    std::optional<ComplexVector> x0;
    if (ji) {
        if (kind == ModelKind::redfield) {
            r.check_keys(*ji, "/initial", {"rho0"});
            if (const json* rho = r.member(*ji, "/initial", "rho0", true)) {
                if (auto m = r.complex_matrix(*rho, "/initial/rho0")) {
                    if (m->rows() != m->cols()) {
                        r.fail("/initial/rho0", "density matrix must be square");
                    } else {
                        x0 = vec(*m);
                    }
                }
            }
        } else {
            r.check_keys(*ji, "/initial", {"x0"});
            if (const json* jx = r.member(*ji, "/initial", "x0", true)) {
                x0 = r.complex_vector(*jx, "/initial/x0");
            }
        }
    }
    if (!r.issues.empty()) {
        throw SpecError(r.issues);
    }

    std::optional<DelaySystem> sys;
    try {
        if (kind == ModelKind::system) {
            sys.emplace(parts->n, parts->A, parts->terms);
        } else if (kind == ModelKind::gme) {
            sys.emplace(build_gme(*gme));
        } else {
            sys.emplace(build_redfield_dephasing(*redfield));
        }
    } catch (const ValidationError& e) {
        std::vector<SpecIssue> issues;
        const std::string where = kind == ModelKind::system ? "/system" : "/model";
        for (const auto& v : e.violations()) {
            issues.push_back({where, v});
        }
        if (issues.empty()) {
            issues.push_back({where, e.what()});
        }
        throw SpecError(issues);
    } catch (const Error& e) {
        throw SpecError(std::vector<SpecIssue>{{kind == ModelKind::system ? "/system" : "/model", e.what()}});
    }
    if (x0->size() != sys->n()) {
        throw SpecError(std::vector<SpecIssue>{{kind == ModelKind::redfield ? "/initial/rho0" : "/initial/x0",
                          "initial state has " + std::to_string(x0->size()) + " entries, the system has " +
                              std::to_string(sys->n())}});
    }
    if (run.normalization == Normalization::strict) {
        std::vector<SpecIssue> issues;
        for (std::size_t k = 0; k < sys->terms().size(); ++k) {
            const double m = mean(sys->terms()[k].kernel);
            if (std::abs(m - 1.0) > 1e-9) {
                std::ostringstream os;
                os << "strict normalization requires mean 1, kernel of term " << k << " has mean " << m;
                issues.push_back({kind == ModelKind::system ? "/system/terms/" + std::to_string(k) + "/kernel"
                                                            : "/model",
                                  os.str()});
            }
        }
        if (!issues.empty()) {
            throw SpecError(issues);
        }
    }
    return ProblemSpec{kind, std::move(*sys), std::move(*x0), run, std::move(gme), std::move(redfield)};
}

ProblemSpec load_spec(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw SpecError(std::vector<SpecIssue>{{"", "cannot open " + path.string()}});
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_spec(text.str());
}

json to_json(const RunSettings& run)
{
    json j;
    j["method"] = to_string(run.method);
    j["t_end"] = run.t_end;
    if (run.step) {
        j["step"] = *run.step;
    }
    if (!run.times.empty()) {
        j["times"] = run.times;
    }
    j["dde_step"] = run.dde_step;
    j["eps_grid"] = run.eps_grid;
    if (run.points > 0) {
        j["np"] = run.points;
    }
    j["allow_shift"] = run.allow_shift;
    if (run.shift_margin > 0.0) {
        j["shift_margin"] = run.shift_margin;
    }
    j["normalize"] = run.normalization == Normalization::strict ? "strict" : "auto";
    j["recovery"] = run.recovery == RecoveryMethod::pointwise ? "pointwise" : "integral";
    return j;
}

json system_document(const DelaySystem& sys, const ComplexVector& x0, const RunSettings& run)
{
    json A = json::array();
    for (Index k = 0; k < sys.A().outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(sys.A(), k); it; ++it) {
            json t = json::array({it.row(), it.col(), it.value().real()});
            if (it.value().imag() != 0.0) {
                t.push_back(it.value().imag());
            }
            A.push_back(t);
        }
    }
    json terms = json::array();
    for (const auto& term : sys.terms()) {
        json G = json::array();
        for (Index r = 0; r < term.kernel.G.rows(); ++r) {
            json row = json::array();
            for (Index c = 0; c < term.kernel.G.cols(); ++c) {
                row.push_back(term.kernel.G(r, c));
            }
            G.push_back(row);
        }
        json alpha = json::array();
        for (Index c = 0; c < term.kernel.alpha.size(); ++c) {
            alpha.push_back(term.kernel.alpha(c));
        }
        terms.push_back({{"row", term.row},
                         {"col", term.col},
                         {"weight", complex_json(term.weight)},
                         {"kernel", {{"alpha", alpha}, {"G", G}}}});
    }
    json x = json::array();
    for (Index i = 0; i < x0.size(); ++i) {
        x.push_back(complex_json(x0(i)));
    }
    return json{{"schema", kSpecSchema},
                {"system", {{"n", sys.n()}, {"A", A}, {"terms", terms}}},
                {"initial", {{"x0", x}}},
                {"run", to_json(run)}};
}

}  // namespace ddeq
