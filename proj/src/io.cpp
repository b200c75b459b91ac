#include <hyperq/io.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace hyperq
{

namespace
{

[[noreturn]] void fail(const std::string &where, const std::string &what) { throw InputError(where + ": " + what); }

const Json &field(const Json &j, const char *key, const std::string &where)
{
    if (!j.is_object()) {
        fail(where, "expected an object");
    }
    auto it = j.find(key);
    if (it == j.end()) {
        fail(where, std::string("missing field '") + key + "'");
    }
    return *it;
}

int int_from_json(const Json &j, const std::string &where, int lo = 0)
{
    if (!j.is_number_integer()) {
        fail(where, "expected an integer");
    }
    long long v = j.get<long long>();
    if (v < lo || v > 1000000) {
        fail(where, "integer " + std::to_string(v) + " out of range");
    }
    return static_cast<int>(v);
}

int int_field(const Json &j, const char *key, const std::string &where, int lo = 0)
{
    return int_from_json(field(j, key, where), where + "." + key, lo);
}

MultiIndex index_from_json(const Json &j, int n, const std::string &where)
{
    if (!j.is_array() || static_cast<int>(j.size()) != n) {
        fail(where, "expected an array of " + std::to_string(n) + " exponents");
    }
    MultiIndex a;
    for (std::size_t i = 0; i < j.size(); ++i) {
        a.push_back(int_from_json(j[i], where + "[" + std::to_string(i) + "]"));
    }
    return a;
}

Json index_to_json(const MultiIndex &a)
{
    Json out = Json::array();
    for (int x : a) {
        out.push_back(x);
    }
    return out;
}

GaussRat coefficient(const Json &t, const std::string &where)
{
    mpq_class re = rational_from_json(field(t, "re", where), where + ".re");
    mpq_class im = t.contains("im") ? rational_from_json(t["im"], where + ".im") : mpq_class(0);
    return GaussRat(re, im);
}

void check_kind(const Json &j, const std::set<std::string> &allowed, const std::string &where)
{
    const Json &k = field(j, "kind", where);
    if (!k.is_string() || !allowed.count(k.get<std::string>())) {
        fail(where + ".kind", "unexpected kind " + k.dump());
    }
}

Json bi_to_json(const BiSeries &A, const char *kind)
{
    Json out;
    out["n"] = A.n();
    out["D"] = A.cap();
    out["kind"] = kind;
    if (A.form() == SeriesForm::trace) {
        out["form"] = "trace";
    }
    Json terms = Json::array();
    for (const auto &[k, c] : A.terms()) {
        Json t;
        t["alpha"] = index_to_json(k.alpha);
        t["beta"] = index_to_json(k.beta);
        t["gamma"] = k.gamma;
        t["delta"] = k.delta;
        t["re"] = rational_to_json(c.re());
        t["im"] = rational_to_json(c.im());
        terms.push_back(std::move(t));
    }
    out["terms"] = std::move(terms);
    return out;
}

BiSeries bi_from_json(const Json &j, const std::string &where)
{
    const int n = int_field(j, "n", where);
    const int D = int_field(j, "D", where);
    SeriesForm form = SeriesForm::full;
    if (j.contains("form")) {
        const Json &f = j["form"];
        if (f == "trace") {
            form = SeriesForm::trace;
        } else if (f != "full") {
            fail(where + ".form", "expected \"full\" or \"trace\"");
        }
    }
    const Json &terms = field(j, "terms", where);
    if (!terms.is_array()) {
        fail(where + ".terms", "expected an array");
    }
    BiSeries out(n, D, form);
    std::set<BiKey> seen;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        std::string at = where + ".terms[" + std::to_string(i) + "]";
        const Json &t = terms[i];
        BiKey k{index_from_json(field(t, "alpha", at), n, at + ".alpha"),
                index_from_json(field(t, "beta", at), n, at + ".beta"), int_field(t, "gamma", at),
                t.contains("delta") ? int_field(t, "delta", at) : 0};
        if (form == SeriesForm::trace && k.delta != 0) {
            fail(at, "trace-form terms must have delta = 0");
        }
        if (k.weight() > D) {
            fail(at, "weighted degree " + std::to_string(k.weight()) + " exceeds D = " + std::to_string(D));
        }
        if (!seen.insert(k).second) {
            fail(at, "duplicate monomial");
        }
        out.add_term(k, coefficient(t, at));
    }
    return out;
}

} // namespace

Json parse_json_text(const std::string &text, const std::string &source)
{
    try {
        return Json::parse(text);
    } catch (const Json::parse_error &e) {
        std::size_t line = 1, col = 1;
        std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string reason = e.what();
        auto pos = reason.find("parse error");
        if (pos != std::string::npos) {
            reason = reason.substr(pos);
        }
        throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON (" +
                         reason + ")");
    }
}

Json read_json_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError(path + ": cannot open file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path);
}

Json rational_to_json(const mpq_class &q) { return format_rational(q); }

mpq_class rational_from_json(const Json &j, const std::string &where)
{
    if (j.is_number_integer()) {
        return mpq_class(mpz_class(j.dump()));
    }
    if (!j.is_string()) {
        fail(where, "expected a rational string \"p/q\"");
    }
    try {
        return parse_rational(j.get<std::string>());
    } catch (const std::invalid_argument &e) {
        fail(where, e.what());
    }
}

Json gauss_to_json(const GaussRat &x) { return Json::array({rational_to_json(x.re()), rational_to_json(x.im())}); }

GaussRat gauss_from_json(const Json &j, const std::string &where)
{
    if (!j.is_array() || j.size() != 2) {
        fail(where, "expected [re, im]");
    }
    return GaussRat(rational_from_json(j[0], where + "[0]"), rational_from_json(j[1], where + "[1]"));
}

Json matrix_to_json(const GMatrix &m)
{
    Json out = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) {
            row.push_back(gauss_to_json(m(i, j)));
        }
        out.push_back(std::move(row));
    }
    return out;
}

GMatrix matrix_from_json(const Json &j, const std::string &where)
{
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        fail(where, "expected a nonempty array of rows");
    }
    GMatrix m(j.size(), j[0].size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        std::string at = where + "[" + std::to_string(i) + "]";
        if (!j[i].is_array() || j[i].size() != m.cols()) {
            fail(at, "rows must have equal length");
        }
        for (std::size_t c = 0; c < m.cols(); ++c) {
            m(i, c) = gauss_from_json(j[i][c], at + "[" + std::to_string(c) + "]");
        }
    }
    return m;
}

Json series_to_json(const HoloSeries &f)
{
    Json out;
    out["n"] = f.n();
    out["D"] = f.cap();
    out["kind"] = "holo";
    Json terms = Json::array();
    for (const auto &[k, c] : f.terms()) {
        Json t;
        t["alpha"] = index_to_json(k.alpha);
        t["gamma"] = k.gamma;
        t["re"] = rational_to_json(c.re());
        t["im"] = rational_to_json(c.im());
        terms.push_back(std::move(t));
    }
    out["terms"] = std::move(terms);
    return out;
}

Json series_to_json(const RealSeries &A) { return bi_to_json(A.raw(), "real"); }

Json series_to_json(const BiSeries &A) { return bi_to_json(A, "complex"); }

HoloSeries holo_from_json(const Json &j, const std::string &where)
{
    check_kind(j, {"holo"}, where);
    const int n = int_field(j, "n", where);
    const int D = int_field(j, "D", where);
    const Json &terms = field(j, "terms", where);
    if (!terms.is_array()) {
        fail(where + ".terms", "expected an array");
    }
    HoloSeries out(n, D);
    std::set<HoloKey> seen;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        std::string at = where + ".terms[" + std::to_string(i) + "]";
        const Json &t = terms[i];
        HoloKey k{index_from_json(field(t, "alpha", at), n, at + ".alpha"), int_field(t, "gamma", at)};
        if (t.contains("beta") || t.contains("delta")) {
            fail(at, "holomorphic terms must not carry beta or delta");
        }
        if (k.weight() > D) {
            fail(at, "weighted degree " + std::to_string(k.weight()) + " exceeds D = " + std::to_string(D));
        }
        if (!seen.insert(k).second) {
            fail(at, "duplicate monomial");
        }
        out.add_term(k, coefficient(t, at));
    }
    return out;
}

RealSeries real_from_json(const Json &j, const std::string &where)
{
    check_kind(j, {"real"}, where);
    BiSeries s = bi_from_json(j, where);
    try {
        return RealSeries(std::move(s));
    } catch (const std::exception &e) {
        fail(where, std::string("not a real series: ") + e.what());
    }
}

Json map_to_json(const HoloMap &H)
{
    Json out;
    out["kind"] = "map";
    out["n"] = H.source_n();
    out["D"] = H.cap();
    Json comps = Json::array();
    for (const auto &c : H.components()) {
        comps.push_back(series_to_json(c));
    }
    out["components"] = std::move(comps);
    return out;
}

HoloMap map_from_json(const Json &j, const std::string &where)
{
    check_kind(j, {"map"}, where);
    const int n = int_field(j, "n", where);
    const int D = int_field(j, "D", where);
    const Json &comps = field(j, "components", where);
    if (!comps.is_array() || comps.size() < 1) {
        fail(where + ".components", "expected a nonempty array");
    }
    std::vector<HoloSeries> out;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        std::string at = where + ".components[" + std::to_string(i) + "]";
        HoloSeries c = holo_from_json(comps[i], at);
        if (c.n() != n || c.cap() != D) {
            fail(at, "component dimension or D differs from the map");
        }
        out.push_back(std::move(c));
    }
    return HoloMap(n, D, std::move(out));
}

Json automorphism_to_json(const QuadricAutomorphism &t)
{
    Json out;
    out["n"] = t.n();
    out["ell"] = t.form.negatives();
    out["D"] = t.cap();
    out["lam"] = rational_to_json(t.lam);
    out["r"] = rational_to_json(t.r);
    Json a = Json::array();
    for (const auto &x : t.a) {
        a.push_back(gauss_to_json(x));
    }
    out["a"] = std::move(a);
    out["U"] = matrix_to_json(t.U);
    out["sigma"] = t.sigma;
    return out;
}

QuadricAutomorphism automorphism_from_json(const Json &j, const SignatureForm &form, int D)
{
    const std::string where = "automorphism";
    const int n = form.n();
    if (j.contains("n") && int_field(j, "n", where) != n) {
        fail(where + ".n", "does not match the series dimension " + std::to_string(n));
    }
    if (j.contains("ell") && int_field(j, "ell", where) != form.negatives()) {
        fail(where + ".ell", "does not match ell = " + std::to_string(form.negatives()));
    }
    if (j.contains("D") && int_field(j, "D", where) < D) {
        fail(where + ".D", "is below the working degree " + std::to_string(D));
    }
    mpq_class lam = rational_from_json(field(j, "lam", where), where + ".lam");
    mpq_class r = rational_from_json(field(j, "r", where), where + ".r");
    const Json &ja = field(j, "a", where);
    if (!ja.is_array() || static_cast<int>(ja.size()) != n) {
        fail(where + ".a", "expected " + std::to_string(n) + " entries");
    }
    GVector a;
    for (std::size_t i = 0; i < ja.size(); ++i) {
        a.push_back(gauss_from_json(ja[i], where + ".a[" + std::to_string(i) + "]"));
    }
    GMatrix U = matrix_from_json(field(j, "U", where), where + ".U");
    if (static_cast<int>(U.rows()) != n || static_cast<int>(U.cols()) != n) {
        fail(where + ".U", "expected an " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
    }
    const Json &js = field(j, "sigma", where);
    if (js != 1 && js != -1) {
        fail(where + ".sigma", "expected 1 or -1");
    }
    try {
        return make_automorphism(lam, r, a, U, js.get<int>(), form, D);
    } catch (const AutomorphismError &e) {
        fail(where, e.what());
    }
}

Json model_to_json(const HypersurfaceModel &M)
{
    Json out;
    out["kind"] = "model";
    out["ell"] = M.form.negatives();
    out["graph"] = M.graph;
    out["A"] = series_to_json(M.A);
    return out;
}

HypersurfaceModel model_from_json(const Json &j, std::optional<int> ell)
{
    const std::string where = "model";
    if (j.is_object() && j.value("kind", "") == "real") {
        if (!ell) {
            fail(where, "a bare series needs --ell");
        }
        RealSeries A = real_from_json(j, where);
        HypersurfaceModel M{SignatureForm::standard(A.n(), *ell), A, A.form() == SeriesForm::trace};
        return M;
    }
    check_kind(j, {"model"}, where);
    int l = int_field(j, "ell", where);
    if (ell && *ell != l) {
        fail(where + ".ell", "differs from --ell");
    }
    bool graph = j.contains("graph") && j["graph"].is_boolean() && j["graph"].get<bool>();
    RealSeries A = real_from_json(field(j, "A", where), where + ".A");
    if (graph != (A.form() == SeriesForm::trace)) {
        fail(where, "graph models use trace-form series and vice versa");
    }
    if (2 * l > A.n()) {
        fail(where + ".ell", "requires ell <= n/2");
    }
    HypersurfaceModel M{SignatureForm::standard(A.n(), l), A, graph};
    try {
        validate_model(M);
    } catch (const std::invalid_argument &e) {
        fail(where, e.what());
    }
    return M;
}

Json embedding_to_json(const QuadricEmbedding &E)
{
    Json out;
    out["kind"] = "embedding";
    out["target_ell"] = E.target.negatives();
    out["map"] = map_to_json(E.H);
    return out;
}

QuadricEmbedding embedding_from_json(const Json &j, const std::string &where)
{
    check_kind(j, {"embedding"}, where);
    HoloMap H = map_from_json(field(j, "map", where), where + ".map");
    int ell = int_field(j, "target_ell", where);
    if (2 * ell > H.target_n()) {
        fail(where + ".target_ell", "requires target_ell <= N/2");
    }
    QuadricEmbedding E{H, SignatureForm::standard(H.target_n(), ell), 1, {}};
    try {
        E.sigma = embedding_sigma(H);
    } catch (const EmbeddingError &e) {
        fail(where, e.what());
    }
    return E;
}

} // namespace hyperq
