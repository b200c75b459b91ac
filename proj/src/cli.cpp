#include <hyperq/cli.hpp>

#include <atomic>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include <hyperq/chern_moser.hpp>
#include <hyperq/generators.hpp>
#include <hyperq/hermitian.hpp>

namespace hyperq
{

namespace
{

// Thrown for a failed precondition on otherwise well-formed input.
class PreconditionError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

Json opt_json(const std::optional<int> &v) { return v ? Json(*v) : Json(nullptr); }

Json opt_path(const std::string &p) { return p.empty() ? Json(nullptr) : Json(p); }

Json config_json(const RunConfig &c)
{
    Json j;
    j["command"] = c.command;
    j["n"] = opt_json(c.n);
    j["ell"] = opt_json(c.ell);
    j["degree"] = opt_json(c.degree);
    j["count"] = opt_json(c.count);
    j["sigma_max"] = opt_json(c.sigma_max);
    j["seed"] = c.seed ? Json(*c.seed) : Json(nullptr);
    j["jobs"] = c.jobs;
    j["input"] = opt_path(c.input);
    j["series"] = opt_path(c.series);
    j["model"] = opt_path(c.model);
    j["model2"] = opt_path(c.model2);
    j["automorphism"] = opt_path(c.automorphism);
    j["h1"] = opt_path(c.h1);
    j["h2"] = opt_path(c.h2);
    j["drop"] = c.drop;
    j["any_class"] = c.any_class;
    return j;
}

Json provenance(const RunConfig &c)
{
    Json p;
    p["tool"] = "hyperq";
    p["version"] = kVersion;
    p["gmp"] = gmp_version;
    p["json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH);
    p["seed"] = c.seed ? Json(*c.seed) : Json(nullptr);
    p["config"] = config_json(c);
    return p;
}

int need(const std::optional<int> &v, const char *flag)
{
    if (!v) {
        throw InputError(std::string("missing required option ") + flag);
    }
    return *v;
}

const std::string &need_path(const std::string &p, const char *flag)
{
    if (p.empty()) {
        throw InputError(std::string("missing required option ") + flag);
    }
    return p;
}

SignatureForm form_of(int n, int ell)
{
    if (n < 1 || ell < 0 || 2 * ell > n) {
        throw InputError("--ell must satisfy 0 <= ell <= n/2 (n = " + std::to_string(n) + ")");
    }
    return SignatureForm::standard(n, ell);
}

RealSeries truncate(const RealSeries &A, int D)
{
    BiSeries out(A.n(), D, A.form());
    for (const auto &[k, c] : A.terms()) {
        out.add_term(k, c);
    }
    return RealSeries(std::move(out));
}

RealSeries read_series(const RunConfig &c, const std::string &path)
{
    RealSeries A = real_from_json(read_json_file(path));
    if (c.degree) {
        if (*c.degree < 4) {
            throw InputError("--degree must be at least 4");
        }
        if (*c.degree > A.cap()) {
            throw InputError("--degree " + std::to_string(*c.degree) + " exceeds the series cap D = " +
                             std::to_string(A.cap()));
        }
        A = truncate(A, *c.degree);
    }
    return A;
}

RealSeries read_full_series(const RunConfig &c, const std::string &path)
{
    RealSeries A = read_series(c, path);
    if (A.form() != SeriesForm::full) {
        throw InputError(path + ": expected a full-form series in (z, zbar, w, wbar)");
    }
    return A;
}

HypersurfaceModel read_model(const RunConfig &c, const std::string &path)
{
    return model_from_json(read_json_file(path), c.ell);
}

QuadricEmbedding read_embedding(const std::string &path, const HypersurfaceModel &M, const char *name)
{
    QuadricEmbedding E = embedding_from_json(read_json_file(path), name);
    if (E.n() != M.n() || E.cap() != M.cap()) {
        throw InputError(std::string(name) + ": source dimension or D differs from the model");
    }
    if (!embedding_residual(E.H, E.target, M).is_zero()) {
        throw PreconditionError(std::string(name) + " does not map M into the quadric to degree D");
    }
    return E;
}

Json pair_json(const NormalizedPair &p)
{
    Json j;
    Json f = Json::array();
    for (const auto &c : p.f) {
        f.push_back(series_to_json(c));
    }
    j["f"] = std::move(f);
    j["g"] = series_to_json(p.g);
    return j;
}

Json holo_list(const std::vector<HoloSeries> &v)
{
    Json out = Json::array();
    for (const auto &f : v) {
        out.push_back(series_to_json(f));
    }
    return out;
}

Json k_values(const RealSeries &A, int kmax, bool (*pred)(const RealSeries &, int))
{
    Json out = Json::array();
    for (int k = 0; k <= kmax; ++k) {
        if (pred(A, k)) {
            out.push_back(k);
        }
    }
    return out;
}

Json decomposition_json(const Decomposition &d)
{
    Json j;
    j["s"] = d.s;
    j["phis"] = holo_list(d.phis);
    Json w = Json::array();
    for (const auto &x : d.weights) {
        w.push_back(rational_to_json(x));
    }
    j["weights"] = std::move(w);
    j["unit_weights"] = d.unit_weights();
    return j;
}

Json normalized_json(const NormalizedEmbedding &ne)
{
    Json j;
    j["sigma"] = ne.sigma;
    j["s"] = ne.s;
    j["perm"] = ne.perm;
    j["renumbered_signs"] = ne.renumbered.signs();
    Json t = automorphism_to_json(ne.T);
    t.erase("ell");
    t["signs"] = ne.renumbered.signs();
    j["T"] = std::move(t);
    j["Htilde"] = map_to_json(ne.Htilde);
    j["normalized"] = is_normalized(ne);
    return j;
}

// Parses --drop into the constraint mask kept in the system.
unsigned constraint_mask(const std::vector<std::string> &drop)
{
    unsigned mask = all_constraints;
    for (const auto &d : drop) {
        if (d == "no_constant") {
            mask &= ~static_cast<unsigned>(no_constant);
        } else if (d == "jacobian") {
            mask &= ~static_cast<unsigned>(jacobian);
        } else if (d == "re_gww") {
            mask &= ~static_cast<unsigned>(re_gww);
        } else {
            throw InputError("--drop: unknown constraint group '" + d + "'");
        }
    }
    return mask;
}

int cmd_analyze(const RunConfig &c, Json &r)
{
    RealSeries A = read_full_series(c, need_path(c.input.empty() ? c.series : c.input, "--input"));
    HermitianProfile p = profile(A);
    r["n"] = A.n();
    r["D"] = A.cap();
    r["rank"] = p.rank;
    r["neg"] = p.neg;
    r["pos"] = p.pos;
    r["support_rank"] = p.support_rank;
    r["low_order_terms"] = has_low_order_terms(A);
    int kmax = std::max<int>(A.n(), static_cast<int>(p.support_rank));
    Json classes;
    classes["H"] = k_values(A, kmax, in_class_H);
    classes["S"] = k_values(A, kmax, in_class_S);
    classes["S_tilde"] = k_values(A, kmax, in_class_S_tilde);
    r["classes"] = std::move(classes);
    Decomposition d = decompose(A);
    r["decomposition"] = holo_list(d.phis);
    r["decomposition_s"] = d.s;
    return exit_ok;
}

int cmd_decompose(const RunConfig &c, Json &r)
{
    RealSeries A = read_full_series(c, need_path(c.input.empty() ? c.series : c.input, "--input"));
    Decomposition d = decompose(A);
    r["decomposition"] = decomposition_json(d);
    r["recompose_exact"] = recompose(d) == A;
    return exit_ok;
}

int cmd_embed(const RunConfig &c, Json &r)
{
    HypersurfaceModel M = read_model(c, need_path(c.model.empty() ? c.input : c.model, "--model"));
    QuadricEmbedding E;
    try {
        E = build_embedding(M);
    } catch (const EmbeddingError &e) {
        throw PreconditionError(std::string("embed: ") + e.what());
    }
    r["embedding"] = embedding_to_json(E);
    r["N"] = E.N();
    r["target_ell"] = E.target.negatives();
    r["sigma"] = E.sigma;
    r["transversal"] = check_transversality(E.H);
    r["residual_zero"] = embedding_residual(E.H, E.target, M).is_zero();
    return exit_ok;
}

int cmd_restrict(const RunConfig &c, Json &r)
{
    RealSeries A = read_full_series(c, need_path(c.input.empty() ? c.series : c.input, "--input"));
    SignatureForm form = form_of(A.n(), need(c.ell, "--ell"));
    RealSeries A0 = restrict_to_quadric(A, form);
    r["restriction"] = series_to_json(A0);
    r["zero"] = A0.is_zero();
    return exit_ok;
}

int cmd_cm_solve(const RunConfig &c, Json &r)
{
    RealSeries A = read_full_series(c, need_path(c.series.empty() ? c.input : c.series, "--series"));
    SignatureForm form = form_of(A.n(), need(c.ell, "--ell"));
    SharpnessReport rep;
    try {
        rep = verify_thm12_instance(A, form, !c.any_class);
    } catch (const std::invalid_argument &e) {
        throw PreconditionError(std::string("cm-solve: ") + e.what());
    }
    r["precondition_holds"] = rep.precondition_holds;
    r["restriction_zero"] = rep.restriction_zero;
    r["series_zero"] = rep.restriction_zero ? Json(rep.series_zero) : Json(nullptr);
    r["system_status"] = to_string(rep.status);
    r["sigma"] = rep.sigma;
    r["certificate_verified"] = rep.certificate_verified;
    r["certificate_support"] = rep.certificate_support;
    r["solution"] = rep.solution ? pair_json(*rep.solution) : Json(nullptr);
    if (rep.status == SharpnessStatus::inconsistent && !rep.certificate_verified) {
        return exit_negative;
    }
    // A violation is the expected outcome off the class (sharpness runs).
    return rep.status == SharpnessStatus::violation && rep.precondition_holds ? exit_negative : exit_ok;
}

int cmd_cm_kernel(const RunConfig &c, Json &r)
{
    SignatureForm form = form_of(need(c.n, "--n"), need(c.ell, "--ell"));
    int smax = c.sigma_max.value_or(c.degree.value_or(8));
    if (smax < 0) {
        throw InputError("--sigma-max must be nonnegative");
    }
    unsigned mask = constraint_mask(c.drop);
    Json rows = Json::array();
    std::size_t total = 0;
    for (int sigma = 0; sigma <= smax; ++sigma) {
        std::size_t d = kernel_dimension(sigma, form, mask);
        total += d;
        rows.push_back(Json{{"sigma", sigma}, {"dimension", d}});
    }
    r["constraints"] = mask;
    r["kernel"] = std::move(rows);
    r["total"] = total;
    r["trivial"] = total == 0;
    return exit_ok;
}

int cmd_equiv_verify(const RunConfig &c, Json &r)
{
    HypersurfaceModel M1 = read_model(c, need_path(c.model, "--model"));
    HypersurfaceModel M2 = read_model(c, need_path(c.model2.empty() ? c.input : c.model2, "--model2"));
    if (M1.graph || M2.graph) {
        throw InputError("equiv-verify expects full-form models");
    }
    QuadricAutomorphism t =
        automorphism_from_json(read_json_file(need_path(c.automorphism, "--automorphism")), M1.form, M1.cap());
    EquivalenceReport rep = verify_equivalence(M1, M2, t);
    r["equivalent"] = rep.equivalent;
    r["invariants_match"] = rep.invariants_match;
    r["hypothesis_holds"] = rep.hypothesis_holds;
    r["rank1"] = rep.rank1;
    r["rank2"] = rep.rank2;
    r["neg1"] = rep.neg1;
    r["neg2"] = rep.neg2;
    r["first_difference"] = rep.first_difference;
    return rep.equivalent ? exit_ok : exit_negative;
}

int cmd_rigidity(const RunConfig &c, Json &r)
{
    HypersurfaceModel M = read_model(c, need_path(c.model, "--model"));
    QuadricEmbedding E1 = read_embedding(need_path(c.h1, "--h1"), M, "h1");
    std::optional<QuadricEmbedding> E2;
    if (!c.h2.empty()) {
        E2 = read_embedding(c.h2, M, "h2");
    }
    // Normalization failures are precondition errors; later failures are
    // verified negatives.
    try {
        normalize_embedding(E1, M);
        if (E2) {
            normalize_embedding(*E2, M);
        }
    } catch (const EmbeddingError &e) {
        throw PreconditionError(std::string("normalization: ") + e.what());
    }
    RigidityFactorization f;
    try {
        if (E2) {
            if (E1.N() > E2->N()) {
                throw InputError("rigidity expects N(h1) <= N(h2)");
            }
            f = factor_rigidity(E1, *E2, M);
        } else {
            if (!M.A.is_zero()) {
                throw InputError("rigidity without --h2 requires the quadric (A = 0)");
            }
            f = factor_quadric_embedding(E1, M);
        }
    } catch (const EmbeddingError &e) {
        r["factorization"] = nullptr;
        r["failure"] = e.what();
        return exit_negative;
    }
    Json j;
    j["T"] = automorphism_to_json(f.T);
    j["linear"] = map_to_json(f.linear);
    j["unitary_match"] = matrix_to_json(f.unitary_match);
    r["factorization"] = std::move(j);
    r["residual_exact"] = f.residual_exact;
    r["sigma1"] = f.sigma1;
    r["sigma2"] = f.sigma2;
    r["k1"] = f.k1;
    r["k2"] = f.k2;
    r["hypothesis_holds"] = f.hypothesis_holds;
    r["is_linear_embedding"] = f.is_linear_embedding;
    r["is_linear_embedding_minus"] = f.is_linear_embedding_minus;
    return f.residual_exact ? exit_ok : exit_negative;
}

int cmd_normalize_map(const RunConfig &c, Json &r)
{
    HypersurfaceModel M = read_model(c, need_path(c.model, "--model"));
    QuadricEmbedding E = read_embedding(need_path(c.h1, "--h"), M, "h");
    NormalizedEmbedding ne;
    try {
        ne = normalize_embedding(E, M);
    } catch (const EmbeddingError &e) {
        throw PreconditionError(std::string("normalization: ") + e.what());
    }
    r["normal_form"] = normalized_json(ne);
    r["induced_matches_model"] = M.graph ? Json(nullptr) : Json(induced_defining_series(ne) == M.A);
    return exit_ok;
}

int cmd_transform(const RunConfig &c, Json &r)
{
    RealSeries A = read_full_series(c, need_path(c.input.empty() ? c.series : c.input, "--input"));
    SignatureForm form = form_of(A.n(), need(c.ell, "--ell"));
    QuadricAutomorphism t =
        automorphism_from_json(read_json_file(need_path(c.automorphism, "--automorphism")), form, A.cap());
    RealSeries out;
    try {
        out = transform_defining(A, t);
    } catch (const SeriesError &e) {
        throw PreconditionError(std::string("transform: ") + e.what());
    }
    r["transformed"] = series_to_json(out);
    return exit_ok;
}

struct SweepOutcome {
    SharpnessReport report;
    std::size_t terms = 0;
};

int cmd_thm12_sweep(const RunConfig &c, Json &r)
{
    const int n = need(c.n, "--n");
    SignatureForm form = form_of(n, need(c.ell, "--ell"));
    const int D = c.degree.value_or(8);
    const int count = need(c.count, "--count");
    if (!c.seed) {
        throw InputError("missing required option --seed");
    }
    if (n < 2 || D < 4 || count < 0) {
        throw InputError("thm12-sweep needs n >= 2, --degree >= 4 and --count >= 0");
    }
    if (c.jobs < 1) {
        throw InputError("--jobs must be positive");
    }

    // Instances come from one sequential stream, so --jobs cannot change them.
    std::mt19937_64 rng(*c.seed);
    std::vector<RealSeries> instances;
    std::size_t zero_draws = 0, zero_draws_nonzero_series = 0;
    while (static_cast<int>(instances.size()) < count) {
        RealSeries A = random_s_tilde_member(rng, n, D, n - 1);
        if (restrict_to_quadric(A, form).is_zero()) {
            ++zero_draws;
            zero_draws_nonzero_series += !A.is_zero();
            continue;
        }
        instances.push_back(std::move(A));
    }

    std::vector<SweepOutcome> outcomes(instances.size());
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::string first_error;
    auto worker = [&] {
        for (std::size_t i = next++; i < instances.size(); i = next++) {
            try {
                outcomes[i].report = verify_thm12_instance(instances[i], form);
                outcomes[i].terms = instances[i].terms().size();
            } catch (const std::exception &e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (first_error.empty()) {
                    first_error = "instance " + std::to_string(i) + ": " + e.what();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (int j = 1; j < std::min<int>(c.jobs, count); ++j) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &t : pool) {
        t.join();
    }
    if (!first_error.empty()) {
        throw std::logic_error(first_error);
    }

    Json rows = Json::array();
    std::size_t verified = 0, violations = 0;
    std::map<int, std::size_t> by_sigma;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const SharpnessReport &rep = outcomes[i].report;
        bool ok = rep.status == SharpnessStatus::inconsistent && rep.certificate_verified;
        verified += ok;
        violations += rep.status == SharpnessStatus::violation;
        by_sigma[rep.sigma]++;
        rows.push_back(Json{{"index", i},
                            {"terms", outcomes[i].terms},
                            {"status", to_string(rep.status)},
                            {"sigma", rep.sigma},
                            {"certificate_verified", rep.certificate_verified},
                            {"certificate_support", rep.certificate_support}});
    }
    Json hist = Json::array();
    for (const auto &[s, k] : by_sigma) {
        hist.push_back(Json{{"sigma", s}, {"count", k}});
    }
    r["instances"] = std::move(rows);
    r["count"] = count;
    r["verified_certificates"] = verified;
    r["violations"] = violations;
    r["inconsistent_degree_histogram"] = std::move(hist);
    r["zero_restriction_draws"] = zero_draws;
    r["zero_restriction_with_nonzero_series"] = zero_draws_nonzero_series;
    bool pass = static_cast<int>(verified) == count && violations == 0 && zero_draws_nonzero_series == 0;
    r["all_verified"] = pass;
    return pass ? exit_ok : exit_negative;
}

using Handler = int (*)(const RunConfig &, Json &);

const std::map<std::string, Handler> &handlers()
{
    static const std::map<std::string, Handler> h = {
        {"analyze", cmd_analyze},           {"decompose", cmd_decompose},       {"embed", cmd_embed},
        {"restrict", cmd_restrict},         {"cm-solve", cmd_cm_solve},         {"cm-kernel", cmd_cm_kernel},
        {"equiv-verify", cmd_equiv_verify}, {"rigidity", cmd_rigidity},         {"normalize-map", cmd_normalize_map},
        {"transform", cmd_transform},       {"thm12-sweep", cmd_thm12_sweep},
    };
    return h;
}

Json error_json(const char *type, const std::string &message)
{
    return Json{{"type", type}, {"message", message}};
}

} // namespace

RunResult run(const RunConfig &config)
{
    RunResult out;
    out.report["command"] = config.command;
    out.report["regime"] = "exact";
    out.report["provenance"] = provenance(config);
    Json result = Json::object();
    auto it = handlers().find(config.command);
    try {
        if (it == handlers().end()) {
            throw InputError("unknown command '" + config.command + "'");
        }
        out.exit_code = it->second(config, result);
        out.report["result"] = std::move(result);
        return out;
    } catch (const InputError &e) {
        out.report["error"] = error_json("input", e.what());
    } catch (const PreconditionError &e) {
        out.report["error"] = error_json("precondition", e.what());
    } catch (const std::invalid_argument &e) {
        out.report["error"] = error_json("precondition", e.what());
    } catch (const SeriesError &e) {
        out.report["error"] = error_json("precondition", e.what());
    } catch (const AutomorphismError &e) {
        out.report["error"] = error_json("precondition", e.what());
    } catch (const EmbeddingError &e) {
        out.report["error"] = error_json("precondition", e.what());
    } catch (const std::exception &e) {
        out.report["error"] = error_json("internal", e.what());
    }
    out.exit_code = exit_input_error;
    return out;
}

std::string render_report(const Json &report) { return report.dump(2) + "\n"; }

} // namespace hyperq
