#include <gtest/gtest.h>

#include <hyperq/generators.hpp>
#include <hyperq/io.hpp>

using namespace hyperq;

namespace
{

std::string error_of(const std::function<void()> &f)
{
    try {
        f();
    } catch (const InputError &e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST(Io, Rationals)
{
    EXPECT_EQ(rational_to_json(mpq_class(-3) / 6), "-1/2");
    EXPECT_EQ(rational_to_json(mpq_class(4)), "4/1");
    EXPECT_EQ(rational_from_json(Json("6/4"), "x"), mpq_class(3, 2));
    EXPECT_EQ(rational_from_json(Json(-7), "x"), mpq_class(-7));
    EXPECT_THROW(rational_from_json(Json("1/0"), "x"), InputError);
    EXPECT_THROW(rational_from_json(Json("abc"), "x"), InputError);
    EXPECT_THROW(rational_from_json(Json(0.5), "x"), InputError);
}

TEST(Io, SeriesRoundTrip)
{
    std::mt19937_64 rng(71);
    for (int rep = 0; rep < 5; ++rep) {
        HoloSeries f = random_holo(rng, 3, 6, 2, 6);
        EXPECT_EQ(holo_from_json(parse_json_text(series_to_json(f).dump(), "t")), f);
        RealSeries A = random_s_tilde_member(rng, 3, 6, 2);
        EXPECT_EQ(real_from_json(parse_json_text(series_to_json(A).dump(2), "t")), A);
        RealSeries T = restrict_to_quadric(A, SignatureForm::standard(3, 1));
        Json jt = series_to_json(T);
        EXPECT_EQ(jt["form"], "trace");
        EXPECT_EQ(real_from_json(jt), T);
    }
}

TEST(Io, SpecExampleFormat)
{
    Json j = parse_json_text(R"({"n":2,"D":6,"kind":"real","terms":[
        {"alpha":[1,0],"beta":[1,0],"gamma":0,"delta":0,"re":"1/1","im":"0/1"}]})",
                             "t");
    RealSeries A = real_from_json(j);
    EXPECT_EQ(A.coeff(BiKey{{1, 0}, {1, 0}, 0, 0}), GaussRat(1));
    EXPECT_EQ(series_to_json(A).dump(), j.dump());
}

TEST(Io, ParseErrorsCarryLineAndColumn)
{
    std::string msg = error_of([] { parse_json_text("{\n  \"n\": 2,\n  \"D\": ,\n}", "in.json"); });
    EXPECT_EQ(msg.rfind("in.json:3:", 0), 0u) << msg;
    EXPECT_NE(msg.find("malformed JSON"), std::string::npos);
    EXPECT_THROW(read_json_file("/nonexistent/file.json"), InputError);
}

TEST(Io, SemanticErrorsNameTheField)
{
    Json j = parse_json_text(R"({"n":2,"D":4,"kind":"holo","terms":[{"alpha":[1],"gamma":0,"re":"1"}]})", "t");
    EXPECT_NE(error_of([&] { holo_from_json(j); }).find("series.terms[0].alpha"), std::string::npos);
    j["terms"][0]["alpha"] = Json::array({3, 0});
    j["terms"][0]["gamma"] = 1;
    EXPECT_NE(error_of([&] { holo_from_json(j); }).find("exceeds D"), std::string::npos);
    j["terms"][0]["gamma"] = 0;
    j["terms"].push_back(j["terms"][0]);
    EXPECT_NE(error_of([&] { holo_from_json(j); }).find("duplicate"), std::string::npos);
    Json nonreal = parse_json_text(
        R"({"n":1,"D":4,"kind":"real","terms":[{"alpha":[2],"beta":[1],"gamma":0,"delta":0,"re":"1","im":"0"}]})", "t");
    EXPECT_NE(error_of([&] { real_from_json(nonreal); }).find("not a real series"), std::string::npos);
    Json missing = parse_json_text(R"({"n":1,"kind":"real","terms":[]})", "t");
    EXPECT_NE(error_of([&] { real_from_json(missing); }).find("missing field 'D'"), std::string::npos);
    EXPECT_THROW(real_from_json(series_to_json(HoloSeries(1, 2))), InputError);
}

TEST(Io, MapAndEmbeddingRoundTrip)
{
    std::mt19937_64 rng(72);
    HoloMap H = random_automorphism(SignatureForm::standard(2, 1), 1, 4, rng).jet;
    EXPECT_EQ(map_from_json(map_to_json(H)), H);
    HypersurfaceModel M{SignatureForm::standard(2, 0), random_h_member(rng, 2, 6, 1, 0), false};
    QuadricEmbedding E = build_embedding(M);
    QuadricEmbedding back = embedding_from_json(embedding_to_json(E));
    EXPECT_EQ(back.H, E.H);
    EXPECT_EQ(back.target, E.target);
    EXPECT_EQ(back.sigma, E.sigma);
    Json bad = embedding_to_json(E);
    bad["target_ell"] = 3;
    EXPECT_THROW(embedding_from_json(bad), InputError);
}

TEST(Io, AutomorphismRoundTrip)
{
    std::mt19937_64 rng(73);
    SignatureForm form = SignatureForm::standard(2, 1);
    for (int sigma : {1, -1}) {
        QuadricAutomorphism t = random_automorphism(form, sigma, 6, rng);
        QuadricAutomorphism back = automorphism_from_json(parse_json_text(automorphism_to_json(t).dump(), "t"), form, 6);
        EXPECT_EQ(back.jet, t.jet);
        EXPECT_EQ(back.sigma, sigma);
    }
    Json j = automorphism_to_json(identity_automorphism(form, 4));
    j["U"][0][0] = Json::array({"2/1", "0/1"});
    EXPECT_NE(error_of([&] { automorphism_from_json(j, form, 4); }).find("automorphism"), std::string::npos);
    Json k = automorphism_to_json(identity_automorphism(form, 4));
    EXPECT_THROW(automorphism_from_json(k, SignatureForm::standard(3, 1), 4), InputError);
    k["sigma"] = 2;
    EXPECT_THROW(automorphism_from_json(k, form, 4), InputError);
}

TEST(Io, Models)
{
    std::mt19937_64 rng(74);
    HypersurfaceModel M{SignatureForm::standard(3, 1), random_h_member(rng, 3, 6, 2, 1), false};
    HypersurfaceModel back = model_from_json(model_to_json(M));
    EXPECT_EQ(back.A, M.A);
    EXPECT_EQ(back.form, M.form);
    HypersurfaceModel bare = model_from_json(series_to_json(M.A), 1);
    EXPECT_EQ(bare.form, M.form);
    EXPECT_THROW(model_from_json(series_to_json(M.A)), InputError);
    EXPECT_THROW(model_from_json(model_to_json(M), 0), InputError);
    Json j = model_to_json(M);
    j["ell"] = 2;
    EXPECT_THROW(model_from_json(j), InputError);
}
