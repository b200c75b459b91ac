#ifndef HYPERQ_IO_HPP
#define HYPERQ_IO_HPP

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include <hyperq/embedding.hpp>
#include <hyperq/linalg.hpp>
#include <hyperq/quadric.hpp>
#include <hyperq/series.hpp>

namespace hyperq
{

// Insertion-ordered so that reports are byte-identical across runs.
using Json = nlohmann::ordered_json;

class InputError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Parse errors are reported as "<source>:<line>:<col>: <reason>".
Json parse_json_text(const std::string &text, const std::string &source);
Json read_json_file(const std::string &path);

Json rational_to_json(const mpq_class &q);
mpq_class rational_from_json(const Json &j, const std::string &where);
// ["re", "im"]
Json gauss_to_json(const GaussRat &x);
GaussRat gauss_from_json(const Json &j, const std::string &where);
Json matrix_to_json(const GMatrix &m);
GMatrix matrix_from_json(const Json &j, const std::string &where);

// {"n", "D", "kind", "terms": [{"alpha", "beta", "gamma", "delta", "re", "im"}]}
// with kind "holo", "real" or "complex". Holomorphic terms omit beta and
// delta. Trace-form series carry "form": "trace"; gamma is then the power of u.
Json series_to_json(const HoloSeries &f);
Json series_to_json(const RealSeries &A);
Json series_to_json(const BiSeries &A);
HoloSeries holo_from_json(const Json &j, const std::string &where = "series");
RealSeries real_from_json(const Json &j, const std::string &where = "series");

// {"kind": "map", "n", "D", "components": [holo series, ...]}
Json map_to_json(const HoloMap &H);
HoloMap map_from_json(const Json &j, const std::string &where = "map");

// {"lam", "r", "a": [[re, im], ...], "U": [[[re, im], ...], ...], "sigma"}.
// Optional "n", "ell" and "D" must agree with the supplied form and cap.
Json automorphism_to_json(const QuadricAutomorphism &t);
QuadricAutomorphism automorphism_from_json(const Json &j, const SignatureForm &form, int D);

// {"kind": "model", "ell", "graph", "A": real series}. A bare real series is
// accepted when ell is supplied.
Json model_to_json(const HypersurfaceModel &M);
HypersurfaceModel model_from_json(const Json &j, std::optional<int> ell = std::nullopt);

// {"kind": "embedding", "target_ell", "map": map}
Json embedding_to_json(const QuadricEmbedding &E);
QuadricEmbedding embedding_from_json(const Json &j, const std::string &where = "embedding");

} // namespace hyperq

#endif
