#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "diagkit/classify.hpp"
#include "diagkit/core.hpp"
#include "diagkit/frames.hpp"
#include "diagkit/rebase.hpp"
#include "diagkit/synth.hpp"

namespace diagkit::io {

using json = nlohmann::json;

inline constexpr const char* kSchema = "diagkit/1";

/// Malformed JSON document or field.
class FormatError : public Error {
public:
    using Error::Error;
};

json to_json(Complex z);
/// Accepts a number or [re, im].
Complex complex_from_json(const json& j);

json to_json(std::span<const Complex> values);
std::vector<Complex> complex_list_from_json(const json& j);

/// {"rows", "cols", "data": [[re, im], ...]} row-major.
json to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

/// Matrix JSON with "kind": "basis".
json to_json(const OrthonormalBasis& b);
OrthonormalBasis basis_from_json(const json& j, double tol = Tolerances{}.unitary);

json to_json(const Certificate& c);

/// Report fields of a synthesis (matrix and basis are written separately).
json summary_json(const synth::SynthesisResult& r);

struct DiagonalRequest {
    std::vector<Complex> values;
    std::string kind;
    std::optional<std::size_t> blocks;
    std::optional<std::size_t> partition;
    std::optional<std::size_t> depth;
};

/// Accepts a bare value list or {"values", "kind", "truncation": {"blocks", "partition", "depth"}}.
DiagonalRequest diagonal_request_from_json(const json& j);

json to_json(const classify::SequenceSpec& s);
classify::SequenceSpec sequence_from_json(const json& j);

json to_json(const classify::KadisonVerdict& v);
json to_json(const classify::TraceShape& s);
json to_json(const classify::CanonicalDecomposition& d);

json to_json(const frames::FramePair& p);
frames::FramePair frame_pair_from_json(const json& j);

json to_json(const rebase::BootstrapPlan& p);
json to_json(const rebase::ZeroDiagPlan& p);

/// Parses inline JSON, or the contents of a file when the argument starts with '@'.
json load_argument(const std::string& arg);

}  // namespace diagkit::io
