#include "diagkit/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace diagkit::io {

namespace {

json number_or_inf(double x) {
    if (std::isinf(x)) return "inf";
    return x;
}

std::size_t count_field(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_unsigned()) {
        throw FormatError(std::string("expected nonnegative integer field '") + key + "'");
    }
    return j[key].get<std::size_t>();
}

std::vector<Vector> vector_list(const json& j, std::size_t dim, const char* key) {
    if (!j.contains(key) || !j[key].is_array()) throw FormatError(std::string("expected array field '") + key + "'");
    std::vector<Vector> out;
    for (const auto& v : j[key]) {
        auto values = complex_list_from_json(v);
        if (values.size() != dim) throw FormatError(std::string("vector in '") + key + "' has wrong dimension");
        out.push_back(std::move(values));
    }
    return out;
}

}  // namespace

json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw FormatError("expected a number or [re, im], got " + j.dump());
}

json to_json(std::span<const Complex> values) {
    json out = json::array();
    for (const auto& z : values) out.push_back(to_json(z));
    return out;
}

std::vector<Complex> complex_list_from_json(const json& j) {
    if (!j.is_array()) throw FormatError("expected a list of complex values");
    std::vector<Complex> out;
    out.reserve(j.size());
    for (const auto& x : j) out.push_back(complex_from_json(x));
    return out;
}

json to_json(const ComplexMatrix& m) {
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", to_json(m.data())}};
}

ComplexMatrix matrix_from_json(const json& j) {
    if (!j.is_object()) throw FormatError("matrix must be a JSON object");
    const std::size_t rows = count_field(j, "rows");
    const std::size_t cols = count_field(j, "cols");
    if (!j.contains("data")) throw FormatError("matrix is missing 'data'");
    auto data = complex_list_from_json(j["data"]);
    if (data.size() != rows * cols) throw FormatError("matrix data length does not match rows * cols");
    return ComplexMatrix::from_data(rows, cols, std::move(data));
}

json to_json(const OrthonormalBasis& b) {
    json j = to_json(b.columns());
    j["kind"] = "basis";
    return j;
}

OrthonormalBasis basis_from_json(const json& j, double tol) { return OrthonormalBasis(matrix_from_json(j), tol); }

json to_json(const Certificate& c) {
    json j = {{"idempotency_residual", c.idempotency_residual},
              {"unitarity_residual", c.unitarity_residual},
              {"diagonal_residual", c.diagonal_residual},
              {"norm_observed", c.norm_observed}};
    j["norm_bound_claimed"] = c.norm_bound_claimed ? json(*c.norm_bound_claimed) : json(nullptr);
    j["similarity_condition"] = c.similarity_condition ? json(*c.similarity_condition) : json(nullptr);
    return j;
}

json summary_json(const synth::SynthesisResult& r) {
    json labels = json::array();
    for (auto l : r.labels) labels.push_back(std::string(synth::to_string(l)));
    return {{"dim", r.d.rows()},
            {"processed", r.processed},
            {"target", to_json(r.target)},
            {"labels", labels},
            {"realized", to_json(diagonal_of(r.d, r.b))}};
}

DiagonalRequest diagonal_request_from_json(const json& j) {
    DiagonalRequest req;
    if (j.is_array() || j.is_number()) {
        req.values = j.is_number() ? std::vector<Complex>{complex_from_json(j)} : complex_list_from_json(j);
        return req;
    }
    if (!j.is_object() || !j.contains("values")) throw FormatError("diagonal request needs 'values'");
    req.values = complex_list_from_json(j["values"]);
    if (j.contains("kind")) req.kind = j["kind"].get<std::string>();
    if (j.contains("truncation")) {
        const auto& t = j["truncation"];
        if (t.contains("blocks")) req.blocks = count_field(t, "blocks");
        if (t.contains("partition")) req.partition = count_field(t, "partition");
        if (t.contains("depth")) req.depth = count_field(t, "depth");
    }
    return req;
}

json to_json(const classify::SequenceSpec& s) {
    json tail = {{"kind", std::string(classify::to_string(s.tail))}};
    if (s.flags) {
        tail["in_l1"] = s.flags->in_l1;
        tail["in_l2"] = s.flags->in_l2;
        tail["sup"] = s.flags->sup;
    }
    return {{"head", to_json(s.head)}, {"tail", tail}};
}

classify::SequenceSpec sequence_from_json(const json& j) {
    if (!j.is_object()) throw FormatError("sequence must be a JSON object");
    classify::SequenceSpec s;
    if (j.contains("head")) s.head = complex_list_from_json(j["head"]);
    if (!j.contains("tail")) return s;
    const auto& t = j["tail"];
    const std::string name = t.is_string() ? t.get<std::string>() : t.value("kind", std::string("class_flags"));
    const auto kind = classify::tail_kind_from_string(name);
    if (!kind) throw FormatError("unknown tail kind '" + name + "'");
    s.tail = *kind;
    if (t.is_object() && (t.contains("in_l1") || t.contains("in_l2"))) {
        classify::ClassFlags f;
        f.in_l1 = t.value("in_l1", false);
        f.in_l2 = t.value("in_l2", f.in_l1);
        f.sup = t.contains("sup") && t["sup"].is_number() ? t["sup"].get<double>() : 0.0;
        s.flags = f;
    }
    return s;
}

json to_json(const classify::KadisonVerdict& v) {
    json j = {{"feasible", v.feasible}, {"a", number_or_inf(v.a)}, {"b", number_or_inf(v.b)}, {"ambiguous", v.ambiguous}};
    j["index"] = v.index ? json(*v.index) : json(nullptr);
    return j;
}

json to_json(const classify::TraceShape& s) {
    json j = {{"shape", std::string(classify::to_string(s.kind))}};
    if (s.kind == classify::TraceShape::Kind::point) j["value"] = to_json(s.value);
    return j;
}

json to_json(const classify::CanonicalDecomposition& d) {
    return {{"ker_dim", d.ker_dim},
            {"coker_dim", d.coker_dim},
            {"t_rank", d.t_rank},
            {"T", to_json(d.t)},
            {"four_block", to_json(d.four_block)},
            {"t_polar", to_json(d.t_polar)},
            {"two_block_basis", to_json(d.two_block_basis)},
            {"four_block_basis", to_json(d.four_block_basis)}};
}

json to_json(const frames::FramePair& p) {
    json x = json::array();
    json y = json::array();
    for (const auto& v : p.x) x.push_back(to_json(v));
    for (const auto& v : p.y) y.push_back(to_json(v));
    return {{"dim", p.dim}, {"x", x}, {"y", y}};
}

frames::FramePair frame_pair_from_json(const json& j) {
    if (!j.is_object()) throw FormatError("frame pair must be a JSON object");
    frames::FramePair p;
    p.dim = count_field(j, "dim");
    p.x = vector_list(j, p.dim, "x");
    p.y = vector_list(j, p.dim, "y");
    if (p.x.size() != p.y.size()) throw FormatError("frame pair: x and y differ in length");
    return p;
}

json to_json(const rebase::BootstrapPlan& p) {
    return {{"r", to_json(p.r)}, {"d", to_json(p.d)}, {"lambda", p.lambda}};
}

json to_json(const rebase::ZeroDiagPlan& p) {
    return {{"d", p.d},
            {"theta", p.theta},
            {"m", p.m},
            {"groups", p.groups},
            {"group_sums", to_json(p.group_sums)},
            {"unprocessed", p.unprocessed}};
}

json load_argument(const std::string& arg) {
    std::string text = arg;
    if (!arg.empty() && arg.front() == '@') {
        std::ifstream in(arg.substr(1));
        if (!in) throw FormatError("cannot read " + arg.substr(1));
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace diagkit::io
