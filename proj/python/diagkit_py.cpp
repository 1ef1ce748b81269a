#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "diagkit/classify.hpp"
#include "diagkit/cli.hpp"
#include "diagkit/frames.hpp"
#include "diagkit/numrange.hpp"
#include "diagkit/rebase.hpp"
#include "diagkit/synth.hpp"

namespace py = pybind11;
using namespace diagkit;

namespace {

using CArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

ComplexMatrix to_matrix(const CArray& a) {
    if (a.ndim() != 2) throw ShapeError("expected a 2-d array");
    const auto rows = static_cast<std::size_t>(a.shape(0));
    const auto cols = static_cast<std::size_t>(a.shape(1));
    return ComplexMatrix::from_data(rows, cols, std::vector<Complex>(a.data(), a.data() + rows * cols));
}

CArray to_array(const ComplexMatrix& m) {
    CArray out({m.rows(), m.cols()});
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out;
}

CArray to_array(const Vector& v) {
    CArray out(v.size());
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

std::vector<Vector> rows_of(const CArray& a) {
    const auto m = to_matrix(a);
    std::vector<Vector> out;
    for (std::size_t i = 0; i < m.rows(); ++i) out.emplace_back(m.row(i).begin(), m.row(i).end());
    return out;
}

CArray stack(const std::vector<Vector>& vs, std::size_t dim) {
    ComplexMatrix m(vs.size(), dim);
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = 0; j < dim; ++j) m(i, j) = vs[i][j];
    return to_array(m);
}

py::dict certificate(const Certificate& c) {
    py::dict d;
    d["idempotency_residual"] = c.idempotency_residual;
    d["unitarity_residual"] = c.unitarity_residual;
    d["diagonal_residual"] = c.diagonal_residual;
    d["norm_observed"] = c.norm_observed;
    d["norm_bound_claimed"] = c.norm_bound_claimed ? py::cast(*c.norm_bound_claimed) : py::none();
    d["similarity_condition"] = c.similarity_condition ? py::cast(*c.similarity_condition) : py::none();
    d["passes"] = c.passes();
    return d;
}

py::dict synthesis(const synth::SynthesisResult& r) {
    py::dict d;
    d["matrix"] = to_array(r.d);
    d["basis"] = to_array(r.b.columns());
    d["processed"] = r.processed;
    d["target"] = r.target;
    std::vector<std::string> labels;
    for (auto l : r.labels) labels.emplace_back(synth::to_string(l));
    d["labels"] = labels;
    d["certificate"] = certificate(r.cert);
    return d;
}

synth::Route route_from(const std::string& name) {
    if (name == "fan") return synth::Route::fan;
    if (name == "gkl") return synth::Route::gkl;
    throw py::value_error("route must be 'fan' or 'gkl'");
}

classify::SequenceSpec sequence(std::vector<Complex> head, const std::string& tail, std::optional<bool> in_l1,
                                std::optional<bool> in_l2, double sup) {
    classify::SequenceSpec s;
    s.head = std::move(head);
    const auto kind = classify::tail_kind_from_string(tail);
    if (!kind) throw py::value_error("unknown tail kind '" + tail + "'");
    s.tail = *kind;
    if (in_l1 || in_l2) s.flags = classify::ClassFlags{in_l1.value_or(false), in_l2.value_or(in_l1.value_or(false)), sup};
    return s;
}

}  // namespace

PYBIND11_MODULE(_diagkit, m) {
    m.doc() = "Idempotent operators with prescribed diagonals";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_ValueError);
    py::register_exception<SpecificationError>(m, "SpecificationError", PyExc_ValueError);

    m.def("idem_2x2_diag", [](Complex d) { return synthesis(synth::idem_2x2_diag(d)); }, py::arg("d"));
    m.def("idem_constant_diag", [](Complex d, std::size_t blocks) { return synthesis(synth::idem_constant_diag(d, blocks)); },
          py::arg("d"), py::arg("blocks"));
    m.def("idem_infinite_multiplicity",
          [](std::vector<Complex> d, std::size_t index, std::size_t depth) {
              return synthesis(synth::idem_infinite_multiplicity(d, index, depth));
          },
          py::arg("d"), py::arg("index"), py::arg("depth") = 3);
    m.def("idem_bounded_diag",
          [](std::vector<Complex> d, std::size_t partition, std::size_t depth) {
              return synthesis(synth::idem_bounded_diag(d, partition, depth));
          },
          py::arg("d"), py::arg("partition") = 4, py::arg("depth") = 3);
    m.def("idem_rank_one", [](std::vector<Complex> d) { return synthesis(synth::idem_rank_one(d)); }, py::arg("d"));
    m.def("idem_matrix_exact", [](std::vector<Complex> d) { return synthesis(synth::idem_matrix_exact(d)); }, py::arg("d"));
    m.def("idem_finite_rank",
          [](std::vector<Complex> d, const std::string& route) {
              return synthesis(synth::idem_finite_rank(d, route_from(route)));
          },
          py::arg("d"), py::arg("route") = "fan");

    m.def("zero_diagonal_basis", [](const CArray& x) { return to_array(numrange::zero_diagonal_basis(to_matrix(x)).columns()); },
          py::arg("x"));
    m.def("fan_pair",
          [](const CArray& a, double lam) {
              const auto mat = to_matrix(a);
              if (mat.rows() != 2 || mat.cols() != 2) throw ShapeError("fan_pair needs a 2x2 matrix");
              const auto p = numrange::fan_pair(mat, numrange::SegmentTarget::from_lambda(mat(0, 0), mat(1, 1), lam));
              return py::make_tuple(to_array(p.b), to_array(p.f));
          },
          py::arg("a"), py::arg("lam"));
    m.def("rotation_diagonal",
          [](double d, double theta) {
              const auto r = numrange::rotation_diagonal(d, theta);
              return py::make_tuple(r.diag_hi, r.diag_lo);
          },
          py::arg("d"), py::arg("theta"));

    m.def("kadison_feasibility",
          [](std::vector<Complex> head, const std::string& tail, std::optional<bool> in_l1, std::optional<bool> in_l2,
             double sup) {
              const auto v = classify::kadison_feasibility(sequence(std::move(head), tail, in_l1, in_l2, sup));
              py::dict d;
              d["feasible"] = v.feasible;
              d["a"] = v.a;
              d["b"] = v.b;
              d["index"] = v.index ? py::cast(*v.index) : py::none();
              d["ambiguous"] = v.ambiguous;
              return d;
          },
          py::arg("head"), py::arg("tail") = "zeros", py::arg("in_l1") = py::none(), py::arg("in_l2") = py::none(),
          py::arg("sup") = 0.0);
    m.def("projection_with_diagonal", [](std::vector<double> d) { return to_array(classify::projection_with_diagonal(d)); },
          py::arg("d"));
    m.def("zero_diagonalizable", [](const CArray& d) { return classify::zero_diagonalizable(to_matrix(d)); }, py::arg("d"));
    m.def("trace_shape",
          [](const CArray& d) {
              const auto s = classify::trace_shape(to_matrix(d));
              return py::make_tuple(std::string(classify::to_string(s.kind)),
                                    s.kind == classify::TraceShape::Kind::point ? py::cast(s.value) : py::none());
          },
          py::arg("d"));
    m.def("canonical_decomposition",
          [](const CArray& d) {
              const auto c = classify::canonical_decomposition(to_matrix(d));
              py::dict out;
              out["ker_dim"] = c.ker_dim;
              out["coker_dim"] = c.coker_dim;
              out["t_rank"] = c.t_rank;
              out["t"] = to_array(c.t);
              out["four_block"] = to_array(c.four_block);
              out["t_polar"] = to_array(c.t_polar);
              out["two_block_basis"] = to_array(c.two_block_basis.columns());
              out["four_block_basis"] = to_array(c.four_block_basis.columns());
              return out;
          },
          py::arg("d"));
    m.def("herm_part_spectrum_2x2",
          [](Complex z, double theta) {
              const auto p = classify::herm_part_spectrum_2x2(z, theta);
              return py::make_tuple(p.plus, p.minus);
          },
          py::arg("z"), py::arg("theta"));

    m.def("cross_gramian",
          [](const CArray& x, const CArray& y) {
              frames::FramePair p;
              p.x = rows_of(x);
              p.y = rows_of(y);
              p.dim = p.x.empty() ? 0 : p.x.front().size();
              return to_array(frames::cross_gramian(p));
          },
          py::arg("x"), py::arg("y"));
    m.def("canonical_dual",
          [](const CArray& x) {
              const auto xs = rows_of(x);
              const std::size_t dim = xs.empty() ? 0 : xs.front().size();
              return stack(frames::canonical_dual(dim, xs).y, dim);
          },
          py::arg("x"));
    m.def("extract_frames",
          [](const CArray& d) {
              const auto e = frames::extract_frames(to_matrix(d));
              return py::make_tuple(stack(e.pair.x, e.pair.dim), stack(e.pair.y, e.pair.dim), e.condition);
          },
          py::arg("d"));

    m.def("run_cli",
          [](const std::vector<std::string>& args) {
              std::ostringstream out;
              std::ostringstream err;
              const int code = cli::run(args, out, err);
              return py::make_tuple(code, out.str(), err.str());
          },
          py::arg("args"));
}
