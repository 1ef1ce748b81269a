#include "diagkit/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "diagkit/io.hpp"

namespace diagkit::cli {

namespace {

using io::json;

class UsageError : public Error {
public:
    using Error::Error;
};

struct Options {
    std::string diag;
    std::vector<std::string> seq;
    std::string matrix;
    std::string basis;
    std::string frames;
    std::string pairs;
    std::string targets;
    std::string indices;
    std::string limit;
    std::string out;
    std::string basis_out;
    std::optional<std::size_t> blocks;
    std::optional<std::size_t> partition;
    std::optional<std::size_t> depth;
    std::size_t index = 0;
    std::string route = "fan";
    std::optional<double> bound;
    double tol = 1e-9;
    std::uint64_t seed = 0;
    std::size_t random = 0;
    std::size_t dim = 2;
    bool force = false;
    bool as_json = false;
};

struct Check {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    bool ok() const { return value <= limit; }
};

struct Report {
    std::string command;
    std::optional<Certificate> cert;
    std::vector<Check> checks;
    std::size_t processed = 0;
    std::vector<std::string> warnings;
    json result = json::object();
    std::vector<std::pair<std::string, json>> files;
    bool infeasible = false;
};

// Loads JSON arguments and records their text for the input digest.
class Inputs {
public:
    explicit Inputs(const std::vector<std::string>& args) {
        for (const auto& a : args) text_ += a + '\n';
    }

    json load(const std::string& arg, const char* what) {
        if (arg.empty()) throw UsageError(std::string("missing ") + what);
        std::string text = arg;
        if (arg.front() == '@') {
            std::ifstream in(arg.substr(1));
            if (!in) throw UsageError("cannot read " + arg.substr(1));
            std::ostringstream ss;
            ss << in.rdbuf();
            text = ss.str();
        }
        text_ += text + '\n';
        return io::load_argument(text);
    }

    std::string digest() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
        for (unsigned char c : text_) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        std::ostringstream ss;
        ss << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
        return ss.str();
    }

private:
    std::string text_;
};

Tolerances tolerances(const Options& o) { return {Tolerances{}.unitary, o.tol, o.tol}; }

Certificate worst(const Certificate& a, const Certificate& b) {
    Certificate c = a;
    c.idempotency_residual = std::max(a.idempotency_residual, b.idempotency_residual);
    c.unitarity_residual = std::max(a.unitarity_residual, b.unitarity_residual);
    c.diagonal_residual = std::max(a.diagonal_residual, b.diagonal_residual);
    c.norm_observed = std::max(a.norm_observed, b.norm_observed);
    if (b.similarity_condition)
        c.similarity_condition = std::max(a.similarity_condition.value_or(1.0), *b.similarity_condition);
    return c;
}

void add_outputs(Report& rep, const Options& o, const synth::SynthesisResult& r) {
    if (!o.out.empty()) rep.files.emplace_back(o.out, io::to_json(r.d));
    if (!o.basis_out.empty()) rep.files.emplace_back(o.basis_out, io::to_json(r.b));
}

void note_synthesis(Report& rep, const synth::SynthesisResult& r) {
    rep.cert = r.cert;
    rep.processed = r.processed;
    rep.result = io::summary_json(r);
    const auto fills = std::count(r.labels.begin(), r.labels.end(), synth::EntryLabel::fill);
    const auto edges = std::count(r.labels.begin(), r.labels.end(), synth::EntryLabel::boundary);
    if (fills > 0) rep.warnings.push_back(std::to_string(fills) + " fill entries outside the requested prefix");
    if (edges > 0) rep.warnings.push_back(std::to_string(edges) + " boundary entries left by truncation");
    if (r.cert.similarity_condition) {
        std::ostringstream ss;
        ss << "similarity step near singular, condition " << *r.cert.similarity_condition;
        rep.warnings.push_back(ss.str());
    }
}

std::size_t single(const std::vector<Complex>& v, const char* who) {
    if (v.size() != 1) throw UsageError(std::string(who) + " takes exactly one diagonal value");
    return 0;
}

Report run_synth(const std::string& kind, const Options& o, Inputs& in) {
    const auto req = io::diagonal_request_from_json(in.load(o.diag, "--diag"));
    const auto& v = req.values;
    Report rep;
    rep.command = "synth " + kind;
    const std::size_t depth = o.depth.value_or(req.depth.value_or(3));
    if (kind == "finite-rank") {
        if (o.route != "fan" && o.route != "gkl" && o.route != "both") throw UsageError("--route must be fan, gkl or both");
        if (o.route != "both") {
            const auto r = synth::idem_finite_rank(v, o.route == "fan" ? synth::Route::fan : synth::Route::gkl);
            note_synthesis(rep, r);
            add_outputs(rep, o, r);
            return rep;
        }
        const auto fan = synth::idem_finite_rank(v, synth::Route::fan);
        const auto gkl = synth::idem_finite_rank(v, synth::Route::gkl);
        note_synthesis(rep, fan);
        rep.cert = worst(fan.cert, gkl.cert);
        const auto df = diagonal_of(fan.d, fan.b);
        const auto dg = diagonal_of(gkl.d, gkl.b);
        double diff = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) diff = std::max(diff, std::abs(df[i] - dg[i]));
        const std::size_t rank_fan = numerical_rank(fan.d);
        const std::size_t rank_gkl = numerical_rank(gkl.d);
        rep.result = {{"fan", io::summary_json(fan)},
                      {"gkl", io::summary_json(gkl)},
                      {"cross_check", {{"diagonal_difference", diff}, {"rank_fan", rank_fan}, {"rank_gkl", rank_gkl}}}};
        rep.checks.push_back({"route diagonal agreement", diff, o.tol * (1.0 + rep.cert->norm_observed)});
        rep.checks.push_back({"route rank agreement", rank_fan == rank_gkl ? 0.0 : 1.0, 0.0});
        if (!o.out.empty()) rep.files.emplace_back(o.out, json{{"fan", io::to_json(fan.d)}, {"gkl", io::to_json(gkl.d)}});
        if (!o.basis_out.empty())
            rep.files.emplace_back(o.basis_out, json{{"fan", io::to_json(fan.b)}, {"gkl", io::to_json(gkl.b)}});
        return rep;
    }

    synth::SynthesisResult r;
    if (kind == "two-by-two") {
        r = synth::idem_2x2_diag(v[single(v, "two-by-two")]);
    } else if (kind == "constant") {
        r = synth::idem_constant_diag(v[single(v, "constant")], o.blocks.value_or(req.blocks.value_or(3)));
    } else if (kind == "infinite-mult") {
        r = synth::idem_infinite_multiplicity(v, o.index, depth);
    } else if (kind == "bounded") {
        r = synth::idem_bounded_diag(v, o.partition.value_or(req.partition.value_or(4)), depth);
    } else if (kind == "rank-one") {
        r = synth::idem_rank_one(v);
    } else {
        r = synth::idem_matrix_exact(v);
    }
    note_synthesis(rep, r);
    add_outputs(rep, o, r);
    return rep;
}

rebase::PairList parse_pairs(const json& j) {
    rebase::PairList pairs;
    if (!j.is_array()) throw UsageError("--pairs must be a list of [i, j]");
    for (const auto& p : j) {
        if (!p.is_array() || p.size() != 2) throw UsageError("--pairs must be a list of [i, j]");
        pairs.emplace_back(p[0].get<std::size_t>(), p[1].get<std::size_t>());
    }
    return pairs;
}

Report run_rebase(const std::string& kind, const Options& o, Inputs& in) {
    Report rep;
    rep.command = "rebase " + kind;
    const ComplexMatrix t = io::matrix_from_json(in.load(o.matrix, "--matrix"));
    if (!t.square()) throw UsageError("--matrix must be square");
    const std::size_t n = t.rows();
    const double scale = 1.0 + operator_norm(t);

    if (kind == "zero-diag") {
        rebase::PairList pairs;
        if (!o.pairs.empty()) {
            pairs = parse_pairs(in.load(o.pairs, "--pairs"));
        } else {
            if (n % 2 != 0) throw UsageError("zero-diag without --pairs needs an even dimension");
            for (std::size_t i = 0; i < n / 2; ++i) pairs.emplace_back(i, n / 2 + i);
        }
        const auto pn = rebase::phase_normalize(t, pairs);
        const auto res = rebase::zero_diagonalize_idempotent(pn.matrix, pairs, o.blocks.value_or(pairs.size()));
        const auto basis = OrthonormalBasis::adopt(pn.basis.columns() * res.g.columns());
        const auto diag = diagonal_of(t, basis);
        Certificate c;
        c.idempotency_residual = idempotency_residual(t);
        c.unitarity_residual = basis.unitarity_residual();
        c.norm_observed = scale - 1.0;
        std::size_t covered = 0;
        for (const auto& grp : res.plan.groups) {
            covered += grp.size();
            for (std::size_t col : grp) c.diagonal_residual = std::max(c.diagonal_residual, std::abs(diag[col]));
        }
        rep.cert = c;
        rep.processed = covered;
        rep.result = {{"plan", io::to_json(res.plan)}, {"phases", io::to_json(pn.phases)}};
        if (!res.plan.unprocessed.empty())
            rep.warnings.push_back(std::to_string(res.plan.unprocessed.size()) + " basis vectors outside completed groups");
        if (!o.basis_out.empty()) rep.files.emplace_back(o.basis_out, io::to_json(basis));
        return rep;
    }

    const OrthonormalBasis e =
        o.basis.empty() ? OrthonormalBasis::standard(n) : io::basis_from_json(in.load(o.basis, "--basis"));
    if (e.dim() != n) throw UsageError("--basis dimension does not match --matrix");

    if (kind == "bootstrap-fan") {
        const auto r = diagonal_of(t, e);
        if (r.size() < 2) throw UsageError("bootstrap-fan needs at least two basis vectors");
        const auto plan = o.targets.empty()
                              ? rebase::BootstrapPlan::halving(r)
                              : rebase::BootstrapPlan::from_targets(r, io::complex_list_from_json(in.load(o.targets, "--targets")));
        const auto res = rebase::bootstrap_fan(t, e, plan);
        double identity = 0.0;
        for (std::size_t k = 1; k <= plan.steps(); ++k) {
            const Complex want = plan.r[k] + plan.previous(k) - plan.d[k - 1];
            identity = std::max(identity, std::abs(res.realized[k - 1] - want));
        }
        ComplexMatrix cols(n, res.b.size() + 1);
        cols.set_block(0, 0, res.b.columns());
        cols.set_column(res.b.size(), res.f);
        const auto out_basis = OrthonormalBasis::adopt(std::move(cols));
        rep.checks.push_back({"diagonal identity", identity, 1e-10 * scale});
        rep.checks.push_back({"span residual", res.span_residual, 1e-9});
        rep.checks.push_back({"unitarity", out_basis.unitarity_residual(), Tolerances{}.unitary});
        rep.processed = plan.steps();
        rep.result = {{"plan", io::to_json(plan)},
                      {"realized", io::to_json(res.realized)},
                      {"overlaps", res.overlaps},
                      {"f_diagonal", io::to_json(diagonal_of(t, OrthonormalBasis::adopt(
                                                                    ComplexMatrix::from_columns(std::vector<Vector>{res.f}, n))))}};
        if (!o.basis_out.empty()) rep.files.emplace_back(o.basis_out, io::to_json(out_basis));
        return rep;
    }

    // abs-sum
    if (!e.full()) throw UsageError("abs-sum needs a full basis");
    const Complex limit = io::complex_from_json(in.load(o.limit, "--limit"));
    const auto diag = diagonal_of(t, e);
    rebase::PartialSumTrace trace_info;
    if (o.indices.empty()) {
        trace_info = rebase::PartialSumTrace::derive(diag, limit);
    } else {
        const auto j = in.load(o.indices, "--indices");
        trace_info = rebase::PartialSumTrace::with_indices(diag, j.get<std::vector<std::size_t>>(), limit);
    }
    const auto res = rebase::absolutely_summable_rebasis(t, e, trace_info);
    rep.checks.push_back({"absolute diagonal sum minus bound", res.abs_sum - res.bound, 1e-8});
    rep.checks.push_back({"unitarity", res.basis.unitarity_residual(), Tolerances{}.unitary});
    rep.processed = res.processed;
    rep.result = {{"indices", trace_info.n},
                  {"segment_values", io::to_json(res.segment_values)},
                  {"abs_sum", res.abs_sum},
                  {"bound", res.bound},
                  {"truncated", res.truncated}};
    if (res.truncated) rep.warnings.push_back("some n_k exceed the dimension; later segments dropped");
    if (!o.basis_out.empty()) rep.files.emplace_back(o.basis_out, io::to_json(res.basis));
    return rep;
}

classify::SequenceSpec parse_sequence(const Options& o, Inputs& in) {
    if (o.seq.empty()) throw UsageError("missing --seq");
    if (o.seq.size() == 1 && (o.seq[0].starts_with('{') || o.seq[0].starts_with('@'))) {
        return io::sequence_from_json(in.load(o.seq[0], "--seq"));
    }
    json spec = json::object();
    json tail = json::object();
    for (const auto& token : o.seq) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) throw UsageError("--seq expects key=value tokens, got '" + token + "'");
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "head") {
            spec["head"] = in.load(value, "head");
        } else if (key == "tail") {
            tail["kind"] = value;
        } else if (key == "in_l1" || key == "in_l2") {
            if (value != "true" && value != "false") throw UsageError(key + " must be true or false");
            tail[key] = value == "true";
        } else if (key == "sup") {
            tail["sup"] = std::stod(value);
        } else {
            throw UsageError("unknown --seq key '" + key + "'");
        }
    }
    if (!tail.contains("kind")) tail["kind"] = tail.contains("in_l2") || tail.contains("in_l1") ? "class_flags" : "zeros";
    spec["tail"] = tail;
    return io::sequence_from_json(spec);
}

classify::IdempotentModel parse_model(const Options& o, Inputs& in) {
    if (!o.matrix.empty() && !o.seq.empty()) throw UsageError("give either --matrix or --seq, not both");
    if (!o.matrix.empty()) return io::matrix_from_json(in.load(o.matrix, "--matrix"));
    return parse_sequence(o, in);
}

Report run_classify(const std::string& kind, const Options& o, Inputs& in) {
    Report rep;
    rep.command = "classify " + kind;
    if (kind == "kadison") {
        const auto v = classify::kadison_feasibility(parse_sequence(o, in));
        rep.result = io::to_json(v);
        rep.infeasible = !v.feasible;
        if (v.ambiguous) rep.warnings.push_back("a - b is numerically ambiguous near an integer");
        return rep;
    }
    if (kind == "shape") {
        rep.result = io::to_json(classify::trace_shape(parse_model(o, in)));
        return rep;
    }
    if (kind == "zero-diag") {
        rep.result = {{"zero_diagonalizable", classify::zero_diagonalizable(parse_model(o, in))}};
        return rep;
    }
    const ComplexMatrix d = io::matrix_from_json(in.load(o.matrix, "--matrix"));
    const auto cd = classify::canonical_decomposition(d, o.tol);
    const double norm = operator_norm(d);
    rep.checks.push_back({"reassembly", (cd.reassemble() - d).max_abs(), o.tol * (1.0 + norm)});
    rep.result = {{"ker_dim", cd.ker_dim}, {"coker_dim", cd.coker_dim}, {"t_rank", cd.t_rank}};
    if (!o.out.empty()) rep.files.emplace_back(o.out, io::to_json(cd));
    return rep;
}

Report run_frames(const std::string& kind, const Options& o, Inputs& in) {
    Report rep;
    rep.command = "frames " + kind;
    if (kind == "to-idem") {
        frames::FramePair pair;
        if (o.random > 0) {
            if (o.dim == 0 || o.random < o.dim) throw UsageError("--random needs at least --dim vectors");
            std::mt19937_64 rng(o.seed);
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            std::vector<Vector> x(o.random, Vector(o.dim));
            for (auto& v : x)
                for (auto& c : v) c = Complex(u(rng), u(rng));
            pair = frames::canonical_dual(o.dim, x);
        } else {
            pair = io::frame_pair_from_json(in.load(o.frames, "--frames"));
        }
        const auto g = frames::cross_gramian(pair, o.tol);
        rep.checks.push_back({"idempotency", idempotency_residual(g), o.tol});
        rep.result = {{"dim", pair.dim}, {"size", pair.x.size()}, {"diagonal", io::to_json(g.diag())}};
        rep.processed = pair.x.size();
        if (!o.out.empty()) rep.files.emplace_back(o.out, io::to_json(g));
        if (!o.basis_out.empty() && o.random > 0) rep.files.emplace_back(o.basis_out, io::to_json(pair));
        return rep;
    }
    const ComplexMatrix d = io::matrix_from_json(in.load(o.matrix, "--matrix"));
    const auto ex = frames::extract_frames(d, o.tol);
    const double norm = operator_norm(d);
    rep.checks.push_back({"duality", ex.pair.duality_residual(), o.tol});
    rep.checks.push_back({"round trip", (frames::cross_gramian(ex.pair, 1.0) - d).max_abs(), o.tol * (1.0 + norm)});
    rep.result = {{"dim", ex.pair.dim}, {"condition", ex.condition}};
    rep.processed = d.rows();
    if (!o.out.empty()) rep.files.emplace_back(o.out, io::to_json(ex.pair));
    return rep;
}

Report run_verify(const Options& o, Inputs& in) {
    Report rep;
    rep.command = "verify";
    const ComplexMatrix d = io::matrix_from_json(in.load(o.matrix, "--matrix"));
    if (!d.square()) throw UsageError("--matrix must be square");
    const OrthonormalBasis b = o.basis.empty() ? OrthonormalBasis::standard(d.rows())
                                               : OrthonormalBasis::adopt(io::matrix_from_json(in.load(o.basis, "--basis")));
    if (b.dim() != d.rows()) throw UsageError("--basis dimension does not match --matrix");
    std::vector<Complex> expected;
    if (!o.diag.empty()) expected = io::diagonal_request_from_json(in.load(o.diag, "--diag")).values;
    if (expected.size() > b.size()) throw UsageError("--diag is longer than the basis");
    rep.cert = certify(d, b, expected, o.bound);
    rep.processed = expected.size();
    rep.result = {{"realized", io::to_json(diagonal_of(d, b)) }, {"rank", numerical_rank(d)}};
    return rep;
}

int exit_code(const Report& rep, const Tolerances& tol) {
    if (rep.infeasible) return kExitInfeasible;
    if (rep.cert && !rep.cert->passes(tol)) return kExitCertificate;
    for (const auto& c : rep.checks)
        if (!c.ok()) return kExitCertificate;
    return kExitOk;
}

json report_json(const Report& rep, const std::string& digest, int code) {
    json checks = json::array();
    for (const auto& c : rep.checks) checks.push_back({{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"ok", c.ok()}});
    json files = json::array();
    for (const auto& f : rep.files) files.push_back(f.first);
    return {{"schema", io::kSchema},
            {"command", rep.command},
            {"inputs", {{"digest", digest}}},
            {"certificate", rep.cert ? io::to_json(*rep.cert) : json(nullptr)},
            {"checks", checks},
            {"processed_prefix", rep.processed},
            {"warnings", rep.warnings},
            {"result", rep.result},
            {"files", files},
            {"exit_code", code}};
}

void print_human(std::ostream& out, const Report& rep, const std::string& digest, int code) {
    out << "diagkit " << rep.command << "\n";
    out << "  inputs: " << digest << "\n";
    out << "  processed prefix: " << rep.processed << "\n";
    if (rep.cert) {
        const auto& c = *rep.cert;
        out << "  idempotency residual: " << c.idempotency_residual << "\n";
        out << "  unitarity residual: " << c.unitarity_residual << "\n";
        out << "  diagonal residual: " << c.diagonal_residual << "\n";
        out << "  norm: " << c.norm_observed;
        if (c.norm_bound_claimed) out << " (bound " << *c.norm_bound_claimed << ")";
        out << "\n";
    }
    for (const auto& c : rep.checks)
        out << "  " << c.name << ": " << c.value << " (limit " << c.limit << ")" << (c.ok() ? "" : " FAILED") << "\n";
    for (const auto& [key, value] : rep.result.items()) {
        if (value.is_primitive()) out << "  " << key << ": " << value.dump() << "\n";
    }
    for (const auto& w : rep.warnings) out << "  warning: " << w << "\n";
    for (const auto& f : rep.files) out << "  wrote " << f.first << "\n";
    out << "  status: " << (code == kExitOk ? "ok" : code == kExitInfeasible ? "infeasible" : "certificate failure") << "\n";
}

void write_files(const Report& rep, bool force) {
    for (const auto& [path, content] : rep.files) {
        if (!force && std::filesystem::exists(path)) throw UsageError(path + " exists; pass --force to overwrite");
    }
    for (const auto& [path, content] : rep.files) {
        std::ofstream f(path);
        if (!f) throw UsageError("cannot write " + path);
        f << content.dump(2) << "\n";
    }
}

void add_common(CLI::App* app, Options& o) {
    app->add_option("--out", o.out, "output file for the main result");
    app->add_option("--basis-out", o.basis_out, "output file for the basis");
    app->add_option("--tol", o.tol, "idempotency and diagonal tolerance")->check(CLI::PositiveNumber);
    app->add_flag("--force", o.force, "overwrite existing output files");
    app->add_flag("--json", o.as_json, "machine-readable report on stdout");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Idempotents with prescribed diagonals, rebasing and classification", "diagkit"};
    app.require_subcommand(1);
    std::map<CLI::App*, std::function<Report(Inputs&)>> actions;

    auto* synth = app.add_subcommand("synth", "synthesize an idempotent with a prescribed diagonal");
    synth->require_subcommand(1);
    for (const char* kind : {"two-by-two", "constant", "infinite-mult", "bounded", "rank-one", "finite-rank", "matrix"}) {
        auto* sub = synth->add_subcommand(kind);
        sub->add_option("--diag", o.diag, "diagonal values or request (inline JSON or @file)")->required();
        if (std::string(kind) == "constant") sub->add_option("--blocks", o.blocks, "number of 2x2 blocks");
        if (std::string(kind) == "infinite-mult") sub->add_option("--index", o.index, "0-based index of the repeated value");
        if (std::string(kind) == "infinite-mult" || std::string(kind) == "bounded")
            sub->add_option("--depth", o.depth, "blocks per constant-diagonal constituent");
        if (std::string(kind) == "bounded") sub->add_option("--partition", o.partition, "number of subsequences J");
        if (std::string(kind) == "finite-rank") sub->add_option("--route", o.route, "fan, gkl or both");
        add_common(sub, o);
        actions[sub] = [kind, &o](Inputs& in) { return run_synth(kind, o, in); };
    }

    auto* rebase = app.add_subcommand("rebase", "change basis to reach a target diagonal");
    rebase->require_subcommand(1);
    for (const char* kind : {"zero-diag", "bootstrap-fan", "abs-sum"}) {
        auto* sub = rebase->add_subcommand(kind);
        sub->add_option("--matrix", o.matrix, "operator (inline JSON or @file)")->required();
        if (std::string(kind) == "zero-diag") {
            sub->add_option("--pairs", o.pairs, "list of [i, j] coordinate pairs");
            sub->add_option("--blocks", o.blocks, "number of pairs to process");
        } else {
            sub->add_option("--basis", o.basis, "orthonormal family (default: standard basis)");
        }
        if (std::string(kind) == "bootstrap-fan") sub->add_option("--targets", o.targets, "targets d_1..d_N");
        if (std::string(kind) == "abs-sum") {
            sub->add_option("--limit", o.limit, "limit of the diagonal partial sums")->required();
            sub->add_option("--indices", o.indices, "subsequence n_1 < n_2 < ...");
        }
        add_common(sub, o);
        actions[sub] = [kind, &o](Inputs& in) { return run_rebase(kind, o, in); };
    }

    auto* cls = app.add_subcommand("classify", "feasibility and classification");
    cls->require_subcommand(1);
    for (const char* kind : {"kadison", "shape", "zero-diag", "decompose"}) {
        auto* sub = cls->add_subcommand(kind);
        if (std::string(kind) != "decompose") sub->add_option("--seq", o.seq, "sequence: key=value tokens or JSON");
        if (std::string(kind) != "kadison") sub->add_option("--matrix", o.matrix, "finite idempotent");
        add_common(sub, o);
        actions[sub] = [kind, &o](Inputs& in) { return run_classify(kind, o, in); };
    }

    auto* frm = app.add_subcommand("frames", "dual frame pairs and idempotents");
    frm->require_subcommand(1);
    auto* to_idem = frm->add_subcommand("to-idem", "cross-Gramian of a dual pair");
    to_idem->add_option("--frames", o.frames, "frame pair JSON");
    to_idem->add_option("--random", o.random, "use N random vectors with their canonical dual");
    to_idem->add_option("--dim", o.dim, "dimension for --random");
    to_idem->add_option("--seed", o.seed, "seed for --random");
    add_common(to_idem, o);
    actions[to_idem] = [&o](Inputs& in) { return run_frames("to-idem", o, in); };
    auto* from_idem = frm->add_subcommand("from-idem", "dual pair from an idempotent");
    from_idem->add_option("--matrix", o.matrix, "idempotent")->required();
    add_common(from_idem, o);
    actions[from_idem] = [&o](Inputs& in) { return run_frames("from-idem", o, in); };

    auto* verify = app.add_subcommand("verify", "certify an idempotent against a diagonal");
    verify->add_option("--matrix", o.matrix, "idempotent")->required();
    verify->add_option("--basis", o.basis, "basis (default: standard)");
    verify->add_option("--diag", o.diag, "expected diagonal prefix");
    verify->add_option("--bound", o.bound, "claimed norm bound");
    add_common(verify, o);
    actions[verify] = [&o](Inputs& in) { return run_verify(o, in); };

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    auto action = std::find_if(actions.begin(), actions.end(), [](const auto& kv) { return kv.first->parsed(); });
    if (action == actions.end()) {
        err << "no command given\n";
        return kExitUsage;
    }
    Inputs inputs(args);
    try {
        Report rep = action->second(inputs);
        const std::string digest = inputs.digest();
        const int code = exit_code(rep, tolerances(o));
        write_files(rep, o.force);
        if (o.as_json)
            out << report_json(rep, digest, code).dump(2) << "\n";
        else
            print_human(out, rep, digest, code);
        return code;
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const DomainError& e) {
        err << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const io::json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace diagkit::cli
