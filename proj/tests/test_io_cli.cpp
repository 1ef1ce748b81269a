#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "diagkit/cli.hpp"
#include "diagkit/io.hpp"
#include "support.hpp"

using namespace diagkit;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    Run r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "diagkit_cli_test";
    std::filesystem::create_directories(dir);
    const auto p = dir / name;
    std::filesystem::remove(p);
    return p;
}

io::json read_json(const std::filesystem::path& p) {
    std::ifstream in(p);
    return io::json::parse(in);
}

}  // namespace

TEST_CASE("json round trips") {
    std::mt19937_64 rng(41);
    const auto m = testing::random_matrix(rng, 3, 4);
    CHECK(io::matrix_from_json(io::to_json(m)) == m);
    CHECK(io::matrix_from_json(io::json::parse(io::to_json(m).dump())) == m);

    const auto b = OrthonormalBasis(testing::random_unitary(rng, 3));
    const auto jb = io::to_json(b);
    CHECK(jb["kind"] == "basis");
    CHECK(io::basis_from_json(jb).columns() == b.columns());

    CHECK(io::complex_from_json(io::json::parse("2.5")) == Complex(2.5, 0.0));
    CHECK(io::complex_from_json(io::json::parse("[1, -2]")) == Complex(1.0, -2.0));
    CHECK_THROWS_AS(io::complex_from_json(io::json::parse("\"x\"")), io::FormatError);
    CHECK_THROWS_AS(io::matrix_from_json(io::json::parse(R"({"rows":2,"cols":2,"data":[1,2,3]})")), io::FormatError);

    const auto req = io::diagonal_request_from_json(
        io::json::parse(R"({"values":[[1,0],0.5],"kind":"bounded","truncation":{"partition":3,"depth":4}})"));
    CHECK(req.values.size() == 2);
    CHECK(req.partition == 3u);
    CHECK(req.depth == 4u);
    CHECK_FALSE(req.blocks);

    const auto seq = io::sequence_from_json(io::json::parse(R"({"head":[0.5],"tail":{"kind":"class_flags","in_l2":true}})"));
    CHECK(seq.tail == classify::TailKind::class_flags);
    REQUIRE(seq.flags);
    CHECK(seq.flags->in_l2);
    CHECK(io::sequence_from_json(io::to_json(seq)).flags->in_l2);

    const auto pair = frames::canonical_dual(2, {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}});
    const auto back = io::frame_pair_from_json(io::to_json(pair));
    CHECK(back.x == pair.x);
    CHECK(back.y == pair.y);
}

TEST_CASE("cli synth commands") {
    const auto out = scratch("matrix.json");
    auto r = run({"synth", "matrix", "--diag", "[1,0]", "--out", out.string()});
    CHECK(r.code == cli::kExitOk);
    const auto m = io::matrix_from_json(read_json(out));
    CHECK(m == ComplexMatrix::diagonal(std::vector<Complex>{1.0, 0.0}));

    r = run({"synth", "matrix", "--diag", "[1,0]", "--out", out.string()});
    CHECK(r.code == cli::kExitUsage);
    r = run({"synth", "matrix", "--diag", "[1,0]", "--out", out.string(), "--force"});
    CHECK(r.code == cli::kExitOk);

    r = run({"synth", "finite-rank", "--diag", "[1.5,0.5,-0.5,0.5]", "--route", "both", "--json"});
    CHECK(r.code == cli::kExitOk);
    const auto rep = io::json::parse(r.out);
    CHECK(rep["schema"] == "diagkit/1");
    CHECK(rep["result"]["cross_check"]["rank_fan"] == 2);
    CHECK(rep["result"]["cross_check"]["rank_gkl"] == 2);

    CHECK(run({"synth", "matrix", "--diag", "[0.5,0.6]"}).code == cli::kExitInfeasible);
    CHECK(run({"synth", "rank-one", "--diag", "[1,1]"}).code == cli::kExitInfeasible);
    CHECK(run({"synth", "two-by-two", "--diag", "[1,2]"}).code == cli::kExitUsage);
    CHECK(run({"synth", "matrix", "--diag", "[1,"}).code == cli::kExitUsage);
    CHECK(run({"synth"}).code == cli::kExitUsage);
    CHECK(run({"--help"}).code == cli::kExitOk);

    r = run({"synth", "bounded", "--diag", R"({"values":[1,2,-1,0.5,3],"truncation":{"partition":2,"depth":3}})", "--json"});
    CHECK(r.code == cli::kExitOk);
    CHECK(io::json::parse(r.out)["processed_prefix"] == 5);

    r = run({"synth", "constant", "--diag", "[0.2]", "--blocks", "6", "--json"});
    CHECK(r.code == cli::kExitOk);
    CHECK(io::json::parse(r.out)["processed_prefix"] == 9);
}

TEST_CASE("cli runs are deterministic") {
    const std::vector<std::string> args{"synth", "bounded", "--diag", "[0.3,-1,2,0,1,1]", "--json"};
    CHECK(run(args).out == run(args).out);
    const std::vector<std::string> frames{"frames", "to-idem", "--random", "5", "--dim", "2", "--seed", "7", "--json"};
    const auto a = run(frames);
    CHECK(a.code == cli::kExitOk);
    CHECK(a.out == run(frames).out);
}

TEST_CASE("cli classify, rebase, frames and verify") {
    auto r = run({"classify", "kadison", "--seq", "head=[0.5,0.5]", "tail=zeros", "--json"});
    CHECK(r.code == cli::kExitOk);
    auto rep = io::json::parse(r.out);
    CHECK(rep["result"]["feasible"] == true);
    CHECK(rep["result"]["index"] == -1);

    CHECK(run({"classify", "kadison", "--seq", "head=[0.3]"}).code == cli::kExitInfeasible);
    r = run({"classify", "shape", "--seq", "in_l2=false", "--json"});
    CHECK(io::json::parse(r.out)["result"]["shape"] == "plane");
    r = run({"classify", "zero-diag", "--seq", "tail=class_flags", "--json"});
    CHECK(r.code == cli::kExitUsage);

    const auto m = scratch("idem.json");
    const auto d = ComplexMatrix::from_rows({{1.0, 0.0}, {5.0, 0.0}});
    std::ofstream(m) << io::to_json(d).dump();
    r = run({"classify", "decompose", "--matrix", "@" + m.string(), "--json"});
    CHECK(r.code == cli::kExitOk);
    CHECK(io::json::parse(r.out)["result"]["ker_dim"] == 1);

    const auto pair_file = scratch("pair.json");
    r = run({"frames", "from-idem", "--matrix", "@" + m.string(), "--out", pair_file.string()});
    CHECK(r.code == cli::kExitOk);
    const auto g = scratch("gram.json");
    r = run({"frames", "to-idem", "--frames", "@" + pair_file.string(), "--out", g.string()});
    CHECK(r.code == cli::kExitOk);
    CHECK(testing::max_abs_diff(io::matrix_from_json(read_json(g)), d) < 1e-9);

    CHECK(run({"verify", "--matrix", "@" + m.string(), "--diag", "[1,0]"}).code == cli::kExitOk);
    CHECK(run({"verify", "--matrix", "@" + m.string(), "--diag", "[0,1]"}).code == cli::kExitCertificate);
    const auto bad = scratch("bad.json");
    std::ofstream(bad) << io::to_json(ComplexMatrix::from_rows({{1.0, 1.0}, {0.0, 1.0}})).dump();
    CHECK(run({"verify", "--matrix", "@" + bad.string()}).code == cli::kExitCertificate);

    // paired idempotent [[I,0],[I,0]] with d_n = 1
    const std::size_t k = 12;
    ComplexMatrix z(2 * k, 2 * k);
    for (std::size_t i = 0; i < k; ++i) {
        z(i, i) = 1.0;
        z(k + i, i) = 1.0;
    }
    const auto zf = scratch("pairs.json");
    std::ofstream(zf) << io::to_json(z).dump();
    r = run({"rebase", "zero-diag", "--matrix", "@" + zf.string(), "--json"});
    CHECK(r.code == cli::kExitOk);
    rep = io::json::parse(r.out);
    CHECK(rep["result"]["plan"]["m"][0] == 6);

    std::mt19937_64 rng(42);
    auto t = testing::random_matrix(rng, 6, 6);
    const auto tf = scratch("t.json");
    std::ofstream(tf) << io::to_json(t).dump();
    CHECK(run({"rebase", "bootstrap-fan", "--matrix", "@" + tf.string()}).code == cli::kExitOk);

    for (std::size_t i = 0; i < 6; ++i) t(i, i) = i % 2 == 0 ? 1.0 : -1.0;
    std::ofstream(tf) << io::to_json(t).dump();
    r = run({"rebase", "abs-sum", "--matrix", "@" + tf.string(), "--limit", "0", "--indices", "[2,4,6]", "--json"});
    CHECK(r.code == cli::kExitOk);
}
