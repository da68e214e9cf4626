#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "pfsc/data_io.hpp"
#include "pfsc/format.hpp"
#include "pfsc/metrics.hpp"

using namespace pfsc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("pfsc_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "pfsc");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> key_values(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        REQUIRE(comma != std::string::npos);
        kv[line.substr(0, comma)] = line.substr(comma + 1);
    }
    return kv;
}

fs::path make_blobs(const fs::path& dir, const std::string& views = "5:0.1,8:0.1") {
    const auto r = run({"synth", "--clusters", "3", "--per-cluster", "10", "--views", views, "--seed", "4",
                        "--out-dir", dir.string()});
    REQUIRE(r.code == 0);
    return dir / "manifest.txt";
}

} // namespace

TEST_CASE("cluster writes every output file") {
    TempDir tmp;
    const auto manifest = make_blobs(tmp.path / "data", "5:0.1,8:0.1,4:0.1");
    const auto out = tmp.path / "out";
    const auto r = run({"cluster", manifest.string(), "--clusters", "3", "--max-iters", "10", "--out-dir", out.string()});
    REQUIRE(r.code == 0);
    const auto labels = io::load_labels(out / "labels.csv");
    CHECK(labels.n() == 30);
    for (int v = 1; v <= 3; ++v) CHECK(io::load_labels(out / ("labels_view_" + std::to_string(v) + ".csv")).n() == 30);
    CHECK_FALSE(fs::exists(out / "labels_view_4.csv"));
    const auto w = io::load_weights(out / "weights.csv");
    CHECK(std::abs(w.sum() - 1.0) <= 1e-12);
    CHECK(fs::exists(out / "trace.csv"));
    const auto kv = key_values(r.out);
    CHECK(kv.at("n") == "30");
    CHECK(kv.count("nmi") == 1);
}

TEST_CASE("cluster flag validation exits with 2") {
    TempDir tmp;
    const auto manifest = make_blobs(tmp.path / "data");
    const auto out = (tmp.path / "out").string();
    CHECK(run({"cluster", manifest.string(), "--clusters", "0", "--out-dir", out}).code == 2);
    CHECK(run({"cluster", manifest.string(), "--clusters", "3", "--beta", "0", "--out-dir", out}).code == 2);
    CHECK(run({"cluster", manifest.string(), "--clusters", "3", "--m-variant", "other", "--out-dir", out}).code == 2);
    CHECK(run({"cluster", manifest.string(), "--clusters", "31", "--out-dir", out}).code == 2);
    CHECK(run({"cluster", manifest.string(), "--out-dir", out}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"cluster", (tmp.path / "missing.txt").string(), "--clusters", "3", "--out-dir", out}).code == 1);
}

TEST_CASE("eval prints the five metrics") {
    TempDir tmp;
    io::save_labels(Labeling::from_ids({0, 0, 1, 1, 1}), tmp.path / "p.csv");
    io::save_labels(Labeling::from_ids({0, 0, 0, 1, 1}), tmp.path / "t.csv");
    io::save_labels(Labeling::from_ids({0, 1}), tmp.path / "short.csv");
    const auto same = run({"eval", "--pred", (tmp.path / "p.csv").string(), "--truth", (tmp.path / "p.csv").string()});
    REQUIRE(same.code == 0);
    auto kv = key_values(same.out);
    for (const char* key : {"fscore", "precision", "recall", "nmi", "ari"}) CHECK(kv.at(key) == "1");

    const auto diff = run({"eval", "--pred", (tmp.path / "p.csv").string(), "--truth", (tmp.path / "t.csv").string()});
    REQUIRE(diff.code == 0);
    kv = key_values(diff.out);
    // Pair counts (tp, fp, fn, tn) = (2, 2, 2, 4) by hand.
    CHECK(kv.at("precision") == "0.5");
    CHECK(kv.at("recall") == "0.5");
    double ari = 0.0;
    REQUIRE(fmt::parse_double(kv.at("ari"), ari));
    CHECK(ari == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

    CHECK(run({"eval", "--pred", (tmp.path / "p.csv").string(), "--truth", (tmp.path / "short.csv").string()}).code == 1);
    CHECK(run({"eval", "--pred", (tmp.path / "nope.csv").string(), "--truth", (tmp.path / "t.csv").string()}).code == 1);
}

TEST_CASE("corrupt is deterministic and hits the requested amount") {
    TempDir tmp;
    Matrix base(200, 50);
    for (Eigen::Index i = 0; i < base.size(); ++i) base.data()[i] = 0.001 * static_cast<double>(i % 997);
    io::write_csv_matrix(base, tmp.path / "in.csv");
    const auto in = (tmp.path / "in.csv").string();

    auto g = run({"corrupt", "--in", in, "--noise", "gaussian", "--level", "0.03", "--seed", "1", "--out",
                  (tmp.path / "g.csv").string()});
    REQUIRE(g.code == 0);
    const Matrix gm = io::read_csv_matrix(tmp.path / "g.csv", false);
    CHECK((gm.array() != base.array()).count() == base.size());

    auto s = run({"corrupt", "--in", in, "--noise", "saltpepper", "--level", "0.05", "--seed", "1", "--out",
                  (tmp.path / "s1.csv").string()});
    REQUIRE(s.code == 0);
    const Matrix sm = io::read_csv_matrix(tmp.path / "s1.csv", false);
    const double frac = static_cast<double>((sm.array() != base.array()).count()) / static_cast<double>(base.size());
    CHECK(std::abs(frac - 0.05) <= 0.01);

    REQUIRE(run({"corrupt", "--in", in, "--noise", "saltpepper", "--level", "0.05", "--seed", "1", "--out",
                 (tmp.path / "s2.csv").string()}).code == 0);
    CHECK(read_text(tmp.path / "s1.csv") == read_text(tmp.path / "s2.csv"));

    CHECK(run({"corrupt", "--in", in, "--noise", "pink", "--level", "0.05", "--out", (tmp.path / "x.csv").string()}).code == 2);
    CHECK(run({"corrupt", "--in", in, "--noise", "saltpepper", "--level", "1.5", "--out", (tmp.path / "x.csv").string()}).code == 2);
    CHECK(run({"corrupt", "--in", (tmp.path / "none.csv").string(), "--noise", "gaussian", "--level", "0.01", "--out",
               (tmp.path / "x.csv").string()}).code == 1);
}

TEST_CASE("synth writes a loadable, reproducible dataset") {
    TempDir tmp;
    const auto a = make_blobs(tmp.path / "a", "5:0.1,8:0.1,8:0.27:noise");
    const auto b = make_blobs(tmp.path / "b", "5:0.1,8:0.1,8:0.27:noise");
    const auto da = io::load_dataset(a);
    CHECK(da.n() == 30);
    CHECK(da.num_views() == 3);
    CHECK(da.view(2).features() == 8);
    CHECK(da == io::load_dataset(b));
    CHECK(read_text(tmp.path / "a" / "view_1.csv") == read_text(tmp.path / "b" / "view_1.csv"));
    CHECK(run({"synth", "--clusters", "3", "--per-cluster", "10", "--views", "5:x", "--out-dir", tmp.path.string()}).code == 2);
    CHECK(run({"synth", "--clusters", "3", "--per-cluster", "10", "--views", "0", "--out-dir", tmp.path.string()}).code == 2);
    CHECK(run({"synth", "--clusters", "3", "--per-cluster", "10", "--views", "5:0.1:loud", "--out-dir", tmp.path.string()}).code == 2);
}

TEST_CASE("grid tabulates one row per pair") {
    TempDir tmp;
    const auto manifest = make_blobs(tmp.path / "data");
    const auto out = tmp.path / "grid";
    const auto r = run({"grid", manifest.string(), "--clusters", "3", "--max-iters", "5", "--alpha-list", "0.1,1",
                        "--beta-list", "1,10", "--out-dir", out.string()});
    REQUIRE(r.code == 0);
    const Matrix table = io::read_csv_matrix(out / "grid_results.csv", true);
    CHECK(table.rows() == 4);
    CHECK(table.cols() == 7);
    CHECK(read_text(out / "grid_results.csv").rfind("alpha,beta,fscore,precision,recall,nmi,ari\n", 0) == 0);
    for (Eigen::Index i = 0; i < table.rows(); ++i) CHECK((table(i, 5) >= 0.0 && table(i, 5) <= 1.0));

    // Same data without labels.
    auto m = io::parse_manifest(manifest);
    m.labels_path.reset();
    io::write_manifest(m, tmp.path / "data" / "nolabels.txt");
    CHECK(run({"grid", (tmp.path / "data" / "nolabels.txt").string(), "--clusters", "3", "--alpha-list", "1",
               "--beta-list", "1", "--out-dir", out.string()}).code == 1);
}
