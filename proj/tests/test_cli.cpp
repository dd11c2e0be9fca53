#include "support.hpp"

#include <json.hpp>

#include <gtest/gtest.h>
#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <sys/wait.h>

using testing_support::slurp;
using testing_support::TempDir;

namespace {

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    TempDir dir;

    Result run(const std::string& args) {
        const auto out = dir / "stdout.txt";
        const auto err = dir / "stderr.txt";
        const std::string cmd = "cd '" + dir.path().string() + "' && SSMIC_JOBS=2 '" SSMIC_CLI "' " + args + " >'" +
                                out.string() + "' 2>'" + err.string() + "'";
        const int status = std::system(cmd.c_str());
        Result r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = slurp(out);
        r.err = slurp(err);
        return r;
    }

    std::string read(const std::string& name) { return slurp(dir / name); }

    void make_blobs(const std::string& name, const std::string& extra = "") {
        ASSERT_EQ(run("--seed 4 generate --n-per-class 30 --separation 10 -o " + name + " " + extra).code, 0);
    }
};

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text) n += c == '\n';
    return n;
}

std::string sha256(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

std::string drop_column(const std::string& csv, const std::string& column) {
    std::istringstream in(csv);
    std::string line, out;
    int drop = -1;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (drop < 0)
            for (std::size_t i = 0; i < cells.size(); ++i)
                if (cells[i] == column) drop = static_cast<int>(i);
        for (std::size_t i = 0; i < cells.size(); ++i)
            if (static_cast<int>(i) != drop) out += cells[i] + ",";
        out += "\n";
    }
    return out;
}

}  // namespace

TEST_F(Cli, ClusterWritesOneRowPerSample) {
    make_blobs("blobs.csv");
    const Result r = run("cluster -i blobs.csv --format labeled-csv --classes 2 -o labels.csv");
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string labels = read("labels.csv");
    EXPECT_EQ(labels.rfind("index,label\n", 0), 0u);
    EXPECT_EQ(count_lines(labels), 61);
    EXPECT_EQ(run("ari labels.csv blobs.csv").out, "1.000000\n");
}

TEST_F(Cli, OutOfRangeConstraintIsInputError) {
    make_blobs("blobs.csv");
    dir.file("links.txt", "# two links\n1 2 +1\n3 61 -1\n");
    const Result r = run("cluster -i blobs.csv --format labeled-csv --constraints links.txt");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("links.txt:3"), std::string::npos) << r.err;
}

TEST_F(Cli, FlagErrorsAreInputErrors) {
    make_blobs("blobs.csv");
    EXPECT_EQ(run("cluster -i blobs.csv --format labeled-csv --auto --t 3").code, 2);
    EXPECT_EQ(run("cluster -i blobs.csv --no-such-flag").code, 2);
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("cluster -i missing.csv --classes 2").code, 2);
    EXPECT_EQ(run("cluster -i blobs.csv --format labeled-csv --t 0").code, 2);
    EXPECT_EQ(run("cluster -i blobs.csv --format labeled-csv --classes 3 --eta 1").code, 2);
    EXPECT_EQ(run("constraints -i blobs.csv --links 1 --fraction 0.1").code, 2);
    EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, PredictReproducesTrainingLabels) {
    make_blobs("blobs.csv");
    ASSERT_EQ(run("cluster -i blobs.csv --format labeled-csv -o labels.csv --model-out model.json").code, 0);
    const Result r = run("predict -m model.json -i blobs.csv --format labeled-csv -o pred.csv");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(read("pred.csv"), read("labels.csv"));
}

TEST_F(Cli, PredictEdgeCases) {
    make_blobs("blobs.csv");
    ASSERT_EQ(run("cluster -i blobs.csv --format labeled-csv --model-out model.json -o labels.csv").code, 0);
    dir.file("three.csv", "1,2,3\n");
    EXPECT_EQ(run("predict -m model.json -i three.csv").code, 2);
    dir.file("empty.csv", "");
    const Result empty = run("predict -m model.json -i empty.csv");
    EXPECT_EQ(empty.code, 0) << empty.err;
    EXPECT_EQ(empty.out, "index,label\n");

    auto model = nlohmann::json::parse(read("model.json"));
    model["eigenvalues"][1] = -0.5;
    dir.file("bad.json", model.dump());
    const Result refused = run("predict -m bad.json -i blobs.csv --format labeled-csv");
    EXPECT_EQ(refused.code, 1);
    EXPECT_NE(refused.err.find("eigenvalue"), std::string::npos) << refused.err;
}

TEST_F(Cli, ConstraintsWithZeroLinks) {
    make_blobs("blobs.csv");
    ASSERT_EQ(run("constraints -i blobs.csv --links 0 -o links.txt").code, 0);
    const std::string text = read("links.txt");
    ASSERT_FALSE(text.empty());
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) EXPECT_EQ(line[0], '#') << line;
}

TEST_F(Cli, ConstraintFractionCountsPairs) {
    make_blobs("blobs.csv");
    ASSERT_EQ(run("--seed 2 constraints -i blobs.csv --fraction 0.01 -o links.txt").code, 0);
    // 1% of 1770 pairs
    int links = 0;
    std::istringstream in(read("links.txt"));
    std::string line;
    while (std::getline(in, line)) links += !line.empty() && line[0] != '#';
    EXPECT_EQ(links, 18);
}

TEST_F(Cli, BenchOnBundledConfig) {
    const Result r = run("-q bench --config '" SSMIC_SOURCE_DIR "/configs/blobs_bench.json' -o report.csv --summary s.json");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto cfg = nlohmann::json::parse(slurp(SSMIC_SOURCE_DIR "/configs/blobs_bench.json"));
    const auto rows = cfg["runs"].get<int>() * static_cast<int>(cfg["link_counts"].size() * cfg["methods"].size());
    EXPECT_EQ(count_lines(read("report.csv")), 1 + rows);
    EXPECT_EQ(read("report.csv").rfind("dataset,method,links,run,seed,ari\n", 0), 0u);
    EXPECT_NO_THROW(nlohmann::json::parse(read("s.json")));
}

TEST_F(Cli, ManifestChecksumsMatchOutputs) {
    make_blobs("blobs.csv");
    ASSERT_EQ(run("cluster -i blobs.csv --format labeled-csv -o labels.csv --model-out model.json").code, 0);
    const auto manifest = nlohmann::json::parse(read("labels.csv.manifest.json"));
    EXPECT_EQ(manifest["command"], "cluster");
    EXPECT_TRUE(manifest.contains("wall_time_s"));
    ASSERT_EQ(manifest["outputs"].size(), 2u);
    for (const auto& o : manifest["outputs"]) {
        const std::string bytes = read(o["path"].get<std::string>());
        EXPECT_EQ(o["sha256"], sha256(bytes));
        EXPECT_EQ(o["bytes"], bytes.size());
    }
    EXPECT_EQ(manifest["inputs"][0]["sha256"], sha256(read("blobs.csv")));
}

TEST_F(Cli, EveryCommandIsDeterministic) {
    const auto both = [&](const std::string& args, const std::vector<std::string>& files) {
        std::vector<std::string> first;
        ASSERT_EQ(run(args).code, 0) << args;
        for (const auto& f : files) first.push_back(read(f));
        ASSERT_EQ(run(args).code, 0) << args;
        for (std::size_t i = 0; i < files.size(); ++i) {
            if (files[i].ends_with("table.csv"))
                EXPECT_EQ(drop_column(read(files[i]), "wall_ms"), drop_column(first[i], "wall_ms")) << args;
            else
                EXPECT_EQ(read(files[i]), first[i]) << args << " -> " << files[i];
        }
    };
    both("--seed 9 generate --n-per-class 20 --separation 3 -o d.csv", {"d.csv"});
    both("--seed 9 constraints -i d.csv --links 15 -o l.txt", {"l.txt"});
    both("cluster -i d.csv --format labeled-csv --constraints l.txt -o c.csv --model-out m.json --kernel-out k.csv",
         {"c.csv", "m.json", "k.csv"});
    both("--seed 9 select -i d.csv --format labeled-csv --constraints l.txt --t-grid 3,5 --gamma-grid 0,1 "
         "--eta-grid 0,1 -o s.csv --table-out table.csv --cv-out cv.csv --model-out sm.json",
         {"s.csv", "table.csv", "cv.csv", "sm.json"});
    both("predict -m m.json -i d.csv --format labeled-csv -o p.csv", {"p.csv"});
    both("ari c.csv d.csv -o a.txt", {"a.txt"});
    both("-q bench --config '" SSMIC_SOURCE_DIR "/configs/blobs_bench.json' -o b.csv --summary b.json",
         {"b.csv", "b.json"});
}

TEST_F(Cli, JobCountDoesNotChangeResults) {
    make_blobs("blobs.csv");
    ASSERT_EQ(run("--seed 1 constraints -i blobs.csv --links 10 -o l.txt").code, 0);
    const std::string args = "select -i blobs.csv --format labeled-csv --constraints l.txt --t-grid 3,6 "
                             "--gamma-grid 0,1 --eta-grid 0 --table-out t.csv -o s.csv";
    ASSERT_EQ(run("--jobs 1 " + args).code, 0);
    const std::string a = read("s.csv"), ta = drop_column(read("t.csv"), "wall_ms");
    ASSERT_EQ(run("--jobs 3 " + args).code, 0);
    EXPECT_EQ(read("s.csv"), a);
    EXPECT_EQ(drop_column(read("t.csv"), "wall_ms"), ta);
}
