#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "ctbn/io.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(CTBN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::path(CTBN_TEST_TMP) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) { return ctbn::read_text_file(p.string()); }

} // namespace

TEST_CASE("cli simulate writes one file per replication") {
    const fs::path out = scratch("sim");
    REQUIRE(run("simulate --m1 --d 4 --T 5 --reps 3 --seed 2 --out " + out.string()) == 0);
    CHECK(fs::exists(out / "traj_000.json"));
    CHECK(fs::exists(out / "traj_001.json"));
    CHECK(fs::exists(out / "traj_002.json"));
    CHECK_FALSE(fs::exists(out / "traj_003.json"));
    CHECK(fs::exists(out / "model.json"));
    CHECK(fs::exists(out / "metadata.json"));
}

TEST_CASE("cli rejects bad parameters") {
    const fs::path out = scratch("bad");
    CHECK(run("simulate --m1 --d 1 --out " + out.string()) != 0);
    CHECK(run("simulate --m1 --d 4 --reps 0 --out " + out.string()) != 0);
    CHECK(run("theory --m1 --d 3 --xi 1 --out " + out.string()) != 0);
    CHECK(run("theory --m2 --d 5 --out " + out.string()) != 0);
    CHECK(run("fit " + (out / "missing.json").string() + " --out " + out.string()) != 0);
    ctbn::write_text_file((out / "corrupt.json").string(), "{\"d\": 2, \"T\": 1, \"initial\": [0,");
    CHECK(run("fit " + (out / "corrupt.json").string() + " --out " + out.string()) != 0);
}

TEST_CASE("cli fit on a jump-free trajectory gives no edges") {
    const fs::path out = scratch("flat");
    ctbn::write_text_file((out / "flat.json").string(), R"({"d": 3, "T": 10, "initial": [0, 1, 0], "jumps": []})");
    REQUIRE(run("fit " + (out / "flat.json").string() + " --out " + (out / "fit").string()) == 0);
    CHECK(slurp(out / "fit" / "edges.txt").empty());
}

TEST_CASE("cli output is reproducible") {
    const fs::path a = scratch("rep_a"), b = scratch("rep_b"), c = scratch("rep_c");
    for (const fs::path& p : {a, b}) {
        REQUIRE(run("simulate --m1 --d 5 --T 20 --reps 2 --seed 9 --threads 1 --out " + (p / "sim").string()) == 0);
        REQUIRE(run("fit " + (p / "sim" / "traj_000.json").string() + " --threads 1 --out " + (p / "fit").string()) == 0);
        REQUIRE(run("experiment --m1 --d 5 --T 10 --reps 3 --seed 4 --threads 1 --out " + (p / "exp").string()) == 0);
    }
    REQUIRE(run("simulate --m1 --d 5 --T 20 --reps 2 --seed 9 --threads 4 --out " + (c / "sim").string()) == 0);
    REQUIRE(run("fit " + (c / "sim" / "traj_000.json").string() + " --threads 4 --out " + (c / "fit").string()) == 0);
    REQUIRE(run("experiment --m1 --d 5 --T 10 --reps 3 --seed 4 --threads 4 --out " + (c / "exp").string()) == 0);
    for (const char* f : {"sim/traj_000.json", "sim/traj_001.json", "sim/model.json", "fit/edges.txt", "fit/paths.csv",
                          "exp/summary.csv", "exp/replications.csv"}) {
        CAPTURE(f);
        CHECK(slurp(a / f) == slurp(b / f));
        CHECK(slurp(a / f) == slurp(c / f));
    }
    // selection.json records the input path, which differs per directory.
    auto selection = [](const fs::path& p) {
        auto j = nlohmann::json::parse(slurp(p / "fit" / "selection.json"));
        j.erase("input");
        return j.dump();
    };
    CHECK(selection(a) == selection(b));
    CHECK(selection(a) == selection(c));
}
