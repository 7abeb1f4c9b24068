#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string err;
};

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("beds_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

Run run(const std::string& args, const fs::path& dir) {
    auto err = dir / "stderr.txt";
    std::string cmd = std::string(BEDS_CLI) + " " + args + " >" + (dir / "stdout.txt").string() + " 2>" +
                      err.string();
    int status = std::system(cmd.c_str());
    std::ifstream in(err);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("bad header exits 2 and names the column") {
    auto dir = scratch("hdr");
    std::ofstream(dir / "census.csv") << "Primary CSN,Dept Abbrev,Effective Date/Time,Service\n1,PICUs,2020-01-01 23:59,X\n";
    std::ofstream(dir / "proc.csv")
        << "Primary CSN,Primary Surgeon ID,Location,Originally Scheduled On,Originally Scheduled For,"
           "Patient in Room,Patient out of Room,Patient Class,Service,Primary Procedure ID\n";
    auto r = run("ingest --census " + (dir / "census.csv").string() + " --procedures " +
                     (dir / "proc.csv").string() + " --out " + (dir / "out").string(),
                 dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("Hospital Admission Dt/Tm") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("usage errors exit 2, help exits 0") {
    auto dir = scratch("usage");
    CHECK(run("", dir).code == 2);
    CHECK(run("report", dir).code == 2);
    CHECK(run("simulate --bogus", dir).code == 2);
    CHECK(run("--help", dir).code == 0);
    auto help = slurp(dir / "stdout.txt");
    CHECK(help.find("serve") != std::string::npos);
    CHECK(run("synth --help", dir).code == 0);
    CHECK(slurp(dir / "stdout.txt").find("--blocks-per-week") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("synth is deterministic and feeds ingest, simulate and report") {
    auto dir = scratch("pipe");
    const std::string a = (dir / "a").string(), b = (dir / "b").string();
    REQUIRE(run("synth --horizon 120 --seed 9 --out " + a, dir).code == 0);
    REQUIRE(run("synth --horizon 120 --seed 9 --out " + b, dir).code == 0);
    for (const char* f : {"census.csv", "procedures.csv", "availability.csv"}) {
        CHECK(!slurp(dir / "a" / f).empty());
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    }

    // No availability given: it is inferred and written next to the profiles.
    const std::string ing = (dir / "ing").string();
    REQUIRE(run("ingest --census " + a + "/census.csv --procedures " + a + "/procedures.csv --out " + ing, dir)
                .code == 0);
    for (const char* f : {"profiles.ndjson", "cleaning_report.json", "rejects.csv", "availability.csv",
                          "initial_state.json"})
        CHECK(fs::exists(dir / "ing" / f));
    CHECK(slurp(dir / "ing" / "cleaning_report.json").find("\"excluded_total\": 0") != std::string::npos);

    const std::string sim = (dir / "sim").string();
    REQUIRE(run("simulate --profiles " + ing + "/profiles.ndjson --availability " + a +
                    "/availability.csv --mode beds --beds-start 2019-02-01 --units PICUs,PCUs --out " + sim,
                dir)
                .code == 0);
    CHECK(fs::exists(dir / "sim" / "events.ndjson"));
    CHECK(fs::exists(dir / "sim" / "sim_records.csv"));
    CHECK(run("simulate --profiles " + ing + "/profiles.ndjson --availability " + a +
                  "/availability.csv --mode beds --out " + sim,
              dir)
              .code == 2);

    auto rep = run("report --records " + sim + "/sim_records.csv --periods 2019-01-01:2019-01-31,2019-02-01:2019-04-30" +
                       " --weekdays --bootstrap 0.25,500,1 --outliers 2,5 --output " + (dir / "r.json").string() +
                       " --svg " + (dir / "s.svg").string(),
                   dir);
    CHECK(rep.code == 0);
    auto body = slurp(dir / "r.json");
    CHECK(body.find("\"p_value\"") != std::string::npos);
    CHECK(body.find("\"outlier_days\"") != std::string::npos);
    CHECK(slurp(dir / "s.svg").rfind("<svg", 0) == 0);
    fs::remove_all(dir);
}
