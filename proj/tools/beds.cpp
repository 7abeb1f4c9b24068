#include "beds/core/errors.hpp"
#include "beds/core/json_codec.hpp"
#include "beds/engine/engine.hpp"
#include "beds/ingest/csv.hpp"
#include "beds/ingest/profile.hpp"
#include "beds/ingest/tables.hpp"
#include "beds/report/report.hpp"
#include "beds/service/http.hpp"
#include "beds/service/service.hpp"
#include "beds/sim/simulator.hpp"
#include "beds/synth/synth.hpp"

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace beds;

namespace {

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
}

std::ifstream open_in(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    return in;
}

Day day_arg(const std::string& s, const char* flag) {
    auto d = Day::try_parse(s);
    if (!d) throw ValidationError(std::string(flag) + ": expected YYYY-MM-DD, got '" + s + "'");
    return *d;
}

std::set<UnitId> unit_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

std::vector<ingest::PatientProfile> load_profiles(const fs::path& p) {
    auto in = open_in(p);
    return ingest::read_profiles(in);
}

std::vector<ingest::SurgeonAvailabilityRow> load_availability(const fs::path& p) {
    auto in = open_in(p);
    std::vector<ingest::Reject> rejects;
    auto rows = ingest::parse_availability(in, rejects);
    for (const auto& r : rejects)
        std::cerr << "warning: availability row " << r.row << " rejected: " << r.reason << '\n';
    return rows;
}

void write_json(const fs::path& p, const json& j) {
    auto out = open_out(p);
    out << j.dump(2) << '\n';
}

// ---- ingest ---------------------------------------------------------------

struct IngestArgs {
    std::string census, procedures, availability, out_dir = ".";
    std::string sim_start, warmup_start;
    std::int64_t warmup_days = 365;
    std::vector<std::string> scope{"PICUs", "PCUs", "MAIN OR"};
    double alpha = 1.0;
    double infer_threshold = 3.0, infer_block = 7.0;
};

int cmd_ingest(const IngestArgs& a) {
    std::optional<fs::path> avail;
    if (!a.availability.empty()) avail = a.availability;
    auto tables = ingest::parse_tables(a.census, a.procedures, avail);

    ingest::IngestOptions opts;
    if (!a.sim_start.empty()) {
        opts = ingest::IngestOptions::for_sim_start(day_arg(a.sim_start, "--sim-start"), a.warmup_days);
    }
    if (!a.warmup_start.empty()) opts.warmup_start = day_arg(a.warmup_start, "--warmup-start");
    opts.scope_units = unit_set(a.scope);
    opts.alpha = a.alpha;

    auto built = ingest::build_profiles(tables.census, tables.procedures, tables.rejects, opts);

    fs::path dir = a.out_dir;
    fs::create_directories(dir);
    {
        auto out = open_out(dir / "profiles.ndjson");
        ingest::write_profiles(out, built.profiles);
    }
    write_json(dir / "cleaning_report.json", ingest::to_json(built.report));
    {
        auto out = open_out(dir / "rejects.csv");
        ingest::write_csv_record(out, {"table", "row", "primary_csn", "reason"});
        for (const auto& r : tables.rejects)
            ingest::write_csv_record(out, {r.table, std::to_string(r.row), r.primary_csn, r.reason});
    }
    std::vector<ingest::SurgeonAvailabilityRow> availability;
    if (tables.availability) {
        availability = *tables.availability;
    } else {
        availability = ingest::infer_surgeon_availability(
            tables.procedures, Hours::from_double(a.infer_threshold), Hours::from_double(a.infer_block));
        auto out = open_out(dir / "availability.csv");
        ingest::write_availability(out, availability);
        std::cerr << "inferred availability for " << availability.size() << " surgeon-days\n";
    }
    write_json(dir / "initial_state.json", ledger_to_json(ingest::initial_state(built.profiles, availability)));

    std::cout << built.profiles.size() << " profiles, " << built.report.excluded() << " patients excluded, "
              << tables.rejects.size() << " rows rejected\n";
    return 0;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
    std::string profiles, availability, out_dir = ".";
    std::string mode = "historical";
    std::string beds_start;
    std::vector<std::string> units{"PICUs"};
    double alpha = 1.0;
    std::uint64_t seed = 0;
    std::optional<double> los_perturbation;
    bool no_historical_hours = false;
    std::string policy = "greedy";
    std::int64_t horizon_cap = engine::kDefaultHorizonCap;
    bool no_events = false;
};

int cmd_simulate(const SimulateArgs& a) {
    sim::SimConfig cfg;
    if (a.mode == "historical") {
        cfg.mode = sim::SchedulerMode::Historical;
    } else if (a.mode == "beds") {
        cfg.mode = sim::SchedulerMode::Beds;
        if (a.beds_start.empty()) throw ValidationError("--mode beds requires --beds-start");
    } else {
        throw ValidationError("--mode must be historical or beds");
    }
    if (!a.beds_start.empty()) cfg.beds_start_date = day_arg(a.beds_start, "--beds-start");
    cfg.beds_units = unit_set(a.units);
    cfg.alpha = a.alpha;
    cfg.rng_seed = a.seed;
    cfg.los_perturbation = a.los_perturbation;
    cfg.consume_historical_hours = !a.no_historical_hours;
    cfg.policy = a.policy;
    cfg.engine.horizon_cap = a.horizon_cap;
    cfg.validate();

    auto profiles = load_profiles(a.profiles);
    auto availability = load_availability(a.availability);
    auto result = sim::run(profiles, availability, cfg);

    fs::path dir = a.out_dir;
    fs::create_directories(dir);
    if (!a.no_events) {
        auto out = open_out(dir / "events.ndjson");
        sim::write_event_log(out, result.events);
    }
    {
        auto out = open_out(dir / "sim_records.csv");
        sim::write_records_csv(out, result.records);
    }
    json summary{{"mode", a.mode},
                 {"patients", result.records.size()},
                 {"events", result.events.size()},
                 {"rescheduled", result.rescheduled},
                 {"fallbacks", result.fallbacks},
                 {"seed", a.seed},
                 {"alpha", a.alpha},
                 {"policy", a.policy},
                 {"units", a.units}};
    if (!a.beds_start.empty()) summary["beds_start"] = a.beds_start;
    write_json(dir / "summary.json", summary);
    std::cout << summary.dump() << '\n';
    return 0;
}

// ---- report ---------------------------------------------------------------

struct ReportArgs {
    std::string records, unit = "PICUs";
    std::vector<std::string> periods;
    bool weekdays = false, all = false, original = false, sample_sd = false;
    std::string bootstrap, outliers, format = "json", out, svg, histogram_svg;
    bool absolute = false;
    std::optional<int> acf;
    std::optional<std::int64_t> histogram;
};

int cmd_report(const ReportArgs& a) {
    report::ReportOptions o;
    o.unit = a.unit;
    for (const auto& p : a.periods) o.periods.push_back(report::parse_period(p));
    o.weekdays = a.weekdays;
    o.elective_only = !a.all;
    o.day_column = a.original ? report::DayColumn::Original : report::DayColumn::Simulated;
    o.deviation = a.sample_sd ? metrics::Deviation::Sample : metrics::Deviation::Population;
    if (!a.bootstrap.empty()) {
        o.bootstrap = report::parse_bootstrap(a.bootstrap);
        if (a.absolute) o.bootstrap->kind = metrics::ChangeKind::Absolute;
    }
    if (!a.outliers.empty()) {
        int lo = 0, hi = 0;
        char comma = 0;
        std::istringstream ss(a.outliers);
        if (!(ss >> lo >> comma >> hi) || comma != ',' || !ss.eof())
            throw ValidationError("--outliers expects LO,HI");
        o.outliers = std::pair{lo, hi};
    }
    o.acf_lags = a.acf;
    o.histogram_width = a.histogram;
    if (!a.histogram_svg.empty() && !o.histogram_width) o.histogram_width = 1;

    auto in = open_in(a.records);
    auto records = report::read_records_csv(in);
    auto rep = report::build_report(records, o);

    std::ostringstream body;
    if (a.format == "json") {
        body << rep.body.dump(2) << '\n';
    } else if (a.format == "csv") {
        report::write_report_csv(body, rep);
    } else {
        throw ValidationError("--format must be json or csv");
    }
    if (a.out.empty()) {
        std::cout << body.str();
    } else {
        auto out = open_out(a.out);
        out << body.str();
    }
    if (!a.svg.empty()) {
        auto out = open_out(a.svg);
        report::write_series_svg(out, rep.series, "Daily admissions, " + a.unit);
    }
    if (!a.histogram_svg.empty()) {
        auto out = open_out(a.histogram_svg);
        report::write_histogram_svg(out, *rep.histogram, "Reschedule shift (days)");
    }
    return 0;
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
    synth::SynthConfig cfg;
    std::string start = "2019-01-01", out_dir = ".";
    std::vector<std::string> units;
    double block_hours = 7.0;
    bool print_truth = false;
};

synth::UnitSpec parse_unit_spec(const std::string& s) {
    // NAME:elective:emergent:medical:los_mu:los_sigma
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 6) throw ValidationError("--unit expects NAME:elective:emergent:medical:mu:sigma");
    try {
        return {parts[0], std::stod(parts[1]), std::stod(parts[2]), std::stod(parts[3]),
                std::stod(parts[4]), std::stod(parts[5])};
    } catch (const std::exception&) {
        throw ValidationError("bad number in --unit '" + s + "'");
    }
}

int cmd_synth(SynthArgs a) {
    a.cfg.start = day_arg(a.start, "--start");
    a.cfg.block_hours = Hours::from_double(a.block_hours);
    if (!a.units.empty()) {
        a.cfg.units.clear();
        for (const auto& u : a.units) a.cfg.units.push_back(parse_unit_spec(u));
    }
    a.cfg.validate();
    auto data = synth::generate(a.cfg);

    fs::path dir = a.out_dir;
    fs::create_directories(dir);
    {
        auto out = open_out(dir / "census.csv");
        ingest::write_census(out, data.census);
    }
    {
        auto out = open_out(dir / "procedures.csv");
        ingest::write_procedures(out, data.procedures);
    }
    {
        auto out = open_out(dir / "availability.csv");
        ingest::write_availability(out, data.availability);
    }
    if (a.print_truth) {
        auto out = open_out(dir / "admissions_truth.csv");
        ingest::write_csv_record(out, {"day", "unit", "elective"});
        for (const auto& r : data.admissions)
            ingest::write_csv_record(out, {r.day.iso(), r.unit, r.elective ? "1" : "0"});
    }
    std::cout << data.census.size() << " census rows, " << data.procedures.size() << " procedures, "
              << data.availability.size() << " availability rows (capacity ratio "
              << a.cfg.capacity_ratio() << ")\n";
    return 0;
}

// ---- serve ----------------------------------------------------------------

struct ServeArgs {
    service::ServiceConfig cfg;
    std::string journal = "beds-journal.ndjson", snapshot = "beds-snapshot.json";
    std::string load, availability;
    bool no_fsync = false;
};

httplib::Server* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

int cmd_serve(ServeArgs a) {
    a.cfg.journal_path = a.journal;
    a.cfg.snapshot_path = a.snapshot;
    a.cfg.fsync = !a.no_fsync;
    a.cfg.validate();

    std::optional<ScheduleState> initial;
    if (!a.load.empty() || !a.availability.empty()) {
        std::vector<ingest::PatientProfile> profiles;
        if (!a.load.empty()) profiles = load_profiles(a.load);
        std::vector<ingest::SurgeonAvailabilityRow> avail;
        if (!a.availability.empty()) avail = load_availability(a.availability);
        initial = ingest::initial_state(profiles, avail);
    }
    service::SchedulingService svc(a.cfg, std::move(initial));
    httplib::Server server;
    service::mount_routes(server, svc);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "listening on " << a.cfg.host << ':' << a.cfg.port << " (version " << svc.version() << ")\n";
    if (!service::serve(svc, server)) {
        std::cerr << "error: cannot bind " << a.cfg.host << ':' << a.cfg.port << '\n';
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"BEDS surgical admission level-loading toolkit"};
    app.require_subcommand(1);

    IngestArgs ia;
    auto* ingest_cmd = app.add_subcommand("ingest", "Build patient profiles from census and procedure tables");
    ingest_cmd->add_option("--census", ia.census, "Midnight census CSV")->required()->check(CLI::ExistingFile);
    ingest_cmd->add_option("--procedures", ia.procedures, "Procedure record CSV")->required()->check(CLI::ExistingFile);
    ingest_cmd->add_option("--availability", ia.availability, "Surgeon availability CSV (inferred when absent)")
        ->check(CLI::ExistingFile);
    ingest_cmd->add_option("--out", ia.out_dir, "Output directory")->capture_default_str();
    ingest_cmd->add_option("--sim-start", ia.sim_start, "First simulated day; warm-up precedes it");
    ingest_cmd->add_option("--warmup-days", ia.warmup_days, "Warm-up length before --sim-start")->capture_default_str();
    ingest_cmd->add_option("--warmup-start", ia.warmup_start, "Drop patients arriving before this day");
    ingest_cmd->add_option("--scope", ia.scope, "Units kept by name; others are relabelled")
        ->delimiter(',')->capture_default_str();
    ingest_cmd->add_option("--alpha", ia.alpha, "Available-window width factor")->capture_default_str();
    ingest_cmd->add_option("--infer-threshold", ia.infer_threshold, "Hours operated that mark a block day")
        ->capture_default_str();
    ingest_cmd->add_option("--infer-block", ia.infer_block, "Hours assigned to an inferred block")
        ->capture_default_str();

    SimulateArgs sa;
    auto* sim_cmd = app.add_subcommand("simulate", "Replay or reschedule a population");
    sim_cmd->add_option("--profiles", sa.profiles, "profiles.ndjson")->required()->check(CLI::ExistingFile);
    sim_cmd->add_option("--availability", sa.availability, "Surgeon availability CSV")
        ->required()->check(CLI::ExistingFile);
    sim_cmd->add_option("--out", sa.out_dir, "Output directory")->capture_default_str();
    sim_cmd->add_option("--mode", sa.mode, "historical or beds")
        ->check(CLI::IsMember({"historical", "beds"}))->capture_default_str();
    sim_cmd->add_option("--beds-start", sa.beds_start, "Day the recommendation engine takes over");
    sim_cmd->add_option("--units", sa.units, "Units scheduled by the engine")->delimiter(',')->capture_default_str();
    sim_cmd->add_option("--alpha", sa.alpha, "Available-window width factor")->capture_default_str();
    sim_cmd->add_option("--seed", sa.seed, "Random seed for LOS perturbation")->capture_default_str();
    sim_cmd->add_option("--los-perturbation", sa.los_perturbation, "Uniform multiplicative LOS noise fraction");
    sim_cmd->add_flag("--no-historical-hours", sa.no_historical_hours,
                      "Do not draw down surgeon hours for unscheduled patients");
    sim_cmd->add_option("--policy", sa.policy, "Ranking policy")->capture_default_str();
    sim_cmd->add_option("--horizon-cap", sa.horizon_cap, "Maximum days scanned per request")->capture_default_str();
    sim_cmd->add_flag("--no-events", sa.no_events, "Skip writing events.ndjson");

    ReportArgs ra;
    auto* rep_cmd = app.add_subcommand("report", "Daily admission statistics from simulation records");
    rep_cmd->add_option("--records", ra.records, "sim_records.csv")->required()->check(CLI::ExistingFile);
    rep_cmd->add_option("--unit", ra.unit, "Unit to report")->capture_default_str();
    rep_cmd->add_option("--periods", ra.periods, "label=START:END, comma separated")->delimiter(',');
    rep_cmd->add_flag("--weekdays", ra.weekdays, "Split each period by weekday");
    rep_cmd->add_option("--bootstrap", ra.bootstrap, "delta,m,seed; needs two periods");
    rep_cmd->add_flag("--absolute", ra.absolute, "Bootstrap on absolute rather than relative change");
    rep_cmd->add_option("--outliers", ra.outliers, "LO,HI; count days outside [LO, HI]");
    rep_cmd->add_option("--acf", ra.acf, "Autocorrelation up to this lag");
    rep_cmd->add_option("--histogram", ra.histogram, "Reschedule-shift histogram bin width (days)");
    rep_cmd->add_flag("--all", ra.all, "Count all admissions, not only elective ones");
    rep_cmd->add_flag("--original", ra.original, "Use the recorded day instead of the simulated day");
    rep_cmd->add_flag("--sample-sd", ra.sample_sd, "Use the sample standard deviation");
    rep_cmd->add_option("--format", ra.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    rep_cmd->add_option("--output", ra.out, "Write the report here instead of stdout");
    rep_cmd->add_option("--svg", ra.svg, "Write a time-series plot");
    rep_cmd->add_option("--histogram-svg", ra.histogram_svg, "Write a histogram plot");

    SynthArgs ya;
    auto& sc = ya.cfg;
    auto* syn_cmd = app.add_subcommand("synth", "Generate a synthetic census/procedure/availability triple");
    syn_cmd->add_option("--out", ya.out_dir, "Output directory")->capture_default_str();
    syn_cmd->add_option("--start", ya.start, "First day")->capture_default_str();
    syn_cmd->add_option("--horizon", sc.horizon_days, "Days of arrivals")->capture_default_str();
    syn_cmd->add_option("--unit", ya.units, "NAME:elective:emergent:medical:los_mu:los_sigma (repeatable)");
    syn_cmd->add_option("--outpatient-rate", sc.outpatient_rate, "Outpatient surgeries per day")
        ->capture_default_str();
    syn_cmd->add_option("--lead-mean", sc.lead_mean_days, "Mean lead days (geometric)")->capture_default_str();
    syn_cmd->add_option("--duration-mu", sc.duration_mu, "Log-normal surgery hours mu")->capture_default_str();
    syn_cmd->add_option("--duration-sigma", sc.duration_sigma, "Log-normal surgery hours sigma")
        ->capture_default_str();
    syn_cmd->add_option("--transfer-prob", sc.transfer_prob, "Probability of a step-down transfer")
        ->capture_default_str();
    syn_cmd->add_option("--transfer-unit", sc.transfer_unit, "Step-down unit")->capture_default_str();
    syn_cmd->add_option("--surgeons", sc.surgeons, "Surgeon count")->capture_default_str();
    syn_cmd->add_option("--blocks-per-week", sc.blocks_per_week, "OR blocks per surgeon per week")
        ->capture_default_str();
    syn_cmd->add_option("--block-hours", ya.block_hours, "Hours per block")->capture_default_str();
    syn_cmd->add_option("--or-location", sc.or_location, "Operating room location")->capture_default_str();
    syn_cmd->add_option("--seed", sc.seed, "Random seed")->capture_default_str();
    syn_cmd->add_flag("--truth", ya.print_truth, "Also write admissions_truth.csv");

    ServeArgs va;
    auto* srv_cmd = app.add_subcommand("serve", "Run the scheduling service");
    srv_cmd->add_option("--host", va.cfg.host, "Bind address")->capture_default_str();
    srv_cmd->add_option("--port", va.cfg.port, "Port")->capture_default_str();
    srv_cmd->add_option("--journal", va.journal, "Booking journal")->capture_default_str();
    srv_cmd->add_option("--snapshot", va.snapshot, "Ledger snapshot")->capture_default_str();
    srv_cmd->add_option("--load", va.load, "profiles.ndjson used to seed a fresh ledger")->check(CLI::ExistingFile);
    srv_cmd->add_option("--availability", va.availability, "Availability CSV used to seed a fresh ledger")
        ->check(CLI::ExistingFile);
    srv_cmd->add_option("--thresholds", va.cfg.thresholds, "Heatmap bucket thresholds")
        ->delimiter(',')->capture_default_str();
    srv_cmd->add_option("--top-n", va.cfg.default_n, "Default number of recommended days")->capture_default_str();
    srv_cmd->add_option("--horizon-cap", va.cfg.engine.horizon_cap, "Maximum days scanned per request")
        ->capture_default_str();
    srv_cmd->add_option("--snapshot-every", va.cfg.snapshot_every, "Bookings between snapshots")
        ->capture_default_str();
    srv_cmd->add_flag("--no-fsync", va.no_fsync, "Skip fsync on journal writes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*ingest_cmd) return cmd_ingest(ia);
        if (*sim_cmd) return cmd_simulate(sa);
        if (*rep_cmd) return cmd_report(ra);
        if (*syn_cmd) return cmd_synth(ya);
        if (*srv_cmd) return cmd_serve(va);
    } catch (const MalformedHeader& e) {
        std::cerr << "error: " << e.what() << '\n' << "missing column: " << e.column() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
