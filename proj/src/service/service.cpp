#include "beds/service/service.hpp"

#include "beds/core/json_codec.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace beds::service {

using nlohmann::json;

void ServiceConfig::validate() const {
    engine::validate_thresholds(thresholds);
    if (default_n < 1) throw ValidationError("default n must be at least 1");
    if (port < 0 || port > 65535) throw ValidationError("port out of range");
    if (journal_path.empty() || snapshot_path.empty())
        throw ValidationError("journal and snapshot paths are required");
}

std::string to_string(ApiCode c) {
    switch (c) {
        case ApiCode::NoFeasibleDay: return "NO_FEASIBLE_DAY";
        case ApiCode::DayNotFeasible: return "DAY_NOT_FEASIBLE";
        case ApiCode::InsufficientHours: return "INSUFFICIENT_HOURS";
        case ApiCode::Validation: return "VALIDATION";
        case ApiCode::Conflict: return "CONFLICT";
    }
    return "VALIDATION";
}

int http_status(ApiCode c) {
    switch (c) {
        case ApiCode::Validation: return 400;
        case ApiCode::NoFeasibleDay:
        case ApiCode::DayNotFeasible: return 422;
        case ApiCode::InsufficientHours:
        case ApiCode::Conflict: return 409;
    }
    return 400;
}

namespace {

[[noreturn]] void sys_fail(const std::string& what, const std::filesystem::path& p) {
    throw std::runtime_error(what + " " + p.string() + ": " + std::strerror(errno));
}

void write_all(int fd, const std::string& data, const std::filesystem::path& p) {
    const char* ptr = data.data();
    std::size_t left = data.size();
    while (left > 0) {
        const ssize_t n = ::write(fd, ptr, left);
        if (n < 0) {
            if (errno == EINTR) continue;
            sys_fail("write", p);
        }
        ptr += n;
        left -= static_cast<std::size_t>(n);
    }
}

void fsync_dir(const std::filesystem::path& file) {
    auto dir = file.parent_path();
    if (dir.empty()) dir = ".";
    const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
    if (fd < 0) return;
    ::fsync(fd);
    ::close(fd);
}

std::string now_iso() {
    return format_timestamp(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

}  // namespace

Journal::Journal(std::filesystem::path path, bool fsync) : path_(std::move(path)), fsync_(fsync) {
    fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) sys_fail("cannot open journal", path_);
}

Journal::~Journal() {
    if (fd_ >= 0) ::close(fd_);
}

void Journal::append(const Booking& b) {
    std::ostringstream line;
    write_journal_line(line, b);
    write_all(fd_, line.str(), path_);
    if (fsync_ && ::fsync(fd_) != 0) sys_fail("fsync", path_);
}

void Journal::truncate() {
    if (::ftruncate(fd_, 0) != 0) sys_fail("truncate", path_);
    if (fsync_) ::fsync(fd_);
}

void write_snapshot(const std::filesystem::path& path, const ScheduleState& state, bool fsync) {
    auto tmp = path;
    tmp += ".tmp";
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) sys_fail("cannot open snapshot", tmp);
    try {
        write_all(fd, ledger_to_json(state).dump() + "\n", tmp);
        if (fsync && ::fsync(fd) != 0) sys_fail("fsync", tmp);
    } catch (...) {
        ::close(fd);
        throw;
    }
    ::close(fd);
    std::filesystem::rename(tmp, path);
    if (fsync) fsync_dir(path);
}

ScheduleState read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open snapshot " + path.string());
    try {
        return ledger_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw ParseError("snapshot " + path.string() + ": " + e.what());
    }
}

ScheduleState recover(const std::filesystem::path& snapshot, const std::filesystem::path& journal,
                      const std::optional<ScheduleState>& initial, bool* torn_tail) {
    ScheduleState state;
    if (std::filesystem::exists(snapshot))
        state = read_snapshot(snapshot);
    else if (initial)
        state = *initial;
    if (torn_tail) *torn_tail = false;
    if (std::filesystem::exists(journal)) {
        std::ifstream in(journal);
        for (const auto& b : read_journal(in, torn_tail))
            if (b.sequence_number > state.last_sequence()) state.apply(b);
    }
    state.compact_journal();
    return state;
}

CaseRequest parse_case_request(const json& body) {
    CaseRequest req;
    try {
        req = body.get<CaseRequest>();
        req.validate();
    } catch (const json::exception& e) {
        throw ApiError(ApiCode::Validation, std::string("bad case request: ") + e.what());
    } catch (const Error& e) {
        throw ApiError(ApiCode::Validation, e.what());
    }
    return req;
}

SchedulingService::SchedulingService(ServiceConfig config, std::optional<ScheduleState> initial)
    : config_(std::move(config)), journal_(config_.journal_path, config_.fsync) {
    config_.validate();
    bool torn = false;
    state_ = recover(config_.snapshot_path, config_.journal_path, initial, &torn);
    if (torn || !std::filesystem::exists(config_.snapshot_path)) {
        write_snapshot(config_.snapshot_path, state_, config_.fsync);
        journal_.truncate();
    }
}

std::uint64_t SchedulingService::version() const {
    std::shared_lock lock(mutex_);
    return state_.last_sequence();
}

ScheduleState SchedulingService::ledger() const {
    std::shared_lock lock(mutex_);
    return state_;
}

json SchedulingService::heatmap(const UnitId& unit, const SurgeonId& surgeon, DateWindow range,
                                std::optional<Hours> duration) const {
    if (range.length() > 2 * 366) throw ApiError(ApiCode::Validation, "range longer than two years");
    std::shared_lock lock(mutex_);
    auto cells = engine::heatmap(state_, unit, surgeon, range, config_.thresholds, duration);
    json out = json::array();
    for (const auto& c : cells) {
        json j{{"day", c.day},
               {"admissions", c.admissions},
               {"surgeon_hours", c.surgeon_hours},
               {"bucket", c.bucket}};
        if (c.feasible) j["feasible"] = *c.feasible;
        out.push_back(std::move(j));
    }
    return {{"unit", unit},          {"surgeon", surgeon},
            {"start", range.start},  {"end", range.end},
            {"thresholds", config_.thresholds}, {"version", state_.last_sequence()},
            {"cells", std::move(out)}};
}

json SchedulingService::recommend(const json& body) const {
    const CaseRequest req = parse_case_request(body);
    const int n = body.contains("n") && !body.at("n").is_null() ? body.at("n").get<int>() : config_.default_n;
    if (n < 1) throw ApiError(ApiCode::Validation, "n must be at least 1");
    std::unique_ptr<engine::RankingPolicy> policy;
    try {
        policy = engine::make_policy(body.value("policy", std::string("greedy")));
    } catch (const ValidationError& e) {
        throw ApiError(ApiCode::Validation, e.what());
    }
    std::shared_lock lock(mutex_);
    try {
        auto rec = engine::recommend_topn(state_, req, *policy, n, config_.thresholds, config_.engine);
        json ann = json::array();
        for (const auto& a : rec.annotations)
            ann.push_back({{"day", a.day},
                           {"admissions", a.admissions},
                           {"surgeon_hours", a.surgeon_hours},
                           {"bucket", a.bucket}});
        return {{"ranked_days", rec.ranked_days},
                {"annotations", std::move(ann)},
                {"policy", rec.policy},
                {"version", state_.last_sequence()}};
    } catch (const NoFeasibleDay& e) {
        throw ApiError(ApiCode::NoFeasibleDay, e.what());
    }
}

json SchedulingService::book(const json& body) {
    const CaseRequest req = parse_case_request(body);
    Day day;
    std::optional<std::uint64_t> seen;
    try {
        day = body.at("day").get<Day>();
        if (body.contains("version") && !body.at("version").is_null())
            seen = body.at("version").get<std::uint64_t>();
    } catch (const std::exception& e) {
        throw ApiError(ApiCode::Validation, std::string("bad booking: ") + e.what());
    }

    std::unique_lock lock(mutex_);
    const bool stale = seen && *seen < state_.last_sequence();
    auto reject = [&](ApiCode code, const std::string& msg) {
        throw ApiError(stale ? ApiCode::Conflict : code,
                       stale ? msg + " (state changed since version " + std::to_string(*seen) + ")"
                             : msg);
    };
    if (!req.clinical_window.contains(day) || !req.patient_window.contains(day))
        reject(ApiCode::DayNotFeasible, day.iso() + " is outside the request windows");
    if (state_.hours(day, req.surgeon_id) < req.duration_hours)
        reject(ApiCode::InsufficientHours,
               "surgeon " + req.surgeon_id + " has " + state_.hours(day, req.surgeon_id).str() +
                   " h on " + day.iso() + ", case needs " + req.duration_hours.str());

    Booking b{req.patient_id, req.surgeon_id,          req.post_op_unit, day,
              req.duration_hours, state_.next_sequence(), now_iso()};
    journal_.append(b);
    state_.apply(b);
    ++since_snapshot_;
    maybe_snapshot();
    json out = b;
    out["version"] = state_.last_sequence();
    return out;
}

json SchedulingService::state_summary() const {
    std::shared_lock lock(mutex_);
    json out = ledger_to_json(state_);
    std::int64_t admissions = 0;
    for (const auto& [k, n] : state_.unit_admissions()) admissions += n;
    out["version"] = state_.last_sequence();
    out["total_admissions"] = admissions;
    return out;
}

void SchedulingService::maybe_snapshot() {
    if (config_.snapshot_every <= 0 || since_snapshot_ < config_.snapshot_every) return;
    write_snapshot(config_.snapshot_path, state_, config_.fsync);
    journal_.truncate();
    state_.compact_journal();
    since_snapshot_ = 0;
}

}  // namespace beds::service
