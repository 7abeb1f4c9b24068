#pragma once

#include "beds/core/errors.hpp"
#include "beds/core/model.hpp"
#include "beds/engine/engine.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace beds::service {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path journal_path = "beds-journal.ndjson";
    std::filesystem::path snapshot_path = "beds-snapshot.json";
    std::vector<std::int64_t> thresholds{engine::kDefaultThresholds.begin(),
                                         engine::kDefaultThresholds.end()};
    int default_n = 3;
    engine::EngineOptions engine;
    std::int64_t snapshot_every = 1000;
    bool fsync = true;

    void validate() const;  // throws ValidationError
};

enum class ApiCode { NoFeasibleDay, DayNotFeasible, InsufficientHours, Validation, Conflict };

std::string to_string(ApiCode c);
int http_status(ApiCode c);

class ApiError : public Error {
public:
    ApiError(ApiCode code, const std::string& message) : Error(message), code_(code) {}
    ApiCode code() const noexcept { return code_; }
    nlohmann::json body() const { return {{"code", to_string(code_)}, {"message", what()}}; }

private:
    ApiCode code_;
};

/// Append-only NDJSON booking journal; each append is flushed (and fsynced
/// when enabled) before it returns.
class Journal {
public:
    Journal(std::filesystem::path path, bool fsync);
    ~Journal();
    Journal(const Journal&) = delete;
    Journal& operator=(const Journal&) = delete;

    void append(const Booking& b);
    void truncate();
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    bool fsync_;
    int fd_ = -1;
};

// Atomically replaces `path` with the ledger (temp file, fsync, rename).
void write_snapshot(const std::filesystem::path& path, const ScheduleState& state, bool fsync = true);
ScheduleState read_snapshot(const std::filesystem::path& path);

/// Rebuilds a ledger the way the service does at start-up: snapshot (or
/// `initial`, or empty) plus every journal entry newer than it.
ScheduleState recover(const std::filesystem::path& snapshot, const std::filesystem::path& journal,
                      const std::optional<ScheduleState>& initial = std::nullopt,
                      bool* torn_tail = nullptr);

/// The live ledger behind the HTTP API. Readers share a lock; bookings take
/// it exclusively, so the journal order is the serialization order.
class SchedulingService {
public:
    // Recovers from the snapshot and journal in `config`. `initial` seeds a
    // fresh deployment and is ignored when a snapshot already exists.
    explicit SchedulingService(ServiceConfig config,
                               std::optional<ScheduleState> initial = std::nullopt);

    // All methods throw ApiError for client-visible failures.
    nlohmann::json heatmap(const UnitId& unit, const SurgeonId& surgeon, DateWindow range,
                           std::optional<Hours> duration = std::nullopt) const;
    nlohmann::json recommend(const nlohmann::json& body) const;
    nlohmann::json book(const nlohmann::json& body);
    nlohmann::json state_summary() const;

    std::uint64_t version() const;
    ScheduleState ledger() const;
    const ServiceConfig& config() const { return config_; }

private:
    void maybe_snapshot();

    ServiceConfig config_;
    mutable std::shared_mutex mutex_;
    ScheduleState state_;
    Journal journal_;
    std::int64_t since_snapshot_ = 0;
};

// Parses a CaseRequest from a request body; ApiError(Validation) on failure.
CaseRequest parse_case_request(const nlohmann::json& body);

}  // namespace beds::service
