#include "beds/service/http.hpp"

#include "beds/core/json_codec.hpp"

#include <chrono>

namespace beds::service {

using nlohmann::json;

namespace {

void send(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

template <class F>
httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
        try {
            send(res, 200, f(req));
        } catch (const ApiError& e) {
            send(res, http_status(e.code()), e.body());
        } catch (const ValidationError& e) {
            send(res, 400, ApiError(ApiCode::Validation, e.what()).body());
        } catch (const json::exception& e) {
            send(res, 400, ApiError(ApiCode::Validation, e.what()).body());
        } catch (const std::exception& e) {
            send(res, 500, json{{"code", "INTERNAL"}, {"message", e.what()}});
        }
    };
}

Day day_param(const httplib::Request& req, const char* name) {
    auto d = Day::try_parse(req.get_param_value(name));
    if (!d) throw ApiError(ApiCode::Validation, std::string("bad or missing '") + name + "' date");
    return *d;
}

json body_of(const httplib::Request& req) {
    try {
        return json::parse(req.body);
    } catch (const json::exception& e) {
        throw ApiError(ApiCode::Validation, std::string("body is not JSON: ") + e.what());
    }
}

}  // namespace

void mount_routes(httplib::Server& server, SchedulingService& service) {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Get("/heatmap", guarded([&service](const httplib::Request& req) {
        if (!req.has_param("unit")) throw ApiError(ApiCode::Validation, "missing 'unit'");
        DateWindow range;
        if (req.has_param("start") || req.has_param("end")) {
            const Day s = day_param(req, "start");
            const Day e = day_param(req, "end");
            if (e < s) throw ApiError(ApiCode::Validation, "end before start");
            range = DateWindow{s, e};
        } else {
            const Day ref = req.has_param("reference")
                                ? day_param(req, "reference")
                                : Day::of(std::chrono::floor<std::chrono::seconds>(
                                      std::chrono::system_clock::now()));
            range = DateWindow{ref - 14, ref + 30};
        }
        std::optional<Hours> duration;
        if (req.has_param("duration")) {
            duration = Hours::try_parse(req.get_param_value("duration"));
            if (!duration) throw ApiError(ApiCode::Validation, "bad 'duration'");
        }
        return service.heatmap(req.get_param_value("unit"), req.get_param_value("surgeon"), range,
                               duration);
    }));
    server.Post("/recommend", guarded([&service](const httplib::Request& req) {
        return service.recommend(body_of(req));
    }));
    server.Post("/book", guarded([&service](const httplib::Request& req) {
        return service.book(body_of(req));
    }));
    server.Get("/state", guarded([&service](const httplib::Request&) {
        return service.state_summary();
    }));
    server.Get("/health", guarded([&service](const httplib::Request&) {
        return json{{"status", "ok"}, {"version", service.version()}};
    }));
}

bool serve(SchedulingService& service, httplib::Server& server) {
    mount_routes(server, service);
    return server.listen(service.config().host, service.config().port);
}

}  // namespace beds::service
