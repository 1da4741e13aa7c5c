#ifndef AFFQ_BODY_SPEC_HPP
#define AFFQ_BODY_SPEC_HPP

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "affq/error.hpp"

namespace affq {

enum class BodyKind { fourier2d, harmonics3d, ellipsoid };

inline const char* to_string(BodyKind k) {
    switch (k) {
        case BodyKind::fourier2d: return "fourier2d";
        case BodyKind::harmonics3d: return "harmonics3d";
        case BodyKind::ellipsoid: return "ellipsoid";
    }
    return "unknown";
}

inline BodyKind parse_body_kind(const std::string& s) {
    if (s == "fourier2d") return BodyKind::fourier2d;
    if (s == "harmonics3d") return BodyKind::harmonics3d;
    if (s == "ellipsoid") return BodyKind::ellipsoid;
    throw Error(ErrorCode::BadSpec, "parse_body_kind", "unknown kind '" + s + "'");
}

// fourier2d: a0, a1, b1, ..., aK, bK (odd length).
// harmonics3d: (L+1)^2 real spherical-harmonic coefficients, index l*l+l+m.
// ellipsoid: `dim` semi-axes.
struct BodySpec {
    int dim = 3;
    BodyKind kind = BodyKind::ellipsoid;
    std::vector<double> coefficients;
    std::string label;
};

inline void check_spec(const BodySpec& spec) {
    const char* where = "make_body";
    if (spec.dim != 2 && spec.dim != 3)
        throw Error(ErrorCode::BadSpec, where, "dim must be 2 or 3");
    for (double c : spec.coefficients)
        if (!std::isfinite(c)) throw Error(ErrorCode::BadSpec, where, "non-finite coefficient");
    const std::size_t n = spec.coefficients.size();
    switch (spec.kind) {
        case BodyKind::fourier2d:
            if (spec.dim != 2) throw Error(ErrorCode::BadSpec, where, "fourier2d requires dim 2");
            if (n == 0 || n % 2 == 0)
                throw Error(ErrorCode::BadSpec, where,
                            "fourier2d needs an odd coefficient count (a0, then cos/sin pairs)");
            break;
        case BodyKind::harmonics3d: {
            if (spec.dim != 3) throw Error(ErrorCode::BadSpec, where, "harmonics3d requires dim 3");
            const auto root = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n))));
            if (n == 0 || root * root != n)
                throw Error(ErrorCode::BadSpec, where,
                            "harmonics3d needs (L+1)^2 coefficients, got " + std::to_string(n));
            break;
        }
        case BodyKind::ellipsoid:
            if (n != static_cast<std::size_t>(spec.dim))
                throw Error(ErrorCode::BadSpec, where, "ellipsoid needs one semi-axis per dimension");
            for (double a : spec.coefficients)
                if (!(a > 0.0)) throw Error(ErrorCode::BadSpec, where, "semi-axes must be positive");
            break;
    }
}

inline nlohmann::json spec_to_json(const BodySpec& spec) {
    nlohmann::json j;
    j["dim"] = spec.dim;
    j["kind"] = to_string(spec.kind);
    j["coefficients"] = spec.coefficients;
    j["label"] = spec.label;
    return j;
}

inline BodySpec spec_from_json(const nlohmann::json& j) {
    const char* where = "read_body_spec";
    if (!j.is_object()) throw Error(ErrorCode::BadSpec, where, "spec must be a JSON object");
    for (const char* key : {"dim", "kind", "coefficients"})
        if (!j.contains(key)) throw Error(ErrorCode::BadSpec, where, std::string("missing field ") + key);
    BodySpec spec;
    try {
        spec.dim = j.at("dim").get<int>();
        spec.kind = parse_body_kind(j.at("kind").get<std::string>());
        spec.coefficients = j.at("coefficients").get<std::vector<double>>();
        spec.label = j.value("label", std::string());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BadSpec, where, e.what());
    }
    check_spec(spec);
    return spec;
}

inline BodySpec parse_body_spec(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BadSpec, "read_body_spec", e.what());
    }
    return spec_from_json(j);
}

inline BodySpec read_body_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::BadSpec, "read_body_spec", "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_body_spec(ss.str());
}

inline std::string dump_body_spec(const BodySpec& spec) { return spec_to_json(spec).dump(2) + "\n"; }

}  // namespace affq

#endif  // AFFQ_BODY_SPEC_HPP
