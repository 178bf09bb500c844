#include "dualrisk/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dualrisk/errors.hpp"
#include "json.hpp"

namespace dualrisk::io {

using nlohmann::json;

std::string fmt_num(double v) {
    if (std::isnan(v)) throw non_finite("fmt_num: NaN has no serialized form");
    if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt_ext(num::ExtReal v) {
    if (v.is_inf()) return "inf";
    return fmt_num(v.get());
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

namespace {

// Numbers are emitted bare; infinities must become JSON strings.
std::string json_number(double v) {
    if (std::isinf(v)) return v > 0.0 ? "\"inf\"" : "\"-inf\"";
    return fmt_num(v);
}

} // namespace

JsonWriter& JsonWriter::field_raw(const std::string& key, const std::string& json_fragment) {
    if (!body_.empty()) body_ += ",";
    body_ += "\"" + json_escape(key) + "\":" + json_fragment;
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& key, double v) {
    return field_raw(key, json_number(v));
}

JsonWriter& JsonWriter::field(const std::string& key, num::ExtReal v) {
    return field_raw(key, v.is_inf() ? "\"inf\"" : json_number(v.get()));
}

JsonWriter& JsonWriter::field(const std::string& key, const std::string& v) {
    return field_raw(key, "\"" + json_escape(v) + "\"");
}

JsonWriter& JsonWriter::field_bool(const std::string& key, bool v) {
    return field_raw(key, v ? "true" : "false");
}

JsonWriter& JsonWriter::field_int(const std::string& key, long long v) {
    return field_raw(key, std::to_string(v));
}

std::string JsonWriter::str() const { return "{" + body_ + "}"; }

std::string csv_row(const std::vector<std::string>& cells) {
    std::string out;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].find_first_of(",\"\n") != std::string::npos)
            throw domain_error("csv_row: cell contains a delimiter: " + cells[i]);
        if (i) out += ",";
        out += cells[i];
    }
    out += "\n";
    return out;
}

namespace {

json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw parse_error(origin + ": invalid JSON: " + e.what());
    }
}

double need_num(const json& j, const char* key, const std::string& origin) {
    if (!j.contains(key) || !j[key].is_number())
        throw parse_error(origin + ": field \"" + key + "\" must be a number");
    return j[key].get<double>();
}

std::string need_str(const json& j, const char* key, const std::string& origin) {
    if (!j.contains(key) || !j[key].is_string())
        throw parse_error(origin + ": field \"" + key + "\" must be a string");
    return j[key].get<std::string>();
}

std::vector<out::Atom> need_pairs(const json& j, const char* key, const std::string& origin,
                                  bool required) {
    std::vector<out::Atom> atoms;
    if (!j.contains(key)) {
        if (required)
            throw parse_error(origin + ": field \"" + key + "\" must be an array of [value, prob]");
        return atoms;
    }
    const json& arr = j[key];
    if (!arr.is_array())
        throw parse_error(origin + ": field \"" + key + "\" must be an array of [value, prob]");
    for (size_t i = 0; i < arr.size(); ++i) {
        const json& pair = arr[i];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
            throw parse_error(origin + ": \"" + key + "\"[" + std::to_string(i) +
                              "] must be [value, prob]");
        atoms.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
    return atoms;
}

} // namespace

out::Outcome parse_distribution_text(const std::string& text, int quad_nodes,
                                     const std::string& origin) {
    json j = parse_json(text, origin);
    std::string type = need_str(j, "type", origin);
    if (type == "discrete") return out::Outcome::discrete(need_pairs(j, "atoms", origin, true));
    if (type == "exp_tail") {
        double r = need_num(j, "r", origin);
        double p = need_num(j, "p", origin);
        double c = need_num(j, "c", origin);
        return out::Outcome::exp_tail(r, p, c, need_pairs(j, "head", origin, false));
    }
    if (type == "normal_map") {
        std::string map = need_str(j, "map", origin);
        if (!j.contains("params") || !j["params"].is_object())
            throw parse_error(origin + ": field \"params\" must be an object");
        const json& params = j["params"];
        out::NormalMapInfo info;
        info.quad_nodes = quad_nodes;
        info.label = map;
        if (map == "affine") {
            double a = need_num(params, "a", origin);
            double b = need_num(params, "b", origin);
            return out::Outcome::normal_map([a, b](double z) { return a + b * z; }, info);
        }
        if (map == "affine_exp") {
            double a = need_num(params, "a", origin);
            double b = need_num(params, "b", origin);
            double c = need_num(params, "c", origin);
            // X = a + b e^{cZ}: bounded below when b >= 0; when b < 0 the
            // loss side is lognormal-heavy with no exponential moment.
            if (b < 0.0) info.mgf_radius = num::ExtReal::of(0.0);
            return out::Outcome::normal_map([a, b, c](double z) { return a + b * std::exp(c * z); },
                                            info);
        }
        throw parse_error(origin + ": map \"" + map + "\" not recognized (affine, affine_exp)");
    }
    throw parse_error(origin + ": type \"" + type +
                      "\" not recognized (discrete, exp_tail, normal_map)");
}

util::Utility parse_utility_text(const std::string& text, const std::string& origin) {
    json j = parse_json(text, origin);
    std::string kind = need_str(j, "kind", origin);
    if (kind == "linear") return util::Utility::linear();
    if (kind == "cara") return util::Utility::cara(need_num(j, "beta", origin));
    throw parse_error(origin + ": kind \"" + kind + "\" not recognized (linear, cara)");
}

mkt::Market parse_market_text(const std::string& text, int quad_nodes, const std::string& origin) {
    json j = parse_json(text, origin);
    std::string kernel = need_str(j, "kernel", origin);
    if (kernel == "lognormal")
        return mkt::Market::lognormal(need_num(j, "sigma2", origin), quad_nodes);
    if (kernel == "discrete") return mkt::Market::discrete(need_pairs(j, "atoms", origin, true));
    throw parse_error(origin + ": kernel \"" + kernel + "\" not recognized (lognormal, discrete)");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

out::Outcome parse_distribution_file(const std::string& path, int quad_nodes) {
    return parse_distribution_text(read_file(path), quad_nodes, path);
}

util::Utility parse_utility_file(const std::string& path) {
    return parse_utility_text(read_file(path), path);
}

mkt::Market parse_market_file(const std::string& path, int quad_nodes) {
    return parse_market_text(read_file(path), quad_nodes, path);
}

std::string render_discrete_distribution(const out::Outcome& x) {
    if (x.kind() != out::Outcome::Kind::Discrete)
        throw domain_error("render_discrete_distribution: finite discrete only");
    std::string atoms;
    for (const out::Atom& a : x.atoms()) {
        if (!atoms.empty()) atoms += ",";
        atoms += "[" + fmt_num(a.value) + "," + fmt_num(a.prob) + "]";
    }
    JsonWriter w;
    w.field("type", std::string("discrete")).field_raw("atoms", "[" + atoms + "]");
    return w.str();
}

} // namespace dualrisk::io
