#include "qcrapp/schema.hpp"

#include <cmath>

#include "qcrapp/config_schema_text.hpp"

namespace qcr::app {

namespace {

std::string at(const std::string& path) { return path.empty() ? "<root>" : path; }

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

bool has_type(const json& inst, const std::string& t) {
    if (t == "object") return inst.is_object();
    if (t == "array") return inst.is_array();
    if (t == "string") return inst.is_string();
    if (t == "boolean") return inst.is_boolean();
    if (t == "null") return inst.is_null();
    if (t == "number") return inst.is_number();
    if (t == "integer") {
        if (inst.is_number_integer()) return true;
        if (!inst.is_number_float()) return false;
        const double x = inst.get<double>();
        return std::isfinite(x) && x == std::floor(x);
    }
    throw std::logic_error("schema: unknown type " + t);
}

} // namespace

SchemaValidator::SchemaValidator(json schema) : root_(std::move(schema)) {}

void SchemaValidator::apply(json& instance) const { check(root_, instance, "", true); }

const json& SchemaValidator::resolve(const std::string& ref) const {
    if (ref.rfind("#/", 0) != 0) throw std::logic_error("schema: only local $ref supported: " + ref);
    return root_.at(json::json_pointer(ref.substr(1)));
}

bool SchemaValidator::matches(const json& s, const json& inst) const {
    json copy = inst;
    try {
        check(s, copy, "", false);
    } catch (const ConfigError&) {
        return false;
    }
    return true;
}

void SchemaValidator::check(const json& s, json& inst, const std::string& path, bool fill) const {
    if (s.contains("$ref")) check(resolve(s["$ref"].get<std::string>()), inst, path, fill);

    if (s.contains("type")) {
        const auto& t = s["type"];
        bool ok = false;
        if (t.is_array()) {
            for (const auto& e : t) ok = ok || has_type(inst, e.get<std::string>());
        } else {
            ok = has_type(inst, t.get<std::string>());
        }
        if (!ok) throw ConfigError(at(path) + ": expected " + t.dump() + ", got " + inst.dump());
    }
    if (s.contains("enum")) {
        bool ok = false;
        for (const auto& e : s["enum"]) ok = ok || e == inst;
        if (!ok) throw ConfigError(at(path) + ": must be one of " + s["enum"].dump() + ", got " + inst.dump());
    }
    if (s.contains("const") && s["const"] != inst)
        throw ConfigError(at(path) + ": must equal " + s["const"].dump());

    if (inst.is_number()) {
        const double x = inst.get<double>();
        if (!std::isfinite(x)) throw ConfigError(at(path) + ": must be finite");
        auto bound = [&](const char* key, auto bad, const char* rel) {
            if (s.contains(key) && bad(x, s[key].get<double>()))
                throw ConfigError(at(path) + ": must be " + rel + " " + s[key].dump() + ", got " + inst.dump());
        };
        bound("minimum", [](double a, double b) { return a < b; }, ">=");
        bound("maximum", [](double a, double b) { return a > b; }, "<=");
        bound("exclusiveMinimum", [](double a, double b) { return a <= b; }, ">");
        bound("exclusiveMaximum", [](double a, double b) { return a >= b; }, "<");
    }
    if (inst.is_string() && s.contains("minLength") &&
        inst.get<std::string>().size() < s["minLength"].get<std::size_t>())
        throw ConfigError(at(path) + ": string too short");

    if (inst.is_object()) {
        if (s.contains("required"))
            for (const auto& r : s["required"]) {
                const auto key = r.get<std::string>();
                if (!inst.contains(key)) throw ConfigError(join(path, key) + ": required field missing");
            }
        if (s.contains("properties")) {
            const auto& props = s["properties"];
            for (auto it = props.begin(); it != props.end(); ++it) {
                const auto& ps = it.value();
                if (!inst.contains(it.key())) {
                    const json* def = ps.contains("default") ? &ps["default"] : nullptr;
                    if (!def && ps.contains("$ref")) {
                        const auto& r = resolve(ps["$ref"].get<std::string>());
                        if (r.contains("default")) def = &r["default"];
                    }
                    if (!fill || !def) continue;
                    inst[it.key()] = *def;
                }
                check(ps, inst[it.key()], join(path, it.key()), fill);
            }
            if (s.contains("additionalProperties") && s["additionalProperties"] == false)
                for (auto it = inst.begin(); it != inst.end(); ++it)
                    if (!props.contains(it.key())) throw ConfigError(join(path, it.key()) + ": unknown field");
        }
    }
    if (inst.is_array()) {
        if (s.contains("minItems") && inst.size() < s["minItems"].get<std::size_t>())
            throw ConfigError(at(path) + ": needs at least " + s["minItems"].dump() + " items");
        if (s.contains("items"))
            for (std::size_t i = 0; i < inst.size(); ++i)
                check(s["items"], inst[i], at(path) + "[" + std::to_string(i) + "]", fill);
    }

    if (s.contains("allOf"))
        for (const auto& sub : s["allOf"]) check(sub, inst, path, fill);
    if (s.contains("oneOf")) {
        int hits = 0;
        for (const auto& sub : s["oneOf"]) hits += matches(sub, inst) ? 1 : 0;
        if (hits != 1) throw ConfigError(at(path) + ": must match exactly one of " + s["oneOf"].dump());
    }
    if (s.contains("if") && s.contains("then") && matches(s["if"], inst)) check(s["then"], inst, path, fill);
}

const json& config_schema() {
    static const json schema = json::parse(kConfigSchemaText);
    return schema;
}

} // namespace qcr::app
