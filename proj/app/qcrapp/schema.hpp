// schema.hpp: validation of run configurations against the shipped JSON schema

#pragma once

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace qcr::app {

using json = nlohmann::json;

/// Invalid configuration; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The subset of JSON Schema 2020-12 the config schema uses: type, enum, const,
/// numeric bounds, minLength, required, properties, additionalProperties
/// (boolean), items, minItems, allOf, oneOf, if/then and local $ref.
/// Missing properties with a "default" are filled in.
class SchemaValidator {
public:
    explicit SchemaValidator(json schema);

    /// Validates `instance` in place, inserting defaults; throws ConfigError.
    void apply(json& instance) const;

private:
    void check(const json& s, json& inst, const std::string& path, bool fill) const;
    bool matches(const json& s, const json& inst) const;
    const json& resolve(const std::string& ref) const;

    json root_;
};

/// The schema compiled into the binary.
const json& config_schema();

} // namespace qcr::app
