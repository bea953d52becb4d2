#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace meshsim {

/// A node id that does not exist in the topology it was used against.
class UnknownNodeError : public std::runtime_error {
public:
    explicit UnknownNodeError(unsigned long id)
        : std::runtime_error("unknown node id " + std::to_string(id)), id_(id) {}
    unsigned long id() const { return id_; }

private:
    unsigned long id_;
};

/// A pairwise query was made with both endpoints equal.
class SameNodeError : public std::runtime_error {
public:
    explicit SameNodeError(unsigned long id)
        : std::runtime_error("both endpoints are node " + std::to_string(id)) {}
};

/// Contention resolution was asked to pick a winner from nothing.
class EmptyContentionError : public std::runtime_error {
public:
    EmptyContentionError() : std::runtime_error("no contending intents to resolve") {}
};

/// Malformed scenario text (not valid JSON at all).
class ScenarioParseError : public std::runtime_error {
public:
    explicit ScenarioParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Structurally valid input that violates the scenario schema. Carries one
/// message per offending field, each prefixed with its field path
/// (e.g. "sessions[0].destination: node id 99 out of range").
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<std::string> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

    const std::vector<std::string>& issues() const { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues) {
        std::string out = "scenario validation failed:";
        for (const auto& s : issues) {
            out += "\n  " + s;
        }
        return out;
    }

    std::vector<std::string> issues_;
};

}  // namespace meshsim
