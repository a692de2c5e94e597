#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace geosketch {

/// Base of every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed JSON input.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& message, std::size_t byte_offset)
        : Error(message), byte_offset_(byte_offset) {}
    std::size_t byte_offset() const { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

/// Missing, unknown or wrong-typed field. The path is a JSON pointer.
class SchemaError : public Error {
public:
    SchemaError(const std::string& message, std::string path)
        : Error(message + " at " + (path.empty() ? std::string("/") : path)), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// Dangling unit or horizon id.
class ReferenceError : public Error {
public:
    ReferenceError(const std::string& message, std::string id, std::string path)
        : Error(message), id_(std::move(id)), path_(std::move(path)) {}
    const std::string& id() const { return id_; }
    const std::string& path() const { return path_; }

private:
    std::string id_;
    std::string path_;
};

class EmptyConstraints : public Error {
public:
    EmptyConstraints() : Error("no constraints to interpolate") {}
};

/// The interpolation system is (numerically) singular.
class SingularSystem : public Error {
public:
    using Error::Error;
};

/// A horizon has only derivative data, so its height is undetermined.
class NoValueAnchor : public Error {
public:
    explicit NoValueAnchor(const std::string& horizon_id)
        : Error("horizon '" + horizon_id +
                "' has no value anchor: add a boundary line where it meets the terrain"),
          horizon_id_(horizon_id) {}
    const std::string& horizon_id() const { return horizon_id_; }

private:
    std::string horizon_id_;
};

class UnknownUnit : public Error {
public:
    explicit UnknownUnit(const std::string& unit_id)
        : Error("unit '" + unit_id + "' is not part of the age order"), unit_id_(unit_id) {}
    const std::string& unit_id() const { return unit_id_; }

private:
    std::string unit_id_;
};

class UnknownHorizon : public Error {
public:
    explicit UnknownHorizon(const std::string& horizon_id)
        : Error("horizon '" + horizon_id + "' is not declared in the sketch") {}
};

class BaseAboveTerrain : public Error {
public:
    using Error::Error;
};

class MissingCoverUnit : public Error {
public:
    MissingCoverUnit()
        : Error("every unit is the top of some horizon; no unit is left to cover the youngest horizon") {}
};

/// Relation graph contains a cycle, so no relative age order exists.
class CyclicRelations : public Error {
public:
    CyclicRelations(const std::string& message, std::vector<std::string> cycle)
        : Error(message), cycle_(std::move(cycle)) {}
    const std::vector<std::string>& cycle() const { return cycle_; }

private:
    std::vector<std::string> cycle_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace geosketch
