#pragma once

#include <stdexcept>
#include <string>

namespace recbench {

/// Malformed or out-of-contract arguments. The CLI maps this to exit code 1.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A valid value used in a setup that cannot work, e.g. a camera inside the object.
class ConfigurationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A required file (model, dataset manifest) is absent. The CLI maps this to exit code 2.
class MissingArtifact : public std::runtime_error {
public:
    explicit MissingArtifact(const std::string& path)
        : std::runtime_error("missing artifact: " + path), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// File system or format failure; the message carries the offending path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace recbench
