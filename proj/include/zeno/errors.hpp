#pragma once

#include <stdexcept>
#include <string>

namespace zeno {

// Configuration and file-format problems (bad keys, malformed records, ...).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed data files: bad signatures, unexpected symbols, short records.
// Messages carry one-based line numbers where they apply.
class parse_error : public std::runtime_error {
public:
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an estimator is undefined on the given data, e.g. a run-length
// ratio with an empty denominator bin.
class estimator_error : public std::runtime_error {
public:
    explicit estimator_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a fit cannot proceed (unidentifiable data) or fails to converge
// within its iteration budget. The message carries the diagnostics.
class fit_error : public std::runtime_error {
public:
    explicit fit_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace zeno
