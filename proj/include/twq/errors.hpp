#pragma once

#include <stdexcept>
#include <string>

namespace twq {

// Error taxonomy mirrors the CLI exit codes: config=2, data/sizing=3, stat=4.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

struct sizing_error : std::runtime_error {
    explicit sizing_error(const std::string& what) : std::runtime_error(what) {}
};

struct data_error : std::runtime_error {
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

struct stat_error : std::runtime_error {
    explicit stat_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace twq
