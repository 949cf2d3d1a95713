#ifndef FLEETSIM_ERROR_HPP
#define FLEETSIM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace fleetsim {

// Config: a scenario/argument problem the caller can fix without touching data.
// Data: a problem in an input file (graph, trace, model, cost matrix).
enum class ErrorKind { Config = 1, Data = 2 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void config_error(const std::string& m) { throw Error(ErrorKind::Config, m); }
[[noreturn]] inline void data_error(const std::string& m) { throw Error(ErrorKind::Data, m); }

} // namespace fleetsim

#endif
