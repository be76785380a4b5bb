#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

namespace ssnsdp {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// shapes/orders don't line up
class DimensionError : public Error {
 public:
  using Error::Error;
};

// caller handed us something outside the operation's contract
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularSystemError : public Error {
 public:
  using Error::Error;
};

// SSN_SDP_LOG: 0/quiet, 1/warn (default), 2/info, 3/debug
enum class LogLevel { quiet = 0, warn = 1, info = 2, debug = 3 };

inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("SSN_SDP_LOG");
    if (!env || !*env) return LogLevel::warn;
    if (!std::strcmp(env, "quiet") || !std::strcmp(env, "0")) return LogLevel::quiet;
    if (!std::strcmp(env, "info") || !std::strcmp(env, "2")) return LogLevel::info;
    if (!std::strcmp(env, "debug") || !std::strcmp(env, "3")) return LogLevel::debug;
    return LogLevel::warn;
  }();
  return level;
}

inline void log_msg(LogLevel lvl, const std::string& msg) {
  if (static_cast<int>(lvl) > static_cast<int>(log_level())) return;
  static const char* tags[] = {"", "warning", "info", "debug"};
  std::fprintf(stderr, "[ssn_sdp %s] %s\n", tags[static_cast<int>(lvl)], msg.c_str());
}

}  // namespace ssnsdp
