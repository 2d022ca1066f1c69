#pragma once

#include <initializer_list>
#include <iosfwd>
#include <mutex>
#include <string_view>
#include <utility>

namespace acrp {

/// JSON-lines event sink shared by the solvers. Each call writes one object
/// {"event": ..., "label": ..., <fields>} and flushes. Thread-safe.
class EventLog {
 public:
  explicit EventLog(std::ostream& out) : out_(out) {}

  void write(std::string_view event, std::string_view label,
             std::initializer_list<std::pair<std::string_view, double>> fields);

 private:
  std::ostream& out_;
  std::mutex mu_;
};

}  // namespace acrp
