#include "acrp/events.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include <fmt/format.h>
#include <json.hpp>

namespace acrp {

void EventLog::write(std::string_view event, std::string_view label,
                     std::initializer_list<std::pair<std::string_view, double>> fields) {
  std::string line = "{\"event\":" + nlohmann::json(std::string(event)).dump();
  if (!label.empty()) line += ",\"label\":" + nlohmann::json(std::string(label)).dump();
  for (const auto& [k, v] : fields) {
    line += "," + nlohmann::json(std::string(k)).dump() + ":";
    line += std::isfinite(v) ? fmt::format("{:.17g}", v) : std::string("null");
  }
  line += "}\n";
  std::lock_guard<std::mutex> lock(mu_);
  out_ << line;
  out_.flush();
}

}  // namespace acrp
