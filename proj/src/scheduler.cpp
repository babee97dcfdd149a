#include "diffrank/scheduler.hpp"

#include <string>

#include "diffrank/errors.hpp"

namespace diffrank {

SchedulerKind parse_scheduler_kind(std::string_view name) {
  if (name == "cyc") return SchedulerKind::cyclic;
  if (name == "argmax") return SchedulerKind::argmax;
  if (name == "greedy") return SchedulerKind::greedy;
  throw ConfigError("unknown scheduler '" + std::string(name) +
                    "' (expected cyc, argmax or greedy)");
}

std::string_view scheduler_name(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::cyclic:
      return "cyc";
    case SchedulerKind::argmax:
      return "argmax";
    case SchedulerKind::greedy:
      return "greedy";
  }
  return "?";
}

}  // namespace diffrank
