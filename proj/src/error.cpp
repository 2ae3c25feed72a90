#include "debtbugs/error.hpp"

#include <sstream>

namespace debtbugs {

ParseError::ParseError(std::size_t line, const std::string& what)
    : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

DuplicateIdError::DuplicateIdError(std::int64_t bug_id, std::size_t first_line,
                                   std::size_t second_line)
    : DataError("duplicate bug_id " + std::to_string(bug_id) + " on lines " +
                std::to_string(first_line) + " and " + std::to_string(second_line)),
      bug_id_(bug_id),
      first_line_(first_line),
      second_line_(second_line) {}

namespace {

std::string describe_cycle(const std::vector<std::int64_t>& cycle) {
  std::ostringstream os;
  os << "duplicate_of cycle:";
  for (auto id : cycle) os << ' ' << id;
  return os.str();
}

}  // namespace

CycleError::CycleError(std::vector<std::int64_t> cycle)
    : DataError(describe_cycle(cycle)), cycle_(std::move(cycle)) {}

}  // namespace debtbugs
