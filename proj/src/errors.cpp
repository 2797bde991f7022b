// SPDX-License-Identifier: Apache-2.0
#include "remskit/errors.hpp"

#include <sstream>

namespace remskit {

ParseError::ParseError(const std::string& what, int line)
    : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

static std::string conditioning_message(const std::string& loop, double condition)
{
    std::ostringstream os;
    os << "ill-conditioned loop " << loop << " (condition number " << condition << ")";
    return os.str();
}

ConditioningError::ConditioningError(const std::string& loop, double condition)
    : NumericError(conditioning_message(loop, condition)), loop_(loop), condition_(condition) {}

}  // namespace remskit
