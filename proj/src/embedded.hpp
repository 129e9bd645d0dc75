#pragma once

#include <map>
#include <string>

// Generated at configure time from fixtures/ and schema/.
namespace ignorance::embedded {

const std::map<std::string, std::string>& fixtures();
const std::string& schema();

}  // namespace ignorance::embedded
