#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tsdr {

enum class Method {
  SIR,     // raw predictors
  FSIR,    // true transforms (simulation only)
  TSIR,    // normal scores
  YJSIR,   // Yeo-Johnson transforms
  MAVE,
  TMAVE,
};

std::string_view to_string(Method m) noexcept;
/// Case-insensitive; accepts "T-SIR", "tsir", "YJ-SIR", ... Throws InvalidArgument.
Method parse_method(std::string_view name);
std::vector<std::string> method_names();

inline bool is_sir_family(Method m) noexcept { return m != Method::MAVE && m != Method::TMAVE; }

}  // namespace tsdr
