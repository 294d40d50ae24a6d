#pragma once

#include <string>

#include "fermion/specfun.hpp"

namespace fermion::cli {

/// Accepts "a", "a+bi", "a-bi", "bi", "i", "-i". Throws DomainError otherwise.
specfun::cplx parse_complex(const std::string& text);

/// "re+imi" with shortest round-trip decimals.
std::string format_complex(specfun::cplx z);

}  // namespace fermion::cli
