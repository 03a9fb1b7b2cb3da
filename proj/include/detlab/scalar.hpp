#pragma once

#include <cmath>

namespace detlab {

// Unqualified math calls inside detlab resolve to these for the built-in
// floating types and, through argument-dependent lookup, to the overloads of
// any user-supplied number type the templates are instantiated with.
using std::abs;
using std::exp;
using std::log;
using std::pow;
using std::sqrt;

} // namespace detlab
