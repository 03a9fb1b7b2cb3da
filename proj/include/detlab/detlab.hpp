#pragma once

#include "detlab/checks.hpp"
#include "detlab/error.hpp"
#include "detlab/io.hpp"
#include "detlab/linalg.hpp"
#include "detlab/majorization.hpp"
#include "detlab/matrix.hpp"
#include "detlab/means.hpp"
#include "detlab/sampler.hpp"
#include "detlab/search.hpp"
#include "detlab/tolerance.hpp"
