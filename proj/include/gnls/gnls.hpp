#pragma once

#include "gnls/checkpoint.hpp"
#include "gnls/diagnostics.hpp"
#include "gnls/error.hpp"
#include "gnls/functionals.hpp"
#include "gnls/grid.hpp"
#include "gnls/polynomial.hpp"
#include "gnls/polynomial_io.hpp"
#include "gnls/profile.hpp"
#include "gnls/run.hpp"
#include "gnls/scenario.hpp"
#include "gnls/solver.hpp"
#include "gnls/spectral.hpp"
#include "gnls/sphere.hpp"
#include "gnls/variational.hpp"
