#pragma once

// Umbrella header for the solver library (the CLI layer lives in cli.hpp).

#include "heun_gamma/errors.hpp"
#include "heun_gamma/numerics/polynomial.hpp"
#include "heun_gamma/numerics/quadrature.hpp"
#include "heun_gamma/numerics/special.hpp"
#include "heun_gamma/equations.hpp"
#include "heun_gamma/recurrence.hpp"
#include "heun_gamma/expansion.hpp"
#include "heun_gamma/termination.hpp"
#include "heun_gamma/oracle.hpp"
