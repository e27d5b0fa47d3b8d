#pragma once

#include "sqz/algebra.hpp"
#include "sqz/analytic.hpp"
#include "sqz/core.hpp"
#include "sqz/errors.hpp"
#include "sqz/fock.hpp"
#include "sqz/gridprop.hpp"
#include "sqz/linalg.hpp"
#include "sqz/quadrature.hpp"
#include "sqz/tof.hpp"
#include "sqz/version.hpp"
