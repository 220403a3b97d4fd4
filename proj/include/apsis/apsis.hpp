#pragma once

#include "apsis/campaigns.hpp"
#include "apsis/config.hpp"
#include "apsis/error.hpp"
#include "apsis/funcs.hpp"
#include "apsis/grid.hpp"
#include "apsis/interval.hpp"
#include "apsis/orbit.hpp"
#include "apsis/quadrature.hpp"
#include "apsis/report.hpp"
#include "apsis/scalar.hpp"
#include "apsis/sweep.hpp"
#include "apsis/tail.hpp"
