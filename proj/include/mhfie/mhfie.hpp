#pragma once

#include "mhfie/approx.hpp"
#include "mhfie/error.hpp"
#include "mhfie/experiments.hpp"
#include "mhfie/hermite.hpp"
#include "mhfie/mhf.hpp"
#include "mhfie/newton.hpp"
#include "mhfie/problem.hpp"
#include "mhfie/reference_quadrature.hpp"
#include "mhfie/registry.hpp"
#include "mhfie/report.hpp"
#include "mhfie/solver.hpp"
