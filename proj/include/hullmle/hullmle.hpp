#pragma once

// Everything in one include.

#include "hullmle/batch.hpp"
#include "hullmle/benchmark.hpp"
#include "hullmle/estimate.hpp"
#include "hullmle/expfam.hpp"
#include "hullmle/hull.hpp"
#include "hullmle/io.hpp"
#include "hullmle/lp.hpp"
#include "hullmle/numerics.hpp"
#include "hullmle/optimize.hpp"
#include "hullmle/parallel.hpp"
#include "hullmle/random.hpp"
