#pragma once

#include "fibstat/error.hpp"
#include "fibstat/exact.hpp"
#include "fibstat/fib_core.hpp"
#include "fibstat/sequence.hpp"
#include "fibstat/density.hpp"
#include "fibstat/stat_convergence.hpp"
#include "fibstat/korovkin.hpp"
#include "fibstat/rate.hpp"
