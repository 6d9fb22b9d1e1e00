#pragma once

#include "isnet/analytic.hpp"
#include "isnet/config.hpp"
#include "isnet/distributions.hpp"
#include "isnet/errors.hpp"
#include "isnet/model.hpp"
#include "isnet/random.hpp"
#include "isnet/report.hpp"
#include "isnet/simulate.hpp"
#include "isnet/stats.hpp"
