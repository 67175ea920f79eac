#pragma once

#include "epigrowth/correlate.hpp"
#include "epigrowth/csv.hpp"
#include "epigrowth/date.hpp"
#include "epigrowth/error.hpp"
#include "epigrowth/fit.hpp"
#include "epigrowth/growth.hpp"
#include "epigrowth/regress.hpp"
#include "epigrowth/segment.hpp"
#include "epigrowth/sir.hpp"
#include "epigrowth/timeseries.hpp"
