#pragma once

#include "tivstat/error.hpp"
#include "tivstat/estimators.hpp"
#include "tivstat/fitting.hpp"
#include "tivstat/io.hpp"
#include "tivstat/numeric.hpp"
#include "tivstat/quadrature.hpp"
#include "tivstat/random.hpp"
#include "tivstat/rmt.hpp"
#include "tivstat/special.hpp"
#include "tivstat/spectra.hpp"
#include "tivstat/stat_curve.hpp"
#include "tivstat/theory.hpp"
