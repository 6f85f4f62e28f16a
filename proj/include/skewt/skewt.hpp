#pragma once

#include "skewt/distributions.hpp"
#include "skewt/errors.hpp"
#include "skewt/io.hpp"
#include "skewt/oracle.hpp"
#include "skewt/posterior.hpp"
#include "skewt/predictive.hpp"
#include "skewt/quadrature.hpp"
#include "skewt/risk.hpp"
#include "skewt/rng.hpp"
#include "skewt/special.hpp"
