#ifndef FAMA_FAMA_HPP
#define FAMA_FAMA_HPP

#include "analytic.hpp"
#include "channel.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "montecarlo.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "specfun.hpp"
#include "strategy.hpp"
#include "sweep.hpp"

#endif
