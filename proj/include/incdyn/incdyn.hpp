#pragma once

#include "incdyn/block.hpp"
#include "incdyn/crossval.hpp"
#include "incdyn/dists.hpp"
#include "incdyn/dominance.hpp"
#include "incdyn/error.hpp"
#include "incdyn/forecast.hpp"
#include "incdyn/io.hpp"
#include "incdyn/mcmc.hpp"
#include "incdyn/model.hpp"
#include "incdyn/parallel.hpp"
#include "incdyn/random.hpp"
#include "incdyn/simulate.hpp"
#include "incdyn/specfun.hpp"
#include "incdyn/welfare.hpp"
