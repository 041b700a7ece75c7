#pragma once

#include "cvtomo/estimator.hpp"
#include "cvtomo/experiments.hpp"
#include "cvtomo/io.hpp"
#include "cvtomo/padua.hpp"
#include "cvtomo/polar.hpp"
#include "cvtomo/states.hpp"
