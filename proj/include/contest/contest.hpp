#pragma once

#include "contest/distributions.hpp"
#include "contest/equilibrium.hpp"
#include "contest/errors.hpp"
#include "contest/montecarlo.hpp"
#include "contest/objectives.hpp"
#include "contest/optimizer.hpp"
#include "contest/order_statistics.hpp"
#include "contest/quadrature.hpp"
#include "contest/rng.hpp"
#include "contest/special_functions.hpp"
#include "contest/verify.hpp"
