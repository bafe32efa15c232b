#pragma once

#include "errors.hpp"
#include "model.hpp"
#include "specfun.hpp"
#include "ode.hpp"
#include "numerics.hpp"
#include "frobenius.hpp"
#include "eikonal.hpp"
#include "normal_ops.hpp"
#include "rays.hpp"
#include "resolvent.hpp"
#include "synthesis.hpp"
#include "io.hpp"
