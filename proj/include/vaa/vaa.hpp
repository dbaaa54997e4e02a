#pragma once

#include "vaa/circuits.hpp"
#include "vaa/engine.hpp"
#include "vaa/error.hpp"
#include "vaa/estimator.hpp"
#include "vaa/hybrid.hpp"
#include "vaa/problems.hpp"
#include "vaa/regression.hpp"
#include "vaa/rng.hpp"
#include "vaa/spectrum.hpp"
#include "vaa/sweep.hpp"
