#pragma once

#include "fracfluct/bounds.hpp"
#include "fracfluct/cumulants.hpp"
#include "fracfluct/effective.hpp"
#include "fracfluct/fbm.hpp"
#include "fracfluct/grid.hpp"
#include "fracfluct/jtilde.hpp"
#include "fracfluct/lifts.hpp"
#include "fracfluct/model.hpp"
#include "fracfluct/multiscale.hpp"
#include "fracfluct/ou.hpp"
#include "fracfluct/partition.hpp"
#include "fracfluct/path.hpp"
#include "fracfluct/poly.hpp"
#include "fracfluct/quadrature.hpp"
#include "fracfluct/rng.hpp"
#include "fracfluct/rough.hpp"
#include "fracfluct/stats.hpp"
#include "fracfluct/yde.hpp"
