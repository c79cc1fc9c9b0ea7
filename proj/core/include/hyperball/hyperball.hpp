#pragma once

#include "hyperball/barycenter.hpp"
#include "hyperball/clustering.hpp"
#include "hyperball/error.hpp"
#include "hyperball/experiments.hpp"
#include "hyperball/geometry.hpp"
#include "hyperball/moebius_dist.hpp"
#include "hyperball/random.hpp"
#include "hyperball/special.hpp"
