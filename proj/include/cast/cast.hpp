#pragma once

#include "cast/core.hpp"
#include "cast/datasets.hpp"
#include "cast/metrics.hpp"
#include "cast/pseudoeig.hpp"
#include "cast/similarity.hpp"
#include "cast/solvers.hpp"
#include "cast/spectral.hpp"
#include "cast/tknn.hpp"
