#pragma once

// Umbrella header: multivariate Gaussian geospatial modeling with the
// parsimonious Matern cross-covariance, exact and tile low-rank likelihood
// backends, cokriging prediction, and prediction-efficiency assessment.

#include "geostat/assembly.hpp"
#include "geostat/assess.hpp"
#include "geostat/cholesky.hpp"
#include "geostat/covariance.hpp"
#include "geostat/dataset.hpp"
#include "geostat/errors.hpp"
#include "geostat/experiments.hpp"
#include "geostat/geometry.hpp"
#include "geostat/io.hpp"
#include "geostat/likelihood.hpp"
#include "geostat/optimize.hpp"
#include "geostat/predict.hpp"
#include "geostat/rng.hpp"
#include "geostat/simulate.hpp"
#include "geostat/specfun.hpp"
#include "geostat/task_graph.hpp"
#include "geostat/tiled_matrix.hpp"
#include "geostat/tlr.hpp"
#include "geostat/truncated_svd.hpp"
