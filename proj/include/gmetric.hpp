#pragma once

#include "gmetric/axioms.hpp"
#include "gmetric/convexity.hpp"
#include "gmetric/distance.hpp"
#include "gmetric/error.hpp"
#include "gmetric/expr.hpp"
#include "gmetric/mapping.hpp"
#include "gmetric/metric.hpp"
#include "gmetric/orbit.hpp"
#include "gmetric/point.hpp"
#include "gmetric/region.hpp"
#include "gmetric/report.hpp"
#include "gmetric/sampling.hpp"
#include "gmetric/scenario.hpp"
#include "gmetric/selfmap.hpp"
#include "gmetric/solve.hpp"
#include "gmetric/witness.hpp"
