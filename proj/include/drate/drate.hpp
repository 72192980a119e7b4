#pragma once

#include "drate/core.hpp"
#include "drate/estimators/ate.hpp"
#include "drate/estimators/dsm.hpp"
#include "drate/estimators/pencomp.hpp"
#include "drate/harness.hpp"
#include "drate/inference.hpp"
#include "drate/io/csv.hpp"
#include "drate/models/gam.hpp"
#include "drate/models/gbt.hpp"
#include "drate/models/lasso.hpp"
#include "drate/models/linear.hpp"
#include "drate/models/logistic.hpp"
#include "drate/models/nuisance.hpp"
#include "drate/models/stepwise.hpp"
#include "drate/models/superlearner.hpp"
#include "drate/parallel.hpp"
#include "drate/pipeline.hpp"
#include "drate/rng.hpp"
#include "drate/sim.hpp"
#include "drate/stats.hpp"
