#pragma once

#include "trgo/error.hpp"
#include "trgo/kinematics.hpp"
#include "trgo/terrain.hpp"
#include "trgo/simulator.hpp"
#include "trgo/objectives.hpp"
#include "trgo/moea/pareto.hpp"
#include "trgo/moea/population.hpp"
#include "trgo/moea/variation.hpp"
#include "trgo/moea/optimizer.hpp"
#include "trgo/transfer/kernel.hpp"
#include "trgo/transfer/tca.hpp"
#include "trgo/transfer/inverse_search.hpp"
#include "trgo/transfer/tr_gigp.hpp"
#include "trgo/harness/gait_problem.hpp"
#include "trgo/harness/experiment.hpp"
#include "trgo/harness/export.hpp"
#include "trgo/harness/plot.hpp"
