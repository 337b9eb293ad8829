#pragma once

#include "expklms/analysis.hpp"
#include "expklms/checks.hpp"
#include "expklms/config.hpp"
#include "expklms/error.hpp"
#include "expklms/experiment.hpp"
#include "expklms/oped.hpp"
#include "expklms/policies.hpp"
#include "expklms/quadrature.hpp"
#include "expklms/random.hpp"
#include "expklms/simulator.hpp"
