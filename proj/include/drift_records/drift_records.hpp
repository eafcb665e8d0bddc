#pragma once

#include "drift_records/analysis.hpp"
#include "drift_records/closed_form.hpp"
#include "drift_records/correlation.hpp"
#include "drift_records/distributions.hpp"
#include "drift_records/errors.hpp"
#include "drift_records/estimation.hpp"
#include "drift_records/probability.hpp"
#include "drift_records/quadrature.hpp"
#include "drift_records/record_core.hpp"
#include "drift_records/rng.hpp"
#include "drift_records/simulator.hpp"
