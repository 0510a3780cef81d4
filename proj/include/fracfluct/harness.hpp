#pragma once

// Experiment harness: configuration, thread pool, reports and the registered experiments.
#include "harness/config.hpp"
#include "harness/experiments.hpp"
#include "harness/pool.hpp"
#include "harness/report.hpp"
