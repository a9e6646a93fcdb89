#pragma once

// Core simulator. The YAML loaders (photonn/io/yaml.hpp) and the command-line
// driver (photonn/cli/run.hpp) need yaml-cpp and are included separately.

#include "photonn/error.hpp"
#include "photonn/laser/excitability.hpp"
#include "photonn/laser/lif.hpp"
#include "photonn/laser/spikes.hpp"
#include "photonn/laser/yamada.hpp"
#include "photonn/metrics/mac.hpp"
#include "photonn/metrics/reference.hpp"
#include "photonn/network/circuits.hpp"
#include "photonn/network/network.hpp"
#include "photonn/network/weighted_sum.hpp"
#include "photonn/qp/problem.hpp"
#include "photonn/qp/solver.hpp"
#include "photonn/weightbank/accuracy.hpp"
#include "photonn/weightbank/calibration.hpp"
