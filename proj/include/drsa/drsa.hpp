#pragma once

#include "drsa/core.hpp"
#include "drsa/survival.hpp"
#include "drsa/data.hpp"
#include "drsa/nn.hpp"
#include "drsa/baseline.hpp"
#include "drsa/metrics.hpp"
#include "drsa/train.hpp"
#include "drsa/checkpoint.hpp"
