#pragma once

#include "feddmf/dataset.hpp"
#include "feddmf/experiment.hpp"
#include "feddmf/federation.hpp"
#include "feddmf/layers.hpp"
#include "feddmf/losses.hpp"
#include "feddmf/matrix.hpp"
#include "feddmf/metrics.hpp"
#include "feddmf/model.hpp"
#include "feddmf/optimizer.hpp"
#include "feddmf/rng.hpp"
