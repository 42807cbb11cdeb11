#pragma once

#include "ethlab/config.hpp"
#include "ethlab/ensemble.hpp"
#include "ethlab/error.hpp"
#include "ethlab/eth_stats.hpp"
#include "ethlab/harness.hpp"
#include "ethlab/locallaw.hpp"
#include "ethlab/observables.hpp"
#include "ethlab/rng.hpp"
#include "ethlab/scaling.hpp"
#include "ethlab/semicircle.hpp"
#include "ethlab/spectral.hpp"
#include "ethlab/table.hpp"
